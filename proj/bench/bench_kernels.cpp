// Serial reference vs OpenMP kernels. Run with OMP_NUM_THREADS set to the
// number of cores to see the speedup.
#include <benchmark/benchmark.h>

#include "waterfall/experiment.hpp"
#include "waterfall/kernels.hpp"

namespace wf = waterfall;

namespace {

const wf::PriceGrid kGrid = wf::PriceGrid::uniform(11);

const wf::Environment& synthetic_env() {
  static const wf::Environment env(wf::synthetic_beta_env(), kGrid, 1);
  return env;
}

const wf::Action kAction({{0, 7}, {1, 4}, {2, 3}, {3, 3}});

void BM_MonteCarloSerial(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(wf::simulate_revenue_serial(synthetic_env(), kAction, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MonteCarloParallel(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(wf::simulate_revenue_parallel(synthetic_env(), kAction, state.range(0)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

wf::ExperimentSpec replication_spec(std::int64_t horizon) {
  wf::ExperimentSpec s;
  s.name = "bench";
  s.env = wf::synthetic_beta_env();
  s.grid = kGrid;
  s.policies = {{"UCB-Greedy", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Greedy},
                {"UCB-LP", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Lp}};
  s.horizon = static_cast<std::uint64_t>(horizon);
  s.replications = 4;
  s.metrics_every = 1000;
  return s;
}

void BM_ReplicationsSerial(benchmark::State& state) {
  const auto spec = replication_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wf::run_trajectories(spec, wf::Execution::Serial));
}

void BM_ReplicationsParallel(benchmark::State& state) {
  const auto spec = replication_spec(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wf::run_trajectories(spec, wf::Execution::Parallel));
}

}  // namespace

BENCHMARK(BM_MonteCarloSerial)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsSerial)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsParallel)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
