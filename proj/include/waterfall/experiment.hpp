#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "waterfall/bandit.hpp"
#include "waterfall/env.hpp"
#include "waterfall/model.hpp"
#include "waterfall/oracle.hpp"

namespace waterfall {

struct PolicySpec {
  std::string label;
  PolicyKind kind = PolicyKind::WaterfallUcb1;
  OracleKind oracle = OracleKind::Greedy;
  std::uint64_t n0 = 500;  // explore-then-exploit only
  bool joint = false;      // multi-slot: one shared learner for all slots
};

struct ExperimentSpec {
  std::string name;
  EnvSpec env;
  PriceGrid grid = PriceGrid::uniform(11);
  std::vector<PolicySpec> policies;
  std::uint64_t horizon = 1;
  std::uint64_t replications = 1;
  std::uint64_t seed = 0;
  std::optional<double> gamma;  // per-oracle default when unset
  std::uint64_t metrics_every = 100;
  std::string output;
  std::uint64_t brute_force_cap = kDefaultBruteForceCap;
};

// Throws ConfigError describing the first problem found.
void validate(const ExperimentSpec& spec);

// Structured config (JSON). Relative model-file paths resolve against
// `base_dir`.
ExperimentSpec parse_experiment_config(const nlohmann::json& config, const std::string& base_dir = ".");
ExperimentSpec load_experiment_config(const std::string& path);
EnvSpec parse_env_spec(const nlohmann::json& env, const PriceGrid& grid, const std::string& base_dir);

struct MetricsRow {
  std::uint64_t step = 0;
  std::string label;
  double cumulative_reward = 0.0;  // mean over replications
  double reward_std = 0.0;         // sample std of cumulative reward over replications
  double running_avg = 0.0;        // cumulative_reward / step
  std::optional<double> scaled_regret;
  std::vector<double> slot_cumulative;  // multi-slot: mean cumulative reward earned per slot
};

// Logged steps: 1, every `every`-th step, and the horizon.
std::vector<std::uint64_t> logged_steps(std::uint64_t horizon, std::uint64_t every);

// R(t) = t * gamma * f(A*, w) - sum_{s <= t} f(A_s, w), with w the true
// table of the slot played at step s and A* its brute-force optimum.
class RegretAccumulator {
 public:
  RegretAccumulator(std::vector<WeightTable> truth, PriceGrid grid, double gamma, std::uint64_t cap);

  void add(const Action& action, std::size_t slot = 0);
  double value() const { return regret_; }
  double optimum(std::size_t slot = 0) const { return optimum_[slot]; }

 private:
  std::vector<WeightTable> truth_;
  PriceGrid grid_;
  double gamma_;
  std::vector<double> optimum_;
  double regret_ = 0.0;
};

// Per-step scaled regret of a sequence of single-slot actions.
std::vector<double> scaled_regret(const std::vector<Action>& actions, const WeightTable& truth,
                                  const PriceGrid& grid, double gamma, std::uint64_t cap = kDefaultBruteForceCap);

// True when every slot's table is small enough for brute force.
bool regret_available(const Environment& env, std::uint64_t cap);

enum class Execution { Serial, Parallel };

// Raw per-replication trajectories of one experiment.
struct Trajectory {
  std::vector<double> cumulative;  // at each logged step
  std::vector<double> regret;      // empty when unavailable
  std::vector<std::vector<double>> slot_cumulative;  // [logged step][slot]
};

struct RunResult {
  std::vector<std::uint64_t> steps;
  std::vector<std::string> labels;
  std::vector<std::vector<Trajectory>> runs;  // [policy][replication]
  std::size_t slots = 1;
};

RunResult run_trajectories(const ExperimentSpec& spec, Execution exec = Execution::Parallel);

// Averages trajectories by label; several runs sharing a label (e.g.
// random partitions of the same figure) are pooled as extra replications.
std::vector<MetricsRow> summarize(const std::vector<RunResult>& parts);

std::vector<MetricsRow> run(const ExperimentSpec& spec, Execution exec = Execution::Parallel);

void write_csv(const std::vector<MetricsRow>& rows, std::ostream& out);
void write_csv(const std::vector<MetricsRow>& rows, const std::string& path);

// Last logged row for `label` at exactly `step`; throws if missing.
const MetricsRow& find_row(const std::vector<MetricsRow>& rows, const std::string& label, std::uint64_t step);

// ---- figure catalog ----

struct FigureRequest {
  std::string figure;
  std::optional<std::string> data;  // bid log, required for fig2*..fig5*
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> replications;
  std::uint64_t seed = 1;
};

std::vector<std::string> figure_ids();

// Experiments whose pooled summary makes up the figure.
std::vector<ExperimentSpec> figure_specs(const FigureRequest& request);

// Environment of the synthetic single-slot problem: one Beta(5,2) network
// followed by three Beta(2,5) networks.
EnvSpec synthetic_beta_env();

// Split `networks` into groups of the given sizes after a seeded shuffle.
std::vector<std::vector<std::size_t>> random_partition(std::size_t networks, const std::vector<std::size_t>& sizes,
                                                       std::uint64_t seed);

std::vector<MetricsRow> reproduce(const FigureRequest& request, Execution exec = Execution::Parallel);

}  // namespace waterfall
