#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "waterfall/errors.hpp"
#include "waterfall/experiment.hpp"

namespace wf = waterfall;
using nlohmann::json;

namespace {

wf::ExperimentSpec small_spec() {
  wf::ExperimentSpec s;
  s.name = "small";
  s.grid = wf::PriceGrid::uniform(3);
  s.env = wf::EnvSpec{wf::TableSpec{wf::WeightTable(3, 3, std::vector<double>{1, 0.7, 0.2, 1, 0.5, 0.4, 1, 0.9, 0.1})}};
  s.policies = {{"Offline-Greedy", wf::PolicyKind::Offline, wf::OracleKind::Greedy},
                {"UCB-Greedy", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Greedy},
                {"UCB-LP", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Lp},
                {"Exp2-Greedy", wf::PolicyKind::ExploreExploit, wf::OracleKind::Greedy, 50}};
  s.horizon = 2000;
  s.replications = 4;
  s.seed = 17;
  s.gamma = 1.0;
  s.metrics_every = 100;
  return s;
}

std::string csv(const std::vector<wf::MetricsRow>& rows) {
  std::ostringstream os;
  wf::write_csv(rows, os);
  return os.str();
}

}  // namespace

TEST(LoggedSteps, IncludesFirstMultiplesAndHorizon) {
  EXPECT_EQ(wf::logged_steps(250, 100), (std::vector<std::uint64_t>{1, 100, 200, 250}));
  EXPECT_EQ(wf::logged_steps(200, 100), (std::vector<std::uint64_t>{1, 100, 200}));
  EXPECT_EQ(wf::logged_steps(1, 100), (std::vector<std::uint64_t>{1}));
}

TEST(Validate, RejectsBadSpecs) {
  auto expect_bad = [](auto mutate) {
    auto s = small_spec();
    mutate(s);
    EXPECT_THROW(wf::validate(s), wf::ConfigError);
  };
  EXPECT_NO_THROW(wf::validate(small_spec()));
  expect_bad([](wf::ExperimentSpec& s) { s.policies.clear(); });
  expect_bad([](wf::ExperimentSpec& s) { s.horizon = 0; });
  expect_bad([](wf::ExperimentSpec& s) { s.replications = 0; });
  expect_bad([](wf::ExperimentSpec& s) { s.metrics_every = 0; });
  expect_bad([](wf::ExperimentSpec& s) { s.gamma = 0.0; });
  expect_bad([](wf::ExperimentSpec& s) { s.gamma = 1.5; });
  expect_bad([](wf::ExperimentSpec& s) { s.policies[1].label = s.policies[0].label; });
  expect_bad([](wf::ExperimentSpec& s) { s.policies[0].label = "a,b"; });
  expect_bad([](wf::ExperimentSpec& s) { s.grid = wf::PriceGrid::uniform(4); });
}

TEST(Config, ParsesSyntheticExperiment) {
  const json j = {{"name", "synthetic"},
                  {"grid", {{"uniform", 11}}},
                  {"env", {{"kind", "beta"}, {"alpha", {5, 2, 2, 2}}, {"beta", {2, 5, 5, 5}}}},
                  {"policies", {{{"kind", "offline"}}, {{"kind", "ucb"}, {"oracle", "lp"}}, {{"kind", "exp2"}, {"n0", 10}}}},
                  {"horizon", 1000},
                  {"replications", 3},
                  {"seed", 5}};
  const auto s = wf::parse_experiment_config(j);
  EXPECT_EQ(s.grid.size(), 11u);
  ASSERT_EQ(s.policies.size(), 3u);
  EXPECT_EQ(s.policies[0].label, "Offline-Greedy");
  EXPECT_EQ(s.policies[1].label, "UCB-LP");
  EXPECT_EQ(s.policies[2].label, "Exp2-Greedy");
  EXPECT_EQ(s.policies[2].n0, 10u);
  EXPECT_EQ(s.horizon, 1000u);
  EXPECT_FALSE(s.gamma);
}

TEST(Config, ErrorsAreConfigErrors) {
  const json env = {{"kind", "table"}, {"weights", {{0.5, 0.5}}}};
  const json good = {{"grid", {0.5, 1.0}}, {"env", env}, {"policies", {{{"kind", "ucb"}}}}, {"horizon", 10}};
  EXPECT_NO_THROW(wf::parse_experiment_config(good));
  auto bad = good;
  bad.erase("horizon");
  EXPECT_THROW(wf::parse_experiment_config(bad), wf::ConfigError);
  bad = good;
  bad["policies"][0]["kind"] = "thompson";
  EXPECT_THROW(wf::parse_experiment_config(bad), wf::ConfigError);
  bad = good;
  bad["env"]["kind"] = "gaussian";
  EXPECT_THROW(wf::parse_experiment_config(bad), wf::ConfigError);
  bad = good;
  bad["env"]["weights"] = {{0.5, 1.5}};
  EXPECT_THROW(wf::parse_experiment_config(bad), wf::ConfigError);
  bad = good;
  bad["grid"] = {1.0, 0.5};
  EXPECT_THROW(wf::parse_experiment_config(bad), wf::ConfigError);
  EXPECT_THROW(wf::load_experiment_config("/nonexistent/config.json"), wf::ConfigError);
}

TEST(Regret, ZeroAtOptimumAndLinearOtherwise) {
  const wf::PriceGrid g({0.4, 0.8});
  const wf::WeightTable w(2, 2, std::vector<double>{1.0, 0.6, 0.5, 0.5});
  const auto best = wf::brute_force_optimum(w, g);
  const auto zero = wf::scaled_regret(std::vector<wf::Action>(50, best.action), w, g, 1.0);
  for (double r : zero) EXPECT_NEAR(r, 0.0, 1e-12);

  const wf::Action worse({{1, 0}, {0, 0}});
  const double gap = best.value - wf::expected_revenue(worse, w, g);
  ASSERT_GT(gap, 0.0);
  const auto lin = wf::scaled_regret(std::vector<wf::Action>(50, worse), w, g, 1.0);
  for (std::size_t t = 0; t < lin.size(); ++t) EXPECT_NEAR(lin[t], static_cast<double>(t + 1) * gap, 1e-12);

  wf::RegretAccumulator acc({w}, g, 0.5, wf::kDefaultBruteForceCap);
  acc.add(best.action);
  EXPECT_NEAR(acc.value(), -0.5 * best.value, 1e-12);
  EXPECT_EQ(acc.optimum(), best.value);
}

TEST(Run, OfflineSingleStepOnDeterministicTable) {
  wf::ExperimentSpec s;
  s.grid = wf::PriceGrid({0.7});
  s.env = wf::EnvSpec{wf::TableSpec{wf::WeightTable(1, 1, 1.0)}};
  s.policies = {{"Offline-Greedy", wf::PolicyKind::Offline, wf::OracleKind::Greedy}};
  s.horizon = 1;
  const auto rows = wf::run(s, wf::Execution::Serial);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].step, 1u);
  EXPECT_EQ(rows[0].running_avg, 0.7);
  EXPECT_EQ(rows[0].reward_std, 0.0);
  EXPECT_NEAR(*rows[0].scaled_regret, 0.0, 1e-12);
}

TEST(Run, OfflineConvergesToExpectedRevenue) {
  wf::ExperimentSpec s;
  s.grid = wf::PriceGrid::uniform(11);
  s.env = wf::synthetic_beta_env();
  s.policies = {{"Offline-Greedy", wf::PolicyKind::Offline, wf::OracleKind::Greedy}};
  s.horizon = 100'000;
  s.metrics_every = 100'000;
  s.seed = 3;
  const auto rows = wf::run(s);
  const wf::Environment env(s.env, s.grid, 0);
  const double f = wf::expected_revenue(wf::greedy_oracle(env.true_acceptance_table(), s.grid),
                                        env.true_acceptance_table(), s.grid);
  // Revenue lies in [0, 1], so its variance is at most f (1 - f).
  const double sigma = std::sqrt(f * (1 - f) / 1e5);
  EXPECT_NEAR(wf::find_row(rows, "Offline-Greedy", 100'000).running_avg, f, 3 * sigma);
}

TEST(Run, SerialAndParallelProduceIdenticalCsv) {
  const auto spec = small_spec();
  const auto serial = csv(wf::run(spec, wf::Execution::Serial));
  EXPECT_EQ(serial, csv(wf::run(spec, wf::Execution::Parallel)));
  EXPECT_EQ(serial, csv(wf::run(spec, wf::Execution::Parallel)));
  EXPECT_EQ(serial.substr(0, serial.find('\n')), "step,label,replication_mean_reward,replication_std,running_avg,scaled_regret");
}

TEST(Run, SeedChangesResults) {
  auto a = small_spec();
  auto b = small_spec();
  b.seed = 18;
  EXPECT_NE(csv(wf::run(a)), csv(wf::run(b)));
}

TEST(Run, RowInvariants) {
  const auto spec = small_spec();
  const auto rows = wf::run(spec);
  EXPECT_EQ(rows.size(), spec.policies.size() * wf::logged_steps(spec.horizon, spec.metrics_every).size());
  for (const auto& p : spec.policies) {
    double prev = 0.0;
    for (auto step : wf::logged_steps(spec.horizon, spec.metrics_every)) {
      const auto& r = wf::find_row(rows, p.label, step);
      EXPECT_GE(r.cumulative_reward, prev);
      EXPECT_DOUBLE_EQ(r.running_avg, r.cumulative_reward / static_cast<double>(step));
      EXPECT_GE(r.reward_std, 0.0);
      ASSERT_TRUE(r.scaled_regret);
      // gamma = 1 against the true optimum.
      EXPECT_GE(*r.scaled_regret, -1e-9);
      prev = r.cumulative_reward;
    }
  }
}

TEST(Run, RegretOmittedWhenBruteForceTooLarge) {
  auto spec = small_spec();
  spec.brute_force_cap = 10;
  for (const auto& r : wf::run(spec)) EXPECT_FALSE(r.scaled_regret);
  std::ostringstream os;
  wf::write_csv(wf::run(spec), os);
  EXPECT_NE(os.str().find(",\n"), std::string::npos);
}

TEST(Run, MultiSlotJointAndPerSlotLearners) {
  wf::ExperimentSpec s;
  s.grid = wf::PriceGrid::uniform(3);
  const wf::EnvSpec slot{wf::TableSpec{wf::WeightTable(2, 3, std::vector<double>{1, 0.8, 0.3, 1, 0.4, 0.2})}};
  s.env = wf::EnvSpec{wf::MultiSlotSpec{{slot, slot}}};
  s.policies = {{"UCB-Greedy", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Greedy},
                {"Joint-UCB-Greedy", wf::PolicyKind::WaterfallUcb1, wf::OracleKind::Greedy, 500, true}};
  s.horizon = 500;
  s.replications = 2;
  const auto rows = wf::run(s, wf::Execution::Serial);
  const auto& r = wf::find_row(rows, "UCB-Greedy", 500);
  ASSERT_EQ(r.slot_cumulative.size(), 2u);
  EXPECT_NEAR(r.slot_cumulative[0] + r.slot_cumulative[1], r.cumulative_reward, 1e-9);
  EXPECT_EQ(csv(rows), csv(wf::run(s, wf::Execution::Parallel)));
}

TEST(Catalog, FigureSpecs) {
  EXPECT_EQ(wf::figure_ids().size(), 10u);
  const auto fig1a = wf::figure_specs({.figure = "fig1a"});
  ASSERT_EQ(fig1a.size(), 1u);
  EXPECT_EQ(fig1a[0].horizon, 100'000u);
  ASSERT_EQ(fig1a[0].policies.size(), 3u);
  for (const auto& p : fig1a[0].policies) EXPECT_EQ(p.oracle, wf::OracleKind::Greedy);
  const auto fig1b = wf::figure_specs({.figure = "fig1b", .horizon = 10});
  for (const auto& p : fig1b[0].policies) EXPECT_EQ(p.oracle, wf::OracleKind::Lp);
  EXPECT_EQ(fig1b[0].horizon, 10u);
  EXPECT_THROW(wf::figure_specs({.figure = "fig2a"}), wf::DataError);
  EXPECT_THROW(wf::figure_specs({.figure = "fig9"}), wf::ConfigError);
}

TEST(Catalog, RandomPartitionCoversNetworks) {
  const auto groups = wf::random_partition(9, {4, 4, 1}, 3);
  ASSERT_EQ(groups.size(), 3u);
  std::vector<int> seen(9, 0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(groups[i].size(), (std::vector<std::size_t>{4, 4, 1})[i]);
    for (auto a : groups[i]) ++seen[a];
  }
  for (int c : seen) EXPECT_EQ(c, 1);
  EXPECT_EQ(groups, wf::random_partition(9, {4, 4, 1}, 3));
}
