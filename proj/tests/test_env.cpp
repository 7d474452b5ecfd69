#include <cmath>

#include <gtest/gtest.h>

#include "waterfall/env.hpp"
#include "waterfall/errors.hpp"

namespace wf = waterfall;

namespace {

// Beta CDF by composite Simpson integration of the density; alpha, beta >= 1.
double simpson_beta_cdf(double x, double a, double b) {
  auto density = [&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1); };
  auto integrate = [&](double hi) {
    const int n = 20000;
    const double h = hi / n;
    double s = density(0.0) + density(hi);
    for (int i = 1; i < n; ++i) s += density(i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
  };
  return integrate(x) / integrate(1.0);
}

wf::EnvSpec table(wf::WeightTable w) { return wf::EnvSpec{wf::TableSpec{std::move(w)}}; }

void expect_frequency(std::uint64_t hits, std::uint64_t n, double p) {
  const double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
  EXPECT_NEAR(static_cast<double>(hits) / static_cast<double>(n), p, std::max(3 * se, 1e-12));
}

}  // namespace

TEST(BetaCdf, MatchesNumericalIntegration) {
  for (auto [a, b] : {std::pair{1.0, 1.0}, {5.0, 2.0}, {2.0, 5.0}})
    for (double x : {0.01, 0.1, 0.3, 0.5, 0.77, 0.99}) EXPECT_NEAR(wf::beta_cdf(x, a, b), simpson_beta_cdf(x, a, b), 1e-9);
  // Non-integer beta: the density has an infinite slope at 1 and Simpson
  // converges slowly there.
  for (double x : {0.1, 0.5, 0.99}) EXPECT_NEAR(wf::beta_cdf(x, 3.5, 1.5), simpson_beta_cdf(x, 3.5, 1.5), 1e-6);
  EXPECT_EQ(wf::beta_cdf(0.0, 2, 5), 0.0);
  EXPECT_EQ(wf::beta_cdf(1.0, 2, 5), 1.0);
}

TEST(Environment, UniformValuationTable) {
  const auto g = wf::PriceGrid::uniform(11);
  const wf::Environment env(wf::EnvSpec{wf::BetaSpec{{1.0}, {1.0}}}, g, 1);
  EXPECT_NEAR(env.true_acceptance_table()(0, 3), 0.7, 1e-12);
  EXPECT_NEAR(env.true_acceptance_table()(0, 0), 1.0, 1e-12);
}

TEST(Environment, RejectsBadSpecs) {
  const auto g = wf::PriceGrid::uniform(3);
  EXPECT_THROW(wf::Environment(wf::EnvSpec{wf::BetaSpec{{1.0}, {}}}, g, 1), wf::ContractError);
  EXPECT_THROW(wf::Environment(wf::EnvSpec{wf::BetaSpec{{0.0}, {1.0}}}, g, 1), wf::ContractError);
  EXPECT_THROW(wf::Environment(table(wf::WeightTable(2, 4, 0.5)), g, 1), wf::ContractError);
  EXPECT_THROW(wf::Environment(wf::EnvSpec{wf::AggregatedSpec{wf::WeightTable(3, 3, 0.5), {{0, 1}}}}, g, 1),
               wf::ContractError);
  EXPECT_THROW(wf::Environment(wf::EnvSpec{wf::MultiSlotSpec{}}, g, 1), wf::ContractError);
}

TEST(Environment, FreePriceAcceptedFirst) {
  const auto g = wf::PriceGrid::uniform(3);
  wf::WeightTable w(3, 3, 0.0);
  for (std::size_t a = 0; a < 3; ++a) w.set(a, 0, 1.0);
  wf::Environment env(table(w), g, 2);
  for (int t = 0; t < 100; ++t) {
    const auto out = env.run_waterfall(wf::Action({{0, 0}, {1, 0}, {2, 0}}));
    EXPECT_EQ(out.feedback, std::optional<std::size_t>(0));
    EXPECT_EQ(out.revenue, 0.0);
  }
}

TEST(Environment, PricesAboveSupportAreRejected) {
  const auto g = wf::PriceGrid::uniform(3);
  wf::Environment env(table(wf::WeightTable(2, 3, 0.0)), g, 3);
  for (int t = 0; t < 100; ++t) {
    const auto out = env.run_waterfall(wf::Action({{0, 2}, {1, 1}}));
    EXPECT_FALSE(out.feedback);
    EXPECT_EQ(out.revenue, 0.0);
  }
  EXPECT_FALSE(env.probe(0, 1));
}

TEST(Environment, AcceptanceFrequencyMatchesTable) {
  const wf::PriceGrid g({0.5});
  wf::Environment env(table(wf::WeightTable(1, 1, 0.75)), g, 4);
  std::uint64_t hits = 0;
  const std::uint64_t n = 1'000'000;
  for (std::uint64_t t = 0; t < n; ++t) hits += env.run_waterfall(wf::Action({{0, 0}})).feedback.has_value();
  EXPECT_NEAR(static_cast<double>(hits) / n, 0.75, 0.002);
}

TEST(Environment, BetaProbeFrequency) {
  const auto g = wf::PriceGrid({0.01, 0.6});
  wf::Environment env(wf::EnvSpec{wf::BetaSpec{{5.0}, {2.0}}}, g, 5);
  for (std::size_t p = 0; p < 2; ++p) {
    std::uint64_t hits = 0;
    const std::uint64_t n = 100'000;
    for (std::uint64_t i = 0; i < n; ++i) hits += env.probe(0, p);
    expect_frequency(hits, n, 1.0 - simpson_beta_cdf(g[p], 5.0, 2.0));
  }
}

TEST(Environment, NetworksAcceptIndependently) {
  const wf::PriceGrid g({1.0});
  wf::Environment env(table(wf::WeightTable(2, 1, 0.5)), g, 6);
  const wf::Action a({{0, 0}, {1, 0}});
  std::uint64_t first = 0, second = 0, none = 0, prev_first = 0, both_consecutive = 0;
  const std::uint64_t n = 400'000;
  bool last_first = false;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto out = env.run_waterfall(a);
    const bool f = out.feedback == std::optional<std::size_t>(0);
    first += f;
    second += out.feedback == std::optional<std::size_t>(1);
    none += !out.feedback;
    if (t > 0) {
      prev_first += last_first;
      both_consecutive += last_first && f;
    }
    last_first = f;
  }
  expect_frequency(first, n, 0.5);
  expect_frequency(second, n, 0.25);
  expect_frequency(none, n, 0.25);
  // Consecutive steps are independent too.
  expect_frequency(both_consecutive, prev_first, 0.5);
}

TEST(Environment, AggregatedGroupAcceptsIfAnyMemberDoes) {
  const wf::PriceGrid g({0.5});
  const wf::Environment env(wf::EnvSpec{wf::AggregatedSpec{wf::WeightTable(2, 1, 0.5), {{0, 1}}}}, g, 7);
  ASSERT_EQ(env.networks(), 1u);
  EXPECT_DOUBLE_EQ(env.true_acceptance_table()(0, 0), 0.75);
  std::uint64_t hits = 0;
  const std::uint64_t n = 200'000;
  for (std::uint64_t i = 0; i < n; ++i) hits += env.outcome_at(i, wf::Action({{0, 0}})).feedback.has_value();
  expect_frequency(hits, n, 0.75);
}

TEST(Environment, MultiSlotDrawsSlotsUniformly) {
  const wf::PriceGrid g({0.5});
  wf::MultiSlotSpec ms;
  ms.slots = {table(wf::WeightTable(1, 1, 0.0)), table(wf::WeightTable(1, 1, 1.0)), table(wf::WeightTable(1, 1, 0.5))};
  const wf::Environment env(wf::EnvSpec{ms}, g, 8);
  ASSERT_EQ(env.slots(), 3u);
  EXPECT_EQ(env.true_acceptance_table(1)(0, 0), 1.0);
  std::vector<std::uint64_t> counts(3, 0);
  const std::uint64_t n = 300'000;
  for (std::uint64_t t = 0; t < n; ++t) {
    const auto out = env.outcome_at(t, wf::Action({{0, 0}}));
    ASSERT_EQ(out.slot_id, env.slot_at(t));
    ++counts[out.slot_id];
    if (out.slot_id == 0) EXPECT_FALSE(out.feedback);
    if (out.slot_id == 1) EXPECT_TRUE(out.feedback);
  }
  for (auto c : counts) expect_frequency(c, n, 1.0 / 3);
}

TEST(Environment, OutcomesDependOnSeedAndStepOnly) {
  const auto g = wf::PriceGrid::uniform(11);
  const wf::EnvSpec spec{wf::BetaSpec{{5, 2, 2, 2}, {2, 5, 5, 5}}};
  wf::Environment a(spec, g, 11), b(spec, g, 11), c(spec, g, 12);
  const wf::Action act({{0, 6}, {1, 4}, {2, 3}, {3, 2}});
  int differ = 0;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    const auto x = a.run_waterfall(act);
    EXPECT_EQ(x.feedback, b.outcome_at(t, act).feedback);
    differ += x.feedback != c.outcome_at(t, act).feedback;
  }
  EXPECT_GT(differ, 0);
}
