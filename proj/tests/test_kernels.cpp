#include <gtest/gtest.h>

#include "waterfall/kernels.hpp"

namespace wf = waterfall;

TEST(Kernels, SerialAndParallelAreBitIdentical) {
  const auto g = wf::PriceGrid::uniform(11);
  const wf::Environment env(wf::EnvSpec{wf::BetaSpec{{5, 2, 2, 2}, {2, 5, 5, 5}}}, g, 3);
  const wf::Action a({{0, 7}, {1, 4}, {2, 3}, {3, 3}});
  for (std::uint64_t runs : {1ull, 17ull, 100'000ull}) {
    const auto s = wf::simulate_revenue_serial(env, a, runs, 5);
    const auto p = wf::simulate_revenue_parallel(env, a, runs, 5);
    EXPECT_EQ(s.mean, p.mean);
    EXPECT_EQ(s.std_error, p.std_error);
    EXPECT_EQ(s.runs, runs);
  }
}

TEST(Kernels, EstimateAgreesWithExpectedRevenue) {
  const auto g = wf::PriceGrid::uniform(11);
  const wf::Environment env(wf::EnvSpec{wf::BetaSpec{{5, 2, 2, 2}, {2, 5, 5, 5}}}, g, 4);
  const wf::Action a({{0, 7}, {1, 4}, {2, 3}, {3, 3}});
  const auto est = wf::simulate_revenue_parallel(env, a, 1'000'000);
  EXPECT_NEAR(est.mean, wf::expected_revenue(a, env.true_acceptance_table(), g), 3 * est.std_error);
}

TEST(Kernels, ZeroRuns) {
  const wf::Environment env(wf::EnvSpec{wf::TableSpec{wf::WeightTable(1, 1, 0.5)}}, wf::PriceGrid({1.0}), 1);
  EXPECT_EQ(wf::simulate_revenue_serial(env, wf::Action({{0, 0}}), 0).runs, 0u);
}
