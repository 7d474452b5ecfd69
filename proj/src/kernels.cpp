#include "waterfall/kernels.hpp"

#include <cmath>
#include <vector>

#include <omp.h>

namespace waterfall {

namespace {

RevenueEstimate finish(const Environment& env, const std::vector<std::uint64_t>& sold, std::uint64_t runs) {
  RevenueEstimate est;
  est.runs = runs;
  if (runs == 0) return est;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t p = 0; p < sold.size(); ++p) {
    const double price = env.grid()[p];
    sum += static_cast<double>(sold[p]) * price;
    sum_sq += static_cast<double>(sold[p]) * price * price;
  }
  const double n = static_cast<double>(runs);
  est.mean = sum / n;
  if (runs > 1) {
    const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

}  // namespace

RevenueEstimate simulate_revenue_serial(const Environment& env, const Action& action, std::uint64_t runs,
                                        std::uint64_t first_step) {
  std::vector<std::uint64_t> sold(env.grid().size(), 0);
  for (std::uint64_t s = 0; s < runs; ++s) {
    const StepOutcome out = env.outcome_at(first_step + s, action);
    if (out.feedback) ++sold[action[*out.feedback].price_idx];
  }
  return finish(env, sold, runs);
}

RevenueEstimate simulate_revenue_parallel(const Environment& env, const Action& action, std::uint64_t runs,
                                          std::uint64_t first_step) {
  const std::size_t m = env.grid().size();
  std::vector<std::uint64_t> sold(m, 0);
#pragma omp parallel
  {
    std::vector<std::uint64_t> local(m, 0);
#pragma omp for schedule(static)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(runs); ++s) {
      const StepOutcome out = env.outcome_at(first_step + static_cast<std::uint64_t>(s), action);
      if (out.feedback) ++local[action[*out.feedback].price_idx];
    }
#pragma omp critical
    for (std::size_t p = 0; p < m; ++p) sold[p] += local[p];
  }
  return finish(env, sold, runs);
}

}  // namespace waterfall
