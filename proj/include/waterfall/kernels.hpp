#pragma once

#include <cstdint>

#include "waterfall/env.hpp"
#include "waterfall/model.hpp"

namespace waterfall {

struct RevenueEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t runs = 0;
};

// Monte-Carlo mean revenue of repeatedly running `action` on steps
// [first_step, first_step + runs) of `env`. Acceptances are tallied per
// price index, so both variants produce bit-identical results.
RevenueEstimate simulate_revenue_serial(const Environment& env, const Action& action, std::uint64_t runs,
                                        std::uint64_t first_step = 0);
RevenueEstimate simulate_revenue_parallel(const Environment& env, const Action& action, std::uint64_t runs,
                                          std::uint64_t first_step = 0);

}  // namespace waterfall
