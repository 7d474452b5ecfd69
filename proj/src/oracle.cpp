#include "waterfall/oracle.hpp"

#include <cmath>
#include <string>

#include "waterfall/errors.hpp"

namespace waterfall {

namespace {

constexpr double kArgmaxTie = 1e-12;
constexpr double kTauTol = 1e-9;

enum class Prefer { Higher, Lower };

// Maximizer of score(p) over grid indices; scores within kArgmaxTie of each
// other count as tied and the tie goes to the preferred end of the grid.
template <typename Score>
std::size_t argmax_price(std::size_t m, Prefer prefer, Score score, double* best_out = nullptr) {
  std::size_t best = prefer == Prefer::Higher ? m - 1 : 0;
  double best_val = score(best);
  for (std::size_t i = 1; i < m; ++i) {
    const std::size_t p = prefer == Prefer::Higher ? m - 1 - i : i;
    const double v = score(p);
    if (v > best_val + kArgmaxTie) {
      best_val = v;
      best = p;
    }
  }
  if (best_out) *best_out = best_val;
  return best;
}

}  // namespace

std::string_view to_string(OracleKind kind) { return kind == OracleKind::Greedy ? "Greedy" : "LP"; }

OracleKind parse_oracle_kind(std::string_view name) {
  if (name == "greedy" || name == "Greedy") return OracleKind::Greedy;
  if (name == "lp" || name == "LP") return OracleKind::Lp;
  throw ConfigError("unknown oracle '" + std::string(name) + "' (expected greedy or lp)");
}

Action greedy_oracle(const WeightTable& weights, const PriceGrid& grid) {
  require(weights.prices() == grid.size(), "weight table does not match the price grid");
  std::vector<std::size_t> chosen(weights.networks());
  for (std::size_t a = 0; a < weights.networks(); ++a) {
    chosen[a] = argmax_price(grid.size(), Prefer::Higher, [&](std::size_t p) { return weights(a, p) * grid[p]; });
  }
  return action_from_prices(chosen);
}

LpOracleResult lp_oracle_detailed(const WeightTable& weights, const PriceGrid& grid, LpTolerances tol) {
  require(weights.prices() == grid.size(), "weight table does not match the price grid");
  const WaterfallLp lp = waterfall_lp(weights, grid, tol);
  const double tau = lp.tau_star;
  const std::size_t tau_idx = grid.find(tau, kTauTol);

  LpOracleResult out;
  out.tau_star = tau;
  out.price_by_network.resize(weights.networks());
  for (std::size_t a = 0; a < weights.networks(); ++a) {
    double best = 0.0;
    // At tau* a network is often indifferent between two prices (a kink of
    // the dual). The cheaper one has the larger acceptance probability.
    std::size_t p = argmax_price(
        grid.size(), Prefer::Lower, [&](std::size_t q) { return weights(a, q) * (grid[q] - tau); }, &best);
    if (std::abs(best) <= kTauTol && tau_idx < grid.size()) p = tau_idx;
    out.price_by_network[a] = p;
  }
  out.action = action_from_prices(out.price_by_network);
  return out;
}

double Oracle::default_gamma() const { return kind_ == OracleKind::Lp ? 1.0 - 1.0 / std::exp(1.0) : 1.0; }

}  // namespace waterfall
