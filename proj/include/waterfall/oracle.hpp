#pragma once

#include <string_view>

#include "waterfall/lp.hpp"
#include "waterfall/model.hpp"

namespace waterfall {

enum class OracleKind { Greedy, Lp };

std::string_view to_string(OracleKind kind);
OracleKind parse_oracle_kind(std::string_view name);

// Per network, the price maximizing u(a,p) * p (ties to the higher price);
// networks then contacted in descending price order. No approximation
// guarantee.
Action greedy_oracle(const WeightTable& weights, const PriceGrid& grid);

struct LpOracleResult {
  Action action;
  double tau_star = 0.0;
  std::vector<std::size_t> price_by_network;
};

// (1 - 1/e)-approximation. Solves the waterfall LP for the budget dual
// tau*, then offers each network argmax_p u(a,p) * (p - tau*), ties to the
// lower price. When that maximum is zero and tau* is itself a grid price,
// tau* is offered.
LpOracleResult lp_oracle_detailed(const WeightTable& weights, const PriceGrid& grid,
                                  LpTolerances tol = {});

inline Action lp_oracle(const WeightTable& weights, const PriceGrid& grid, LpTolerances tol = {}) {
  return lp_oracle_detailed(weights, grid, tol).action;
}

class Oracle {
 public:
  explicit Oracle(OracleKind kind, LpTolerances tol = {}) : kind_(kind), tol_(tol) {}

  OracleKind kind() const { return kind_; }

  Action operator()(const WeightTable& weights, const PriceGrid& grid) const {
    return kind_ == OracleKind::Greedy ? greedy_oracle(weights, grid) : lp_oracle(weights, grid, tol_);
  }

  // Scale factor used when reporting regret against this oracle. Greedy
  // carries no guarantee, so 1 is used for it.
  double default_gamma() const;

 private:
  OracleKind kind_;
  LpTolerances tol_;
};

}  // namespace waterfall
