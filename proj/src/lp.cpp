#include "waterfall/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "waterfall/errors.hpp"

namespace waterfall {

namespace {
constexpr double kRatioTie = 1e-12;
}  // namespace

LpSolution SimplexSolver::solve(const LpProblem& problem) {
  const std::size_t n = problem.objective.size();
  const std::size_t m = problem.constraints.size();
  for (const auto& c : problem.constraints) {
    require(c.coefficients.size() == n, "constraint width does not match the objective");
    require(std::isfinite(c.rhs), "constraint rhs must be finite");
  }

  std::vector<bool> flipped(m, false);
  std::size_t artificials = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (problem.constraints[i].rhs < 0.0) {
      flipped[i] = true;
      ++artificials;
    }
  }

  rows_ = m;
  cols_ = n + m + artificials;
  stride_ = cols_ + 1;
  tableau_.assign(rows_ * stride_, 0.0);
  basis_.assign(rows_, 0);
  pivots_ = 0;

  // Column that held e_i in the starting basis; its final contents are B^-1 e_i.
  std::vector<std::size_t> unit_col(m);
  std::size_t next_art = n + m;
  for (std::size_t i = 0; i < m; ++i) {
    double* row = &tableau_[i * stride_];
    const auto& c = problem.constraints[i];
    const double sign = flipped[i] ? -1.0 : 1.0;
    for (std::size_t j = 0; j < n; ++j) row[j] = sign * c.coefficients[j];
    row[n + i] = sign;
    row[cols_] = sign * c.rhs;
    if (flipped[i]) {
      row[next_art] = 1.0;
      unit_col[i] = next_art;
      basis_[i] = next_art++;
    } else {
      unit_col[i] = n + i;
      basis_[i] = n + i;
    }
  }

  // Cost rows hold reduced costs d_j = c_j - c_B B^-1 A_j; the last entry
  // holds minus the current objective value.
  std::vector<double> cost(stride_, 0.0);
  if (artificials > 0) {
    for (std::size_t j = n + m; j < cols_; ++j) cost[j] = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!flipped[i]) continue;
      const double* row = &tableau_[i * stride_];
      for (std::size_t j = 0; j < stride_; ++j) cost[j] += row[j];
    }
    for (std::size_t j = n + m; j < cols_; ++j) cost[j] = 0.0;
    if (!iterate(cost, cols_)) throw LpError(LpError::Kind::Unbounded, "phase one unbounded");
    if (-cost[cols_] < -tol_.feasibility) throw LpError(LpError::Kind::Infeasible, "problem is infeasible");
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (basis_[i] < n + m) continue;
      const double* row = &tableau_[i * stride_];
      for (std::size_t j = 0; j < n + m; ++j) {
        if (std::abs(row[j]) > tol_.pivot) {
          pivot(i, j, cost);
          break;
        }
      }
    }
  }

  // Phase two: real objective, artificials barred from entering.
  std::fill(cost.begin(), cost.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) cost[j] = problem.objective[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = basis_[i];
    const double cb = b < n ? problem.objective[b] : 0.0;
    if (cb == 0.0) continue;
    const double* row = &tableau_[i * stride_];
    for (std::size_t j = 0; j < stride_; ++j) cost[j] -= cb * row[j];
  }
  if (!iterate(cost, n + m)) throw LpError(LpError::Kind::Unbounded, "problem is unbounded");

  LpSolution sol;
  sol.primal.assign(n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (basis_[i] < n) sol.primal[basis_[i]] = tableau_[i * stride_ + cols_];
  }
  sol.objective_value = 0.0;
  for (std::size_t j = 0; j < n; ++j) sol.objective_value += problem.objective[j] * sol.primal[j];
  sol.duals.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    // d_j for a starting-basis column with zero cost is -(c_B B^-1)_i.
    const double y = -cost[unit_col[i]];
    sol.duals[i] = flipped[i] ? -y : y;
  }
  return sol;
}

bool SimplexSolver::iterate(std::vector<double>& cost, std::size_t allowed_columns) {
  const std::size_t limit = 50 * (rows_ + cols_) + 1000;
  for (std::size_t it = 0; it < limit; ++it) {
    // Bland: lowest-index improving column.
    std::size_t enter = allowed_columns;
    for (std::size_t j = 0; j < allowed_columns; ++j) {
      if (cost[j] > tol_.pivot) {
        enter = j;
        break;
      }
    }
    if (enter == allowed_columns) return true;

    std::size_t leave = rows_;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows_; ++i) {
      const double a = tableau_[i * stride_ + enter];
      if (a <= tol_.pivot) continue;
      const double ratio = tableau_[i * stride_ + cols_] / a;
      if (leave == rows_ || ratio < best_ratio - kRatioTie) {
        leave = i;
        best_ratio = ratio;
      } else if (ratio <= best_ratio + kRatioTie && basis_[i] < basis_[leave]) {
        leave = i;
        best_ratio = std::min(best_ratio, ratio);
      }
    }
    if (leave == rows_) return false;
    pivot(leave, enter, cost);
  }
  throw LpError(LpError::Kind::IterationLimit, "simplex iteration limit reached");
}

void SimplexSolver::pivot(std::size_t prow, std::size_t pcol, std::vector<double>& cost) {
  ++pivots_;
  double* pr = &tableau_[prow * stride_];
  const double inv = 1.0 / pr[pcol];
  for (std::size_t j = 0; j < stride_; ++j) pr[j] *= inv;
  pr[pcol] = 1.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    if (i == prow) continue;
    double* r = &tableau_[i * stride_];
    const double f = r[pcol];
    if (f == 0.0) continue;
    for (std::size_t j = 0; j < stride_; ++j) r[j] -= f * pr[j];
    r[pcol] = 0.0;
    if (r[cols_] < 0.0 && r[cols_] > -tol_.feasibility) r[cols_] = 0.0;
  }
  const double f = cost[pcol];
  if (f != 0.0) {
    for (std::size_t j = 0; j < stride_; ++j) cost[j] -= f * pr[j];
    cost[pcol] = 0.0;
  }
  basis_[prow] = pcol;
}

LpProblem build_waterfall_lp(const WeightTable& weights, const PriceGrid& grid) {
  require(weights.prices() == grid.size(), "weight table does not match the price grid");
  const std::size_t k = weights.networks();
  const std::size_t m = grid.size();
  const std::size_t km = k * m;
  LpProblem lp;
  lp.objective.assign(2 * km, 0.0);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t p = 0; p < m; ++p) lp.objective[km + a * m + p] = grid[p];
  }
  lp.constraints.reserve(km + 1 + k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t p = 0; p < m; ++p) {
      LpConstraint c{std::vector<double>(2 * km, 0.0), 0.0};
      c.coefficients[km + a * m + p] = 1.0;
      c.coefficients[a * m + p] = -weights(a, p);
      lp.constraints.push_back(std::move(c));
    }
  }
  LpConstraint budget{std::vector<double>(2 * km, 0.0), 1.0};
  std::fill(budget.coefficients.begin() + static_cast<std::ptrdiff_t>(km), budget.coefficients.end(), 1.0);
  lp.constraints.push_back(std::move(budget));
  for (std::size_t a = 0; a < k; ++a) {
    LpConstraint c{std::vector<double>(2 * km, 0.0), 1.0};
    for (std::size_t p = 0; p < m; ++p) c.coefficients[a * m + p] = 1.0;
    lp.constraints.push_back(std::move(c));
  }
  return lp;
}

WaterfallLp waterfall_lp(const WeightTable& weights, const PriceGrid& grid, LpTolerances tol) {
  WaterfallLp out;
  out.networks = weights.networks();
  out.prices = grid.size();
  out.problem = build_waterfall_lp(weights, grid);
  out.solution = SimplexSolver(tol).solve(out.problem);
  out.tau_star = std::max(0.0, out.solution.duals[out.budget_row()]);
  out.network_duals.resize(out.networks);
  for (std::size_t a = 0; a < out.networks; ++a) out.network_duals[a] = out.solution.duals[out.network_row(a)];
  return out;
}

}  // namespace waterfall
