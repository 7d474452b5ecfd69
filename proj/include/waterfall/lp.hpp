#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "waterfall/model.hpp"

namespace waterfall {

// maximize objective . x  subject to  row . x <= rhs for every row,  x >= 0
struct LpConstraint {
  std::vector<double> coefficients;
  double rhs = 0.0;
};

struct LpProblem {
  std::vector<double> objective;
  std::vector<LpConstraint> constraints;
};

struct LpSolution {
  std::vector<double> primal;
  double objective_value = 0.0;
  std::vector<double> duals;  // one per constraint, >= 0
};

class LpError : public std::runtime_error {
 public:
  enum class Kind { Infeasible, Unbounded, IterationLimit };
  LpError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct LpTolerances {
  double pivot = 1e-10;
  double feasibility = 1e-8;
};

// Dense two-phase primal simplex with Bland's rule. Rows with negative
// right-hand side get an artificial variable and are handled in phase one.
// The reported duals come from the terminating basis.
class SimplexSolver {
 public:
  explicit SimplexSolver(LpTolerances tol = {}) : tol_(tol) {}

  LpSolution solve(const LpProblem& problem);

  std::size_t pivots() const { return pivots_; }

 private:
  bool iterate(std::vector<double>& cost_row, std::size_t allowed_columns);
  void pivot(std::size_t row, std::size_t col, std::vector<double>& cost_row);

  LpTolerances tol_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;    // structural + slack + artificial columns
  std::size_t stride_ = 0;  // cols_ + 1, the last entry holds the rhs
  std::vector<double> tableau_;
  std::vector<std::size_t> basis_;
  std::size_t pivots_ = 0;
};

inline LpSolution solve(const LpProblem& problem) { return SimplexSolver().solve(problem); }

// The relaxation behind the LP oracle. Variable x(a,p) is the probability
// that network a is offered p, y(a,p) the probability it is offered p and
// accepts:
//   max  sum p * y(a,p)
//   s.t. y(a,p) <= u(a,p) x(a,p)     for all a, p
//        sum_{a,p} y(a,p) <= 1
//        sum_p x(a,p) <= 1           for all a
struct WaterfallLp {
  LpProblem problem;
  LpSolution solution;
  double tau_star = 0.0;              // dual of the budget row sum y <= 1
  std::vector<double> network_duals;  // duals of the per-network rows

  std::size_t networks = 0;
  std::size_t prices = 0;
  std::size_t x_index(std::size_t a, std::size_t p) const { return a * prices + p; }
  std::size_t y_index(std::size_t a, std::size_t p) const { return networks * prices + a * prices + p; }
  std::size_t budget_row() const { return networks * prices; }
  std::size_t network_row(std::size_t a) const { return networks * prices + 1 + a; }
};

LpProblem build_waterfall_lp(const WeightTable& weights, const PriceGrid& grid);

WaterfallLp waterfall_lp(const WeightTable& weights, const PriceGrid& grid, LpTolerances tol = {});

}  // namespace waterfall
