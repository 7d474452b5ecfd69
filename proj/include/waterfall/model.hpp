#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace waterfall {

// Ascending set of offered prices, all in [0, 1].
class PriceGrid {
 public:
  explicit PriceGrid(std::vector<double> prices);

  // {0, 1/(m-1), ..., 1}; m = 1 gives {1}.
  static PriceGrid uniform(std::size_t m);

  std::size_t size() const { return prices_.size(); }
  double operator[](std::size_t i) const { return prices_[i]; }
  double max() const { return prices_.back(); }
  std::span<const double> prices() const { return prices_; }

  // Index of the grid price within `tol` of `value`, or size() if none.
  std::size_t find(double value, double tol) const;

  bool operator==(const PriceGrid&) const = default;

 private:
  std::vector<double> prices_;
};

// One (ad network, price) pair. Prices are kept as grid indices.
struct Item {
  std::size_t network = 0;
  std::size_t price_idx = 0;

  bool operator==(const Item&) const = default;
};

// Order in which networks are contacted, with one offered price each.
// Always holds every network exactly once.
class Action {
 public:
  Action() = default;
  explicit Action(std::vector<Item> entries);

  std::size_t size() const { return entries_.size(); }
  const Item& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Item> entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Price index offered to each network, indexed by network.
  std::vector<std::size_t> price_by_network() const;

  bool operator==(const Action&) const = default;

 private:
  std::vector<Item> entries_;
};

// Row-major K x M table of probabilities. Used for true acceptance
// probabilities, empirical estimates and upper confidence bounds alike.
class WeightTable {
 public:
  WeightTable() = default;
  WeightTable(std::size_t networks, std::size_t prices, double fill = 0.0);
  WeightTable(std::size_t networks, std::size_t prices, std::vector<double> values);

  std::size_t networks() const { return networks_; }
  std::size_t prices() const { return prices_; }

  double operator()(std::size_t network, std::size_t price_idx) const {
    return values_[network * prices_ + price_idx];
  }
  double at(std::size_t network, std::size_t price_idx) const;
  void set(std::size_t network, std::size_t price_idx, double value);

  std::span<const double> row(std::size_t network) const {
    return {values_.data() + network * prices_, prices_};
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const WeightTable&) const = default;

 private:
  std::size_t networks_ = 0;
  std::size_t prices_ = 0;
  std::vector<double> values_;
};

// Expected publisher revenue of running `action` when network a accepts
// price p independently with probability weights(a, p).
double expected_revenue(const Action& action, const WeightTable& weights, const PriceGrid& grid);

// Stable reorder so that offered prices are non-increasing.
Action sort_descending_by_price(const Action& action);

// Builds the descending-price action from a per-network price assignment.
Action action_from_prices(std::span<const std::size_t> price_by_network);

struct Optimum {
  Action action;
  double value = 0.0;
};

inline constexpr std::uint64_t kDefaultBruteForceCap = 10'000'000;

// Number of price assignments brute_force_optimum would evaluate (M^K),
// saturating at UINT64_MAX.
std::uint64_t brute_force_evaluations(std::size_t networks, std::size_t prices);

// Exhaustive maximizer of expected_revenue. Only price assignments are
// enumerated; for fixed prices the descending-price order is optimal, so
// each assignment is evaluated once in that order. Among optima within
// 1e-12 the lexicographically highest per-network price vector wins.
// Throws ContractError when M^K exceeds `cap`.
Optimum brute_force_optimum(const WeightTable& weights, const PriceGrid& grid,
                            std::uint64_t cap = kDefaultBruteForceCap);

}  // namespace waterfall
