#include "waterfall/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "waterfall/errors.hpp"

namespace waterfall {

PriceGrid::PriceGrid(std::vector<double> prices) : prices_(std::move(prices)) {
  require(!prices_.empty(), "price grid must hold at least one price");
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    require(prices_[i] >= 0.0 && prices_[i] <= 1.0, "grid prices must lie in [0, 1]");
    if (i > 0) require(prices_[i] > prices_[i - 1], "grid prices must be strictly increasing");
  }
}

PriceGrid PriceGrid::uniform(std::size_t m) {
  require(m >= 1, "uniform grid needs at least one price");
  if (m == 1) return PriceGrid({1.0});
  std::vector<double> p(m);
  for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<double>(i) / static_cast<double>(m - 1);
  return PriceGrid(std::move(p));
}

std::size_t PriceGrid::find(double value, double tol) const {
  for (std::size_t i = 0; i < prices_.size(); ++i) {
    if (std::abs(prices_[i] - value) <= tol) return i;
  }
  return prices_.size();
}

Action::Action(std::vector<Item> entries) : entries_(std::move(entries)) {
  std::vector<bool> seen(entries_.size(), false);
  for (const Item& e : entries_) {
    require(e.network < entries_.size(), "action network index out of range");
    require(!seen[e.network], "action must contact every network exactly once");
    seen[e.network] = true;
  }
}

std::vector<std::size_t> Action::price_by_network() const {
  std::vector<std::size_t> out(entries_.size());
  for (const Item& e : entries_) out[e.network] = e.price_idx;
  return out;
}

WeightTable::WeightTable(std::size_t networks, std::size_t prices, double fill)
    : WeightTable(networks, prices, std::vector<double>(networks * prices, fill)) {}

WeightTable::WeightTable(std::size_t networks, std::size_t prices, std::vector<double> values)
    : networks_(networks), prices_(prices), values_(std::move(values)) {
  require(values_.size() == networks * prices, "weight table size does not match K x M");
  for (double v : values_) require(v >= 0.0 && v <= 1.0, "weights must lie in [0, 1]");
}

double WeightTable::at(std::size_t network, std::size_t price_idx) const {
  require(network < networks_ && price_idx < prices_, "weight table index out of range");
  return (*this)(network, price_idx);
}

void WeightTable::set(std::size_t network, std::size_t price_idx, double value) {
  require(network < networks_ && price_idx < prices_, "weight table index out of range");
  require(value >= 0.0 && value <= 1.0, "weights must lie in [0, 1]");
  values_[network * prices_ + price_idx] = value;
}

double expected_revenue(const Action& action, const WeightTable& weights, const PriceGrid& grid) {
  require(action.size() == weights.networks(), "action size does not match the number of networks");
  require(weights.prices() == grid.size(), "weight table does not match the price grid");
  double reach = 1.0;
  double revenue = 0.0;
  for (const Item& e : action) {
    require(e.price_idx < grid.size(), "price index out of range");
    const double u = weights(e.network, e.price_idx);
    revenue += reach * u * grid[e.price_idx];
    reach *= 1.0 - u;
  }
  return revenue;
}

Action sort_descending_by_price(const Action& action) {
  std::vector<Item> entries(action.begin(), action.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Item& a, const Item& b) { return a.price_idx > b.price_idx; });
  return Action(std::move(entries));
}

Action action_from_prices(std::span<const std::size_t> price_by_network) {
  std::vector<Item> entries(price_by_network.size());
  for (std::size_t a = 0; a < entries.size(); ++a) entries[a] = {a, price_by_network[a]};
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Item& a, const Item& b) { return a.price_idx > b.price_idx; });
  return Action(std::move(entries));
}

std::uint64_t brute_force_evaluations(std::size_t networks, std::size_t prices) {
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < networks; ++k) {
    if (total > std::numeric_limits<std::uint64_t>::max() / prices) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= prices;
  }
  return total;
}

Optimum brute_force_optimum(const WeightTable& weights, const PriceGrid& grid, std::uint64_t cap) {
  require(weights.prices() == grid.size(), "weight table does not match the price grid");
  const std::size_t k = weights.networks();
  const std::size_t m = grid.size();
  const std::uint64_t evals = brute_force_evaluations(k, m);
  if (evals > cap) {
    throw ContractError("instance too large for brute force: M^K = " +
                        (evals == std::numeric_limits<std::uint64_t>::max() ? std::string("overflow")
                                                                             : std::to_string(evals)) +
                        " exceeds the cap of " + std::to_string(cap) + " evaluations");
  }
  constexpr double kTieTol = 1e-12;

  // Odometer over per-network price indices in lexicographic order, so a
  // later near-tie is always lexicographically higher.
  std::vector<std::size_t> prices(k, 0);
  Optimum best;
  double best_seen = -1.0;
  for (;;) {
    Action candidate = action_from_prices(prices);
    const double value = expected_revenue(candidate, weights, grid);
    if (value >= best_seen - kTieTol) {
      best.action = std::move(candidate);
      best.value = value;
      best_seen = std::max(best_seen, value);
    }
    std::size_t pos = k;
    while (pos > 0) {
      --pos;
      if (++prices[pos] < m) break;
      prices[pos] = 0;
      if (pos == 0) return best;
    }
    if (k == 0) return best;
  }
}

}  // namespace waterfall
