#include "waterfall/env.hpp"

#include <boost/math/special_functions/beta.hpp>

#include "waterfall/errors.hpp"

namespace waterfall {

double beta_cdf(double x, double alpha, double beta) {
  require(alpha > 0.0 && beta > 0.0, "beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(alpha, beta, x);
}

Environment::Slot Environment::make_slot(const EnvSpec& spec, const PriceGrid& grid) {
  Slot s;
  const std::size_t m = grid.size();
  auto singletons = [](std::size_t k) {
    std::vector<std::vector<std::size_t>> g(k);
    for (std::size_t a = 0; a < k; ++a) g[a] = {a};
    return g;
  };

  if (const auto* b = std::get_if<BetaSpec>(&spec.kind)) {
    require(!b->alpha.empty() && b->alpha.size() == b->beta.size(), "beta spec needs one (alpha, beta) per network");
    const std::size_t k = b->alpha.size();
    s.member_weights = WeightTable(k, m);
    for (std::size_t a = 0; a < k; ++a) {
      require(b->alpha[a] > 0.0 && b->beta[a] > 0.0, "beta parameters must be positive");
      // P(p <= v) = 1 - F(p); the valuation draw is v = F^-1(1 - u).
      for (std::size_t p = 0; p < m; ++p) s.member_weights.set(a, p, 1.0 - beta_cdf(grid[p], b->alpha[a], b->beta[a]));
    }
    s.groups = singletons(k);
  } else if (const auto* t = std::get_if<TableSpec>(&spec.kind)) {
    require(t->table.prices() == m, "acceptance table does not match the price grid");
    require(t->table.networks() >= 1, "acceptance table needs at least one network");
    s.member_weights = t->table;
    s.groups = singletons(t->table.networks());
  } else if (const auto* g = std::get_if<AggregatedSpec>(&spec.kind)) {
    require(g->base.prices() == m, "acceptance table does not match the price grid");
    require(!g->groups.empty(), "aggregation needs at least one group");
    std::vector<bool> covered(g->base.networks(), false);
    for (const auto& group : g->groups) {
      require(!group.empty(), "aggregation groups must be non-empty");
      for (std::size_t a : group) {
        require(a < covered.size(), "aggregation group names an unknown network");
        require(!covered[a], "aggregation groups must be disjoint");
        covered[a] = true;
      }
    }
    for (bool c : covered) require(c, "aggregation groups must cover every network");
    s.member_weights = g->base;
    s.groups = g->groups;
  } else {
    throw ContractError("multi-slot environments cannot be nested");
  }

  s.truth = WeightTable(s.groups.size(), m);
  for (std::size_t a = 0; a < s.groups.size(); ++a) {
    for (std::size_t p = 0; p < m; ++p) {
      double reject = 1.0;
      for (std::size_t member : s.groups[a]) reject *= 1.0 - s.member_weights(member, p);
      s.truth.set(a, p, s.groups[a].size() == 1 ? s.member_weights(s.groups[a][0], p) : 1.0 - reject);
    }
  }
  return s;
}

Environment::Environment(const EnvSpec& spec, PriceGrid grid, std::uint64_t seed)
    : grid_(std::move(grid)), rng_(seed) {
  if (const auto* ms = std::get_if<MultiSlotSpec>(&spec.kind)) {
    require(!ms->slots.empty(), "multi-slot environment needs at least one slot");
    for (const EnvSpec& s : ms->slots) slots_.push_back(make_slot(s, grid_));
  } else {
    slots_.push_back(make_slot(spec, grid_));
  }
  networks_ = slots_.front().groups.size();
  for (const Slot& s : slots_) require(s.groups.size() == networks_, "all slots must have the same number of networks");
}

const WeightTable& Environment::true_acceptance_table(std::size_t slot) const {
  require(slot < slots_.size(), "slot index out of range");
  return slots_[slot].truth;
}

std::size_t Environment::slot_at(std::uint64_t step) const {
  if (slots_.size() == 1) return 0;
  const double u = rng_.uniform(CounterRng::kSlot, step, 0);
  return std::min(slots_.size() - 1, static_cast<std::size_t>(u * static_cast<double>(slots_.size())));
}

std::size_t Environment::probe_slot_at(std::uint64_t probe_index) const {
  if (slots_.size() == 1) return 0;
  const double u = rng_.uniform(CounterRng::kProbeSlot, probe_index, 0);
  return std::min(slots_.size() - 1, static_cast<std::size_t>(u * static_cast<double>(slots_.size())));
}

bool Environment::accepts(const Slot& slot, CounterRng::Domain domain, std::uint64_t counter,
                          std::size_t network, std::size_t price_idx) const {
  for (std::size_t member : slot.groups[network]) {
    if (rng_.uniform(domain, counter, member) < slot.member_weights(member, price_idx)) return true;
  }
  return false;
}

StepOutcome Environment::outcome_at(std::uint64_t step, const Action& action) const {
  require(action.size() == networks_, "action size does not match the environment");
  StepOutcome out;
  out.slot_id = slot_at(step);
  const Slot& slot = slots_[out.slot_id];
  for (std::size_t i = 0; i < action.size(); ++i) {
    const Item& e = action[i];
    require(e.price_idx < grid_.size(), "price index out of range");
    if (accepts(slot, CounterRng::kValuation, step, e.network, e.price_idx)) {
      out.feedback = i;
      out.revenue = grid_[e.price_idx];
      return out;
    }
  }
  return out;
}

bool Environment::probe_at(std::uint64_t probe_index, std::size_t network, std::size_t price_idx,
                           std::size_t slot) const {
  require(slot < slots_.size(), "slot index out of range");
  require(network < networks_ && price_idx < grid_.size(), "probe target out of range");
  return accepts(slots_[slot], CounterRng::kProbe, probe_index, network, price_idx);
}

}  // namespace waterfall
