#include "waterfall/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "waterfall/errors.hpp"

namespace waterfall {

double ucb_radius(double t, std::uint64_t s) {
  require(t >= 1.0, "ucb radius needs t >= 1");
  require(s >= 1, "ucb radius needs at least one observation");
  return std::sqrt(1.5 * std::log(t) / static_cast<double>(s));
}

UcbState::UcbState(std::size_t networks, std::size_t prices)
    : networks_(networks), prices_(prices), pulls_(networks * prices, 0), accepts_(networks * prices, 0) {}

double UcbState::mean(std::size_t a, std::size_t p) const {
  const std::uint64_t n = pulls(a, p);
  return n == 0 ? 0.0 : static_cast<double>(acceptances(a, p)) / static_cast<double>(n);
}

WeightTable UcbState::means() const {
  WeightTable w(networks_, prices_);
  for (std::size_t a = 0; a < networks_; ++a)
    for (std::size_t p = 0; p < prices_; ++p) w.set(a, p, mean(a, p));
  return w;
}

std::uint64_t UcbState::total_pulls() const { return std::accumulate(pulls_.begin(), pulls_.end(), std::uint64_t{0}); }

bool UcbState::initialized() const {
  return !pulls_.empty() && std::all_of(pulls_.begin(), pulls_.end(), [](std::uint64_t n) { return n >= 1; });
}

void UcbState::record(std::size_t a, std::size_t p, bool accepted) {
  require(a < networks_ && p < prices_, "item out of range");
  ++pulls_[a * prices_ + p];
  if (accepted) ++accepts_[a * prices_ + p];
}

WeightTable compute_ucbs(const UcbState& state) {
  require(state.initialized(), "UCBs need every item observed at least once");
  const std::size_t k = state.networks();
  const std::size_t m = state.prices();
  if (state.time() <= 2) return WeightTable(k, m, 1.0);
  const auto t = static_cast<double>(state.time() - 1);
  std::vector<double> u(k * m);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t p = 0; p < m; ++p) {
      u[a * m + p] = std::min(state.mean(a, p) + ucb_radius(t, state.pulls(a, p)), 1.0);
    }
  }
  return WeightTable(k, m, std::move(u));
}

Policy::Policy(PolicyKind kind, Oracle oracle, PriceGrid grid, std::size_t networks)
    : kind_(kind), oracle_(oracle), grid_(std::move(grid)), networks_(networks), state_(networks, grid_.size()) {}

Policy Policy::waterfall_ucb1(Oracle oracle, PriceGrid grid, std::size_t networks) {
  return Policy(PolicyKind::WaterfallUcb1, oracle, std::move(grid), networks);
}

Policy Policy::explore_exploit(Oracle oracle, PriceGrid grid, std::size_t networks, std::uint64_t n0,
                               std::uint64_t seed) {
  Policy p(PolicyKind::ExploreExploit, oracle, std::move(grid), networks);
  p.n0_ = n0;
  p.explore_rng_.seed(seed);
  return p;
}

Policy Policy::offline(Action action, PriceGrid grid) {
  const std::size_t k = action.size();
  require(k >= 1, "offline policy needs a non-empty action");
  for (const Item& e : action) require(e.price_idx < grid.size(), "offline action price out of range");
  Policy p(PolicyKind::Offline, Oracle(OracleKind::Greedy), std::move(grid), k);
  p.fixed_ = std::move(action);
  p.initialized_ = true;
  return p;
}

void Policy::initialize(Environment& env, std::optional<std::size_t> slot) {
  require(!initialized_ || kind_ == PolicyKind::Offline, "policy already initialized");
  if (kind_ == PolicyKind::Offline) return;
  require(env.networks() == networks_ && env.grid() == grid_, "environment does not match the policy");
  for (std::size_t a = 0; a < networks_; ++a) {
    for (std::size_t p = 0; p < grid_.size(); ++p) {
      const std::size_t s = slot ? *slot : env.probe_slot_at(env.probes_issued());
      const bool accepted = env.probe(a, p, s);
      state_.record(a, p, accepted);
      probes_.push_back({a, p, accepted});
    }
  }
  initialized_ = true;
}

Action Policy::random_action() {
  std::vector<std::size_t> order(networks_);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), explore_rng_);
  std::uniform_int_distribution<std::size_t> price(0, grid_.size() - 1);
  std::vector<Item> entries(networks_);
  for (std::size_t i = 0; i < networks_; ++i) entries[i] = {order[i], price(explore_rng_)};
  return Action(std::move(entries));
}

Action Policy::select_action() {
  require(initialized_, "policy must be initialized before acting");
  switch (kind_) {
    case PolicyKind::Offline:
      return *fixed_;
    case PolicyKind::WaterfallUcb1:
      return oracle_(compute_ucbs(state_), grid_);
    case PolicyKind::ExploreExploit:
      if (state_.time() <= n0_) return random_action();
      if (!fixed_) fixed_ = oracle_(state_.means(), grid_);
      return *fixed_;
  }
  return {};
}

void Policy::update(const Action& action, const Feedback& feedback) {
  require(action.size() == networks_, "action size does not match the policy");
  require(!feedback || *feedback < networks_, "feedback position out of range");
  if (kind_ == PolicyKind::Offline) return;
  // After the exploit action is frozen further observations are not used.
  if (!(kind_ == PolicyKind::ExploreExploit && fixed_)) {
    const std::size_t observed = feedback ? *feedback + 1 : networks_;
    for (std::size_t i = 0; i < observed; ++i) {
      state_.record(action[i].network, action[i].price_idx, feedback && *feedback == i);
    }
  }
  state_.advance();
}

}  // namespace waterfall
