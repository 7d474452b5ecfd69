#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "waterfall/env.hpp"
#include "waterfall/model.hpp"
#include "waterfall/oracle.hpp"

namespace waterfall {

// Confidence radius sqrt(1.5 ln t / s), natural log.
double ucb_radius(double t, std::uint64_t s);

// Per-item observation counts. `time` is the index t of the next step to
// be played; it is 1 right after initialization.
class UcbState {
 public:
  UcbState() = default;
  UcbState(std::size_t networks, std::size_t prices);

  std::size_t networks() const { return networks_; }
  std::size_t prices() const { return prices_; }
  std::uint64_t time() const { return time_; }

  std::uint64_t pulls(std::size_t a, std::size_t p) const { return pulls_[a * prices_ + p]; }
  std::uint64_t acceptances(std::size_t a, std::size_t p) const { return accepts_[a * prices_ + p]; }
  // Empirical acceptance rate; 0 for items never observed.
  double mean(std::size_t a, std::size_t p) const;
  WeightTable means() const;
  std::uint64_t total_pulls() const;
  bool initialized() const;

  void record(std::size_t a, std::size_t p, bool accepted);
  void advance() { ++time_; }

 private:
  std::size_t networks_ = 0;
  std::size_t prices_ = 0;
  std::uint64_t time_ = 1;
  std::vector<std::uint64_t> pulls_;
  std::vector<std::uint64_t> accepts_;
};

// U_t(e) = min(mean(e) + c_{t-1, T(e)}, 1). While t - 1 <= 1 there is no
// usable confidence information (ln 1 = 0) and every bound is 1.
WeightTable compute_ucbs(const UcbState& state);

enum class PolicyKind { WaterfallUcb1, ExploreExploit, Offline };

struct ProbeRecord {
  std::size_t network = 0;
  std::size_t price_idx = 0;
  bool accepted = false;
};

// One online learner. select_action and update must alternate.
class Policy {
 public:
  static Policy waterfall_ucb1(Oracle oracle, PriceGrid grid, std::size_t networks);
  // Random exploration for `n0` steps, then the oracle's action on the
  // frozen empirical means. `seed` drives the exploration draws only.
  static Policy explore_exploit(Oracle oracle, PriceGrid grid, std::size_t networks, std::uint64_t n0,
                                std::uint64_t seed);
  static Policy offline(Action action, PriceGrid grid);

  PolicyKind kind() const { return kind_; }
  const UcbState& state() const { return state_; }
  const std::vector<ProbeRecord>& probe_log() const { return probes_; }
  std::uint64_t exploration_steps() const { return n0_; }

  // Offers every item once, alone. `slot` selects which slot of a
  // multi-slot environment to probe; when empty, each probe draws a slot
  // the same way arrivals do. Offline policies issue no probes.
  void initialize(Environment& env, std::optional<std::size_t> slot = std::nullopt);

  Action select_action();
  void update(const Action& action, const Feedback& feedback);

 private:
  Policy(PolicyKind kind, Oracle oracle, PriceGrid grid, std::size_t networks);

  Action random_action();

  PolicyKind kind_;
  Oracle oracle_;
  PriceGrid grid_;
  std::size_t networks_;
  UcbState state_;
  std::vector<ProbeRecord> probes_;
  bool initialized_ = false;

  std::uint64_t n0_ = 0;
  std::mt19937_64 explore_rng_;
  std::optional<Action> fixed_;
};

}  // namespace waterfall
