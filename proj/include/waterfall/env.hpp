#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "waterfall/model.hpp"
#include "waterfall/rng.hpp"

namespace waterfall {

// Zero-based position of the first network that accepted; empty when every
// contacted network rejected.
using Feedback = std::optional<std::size_t>;

struct StepOutcome {
  Feedback feedback;
  double revenue = 0.0;
  std::size_t slot_id = 0;
};

// Independent Beta(alpha[a], beta[a]) valuations.
struct BetaSpec {
  std::vector<double> alpha;
  std::vector<double> beta;
};

// Network a accepts price p with probability table(a, p).
struct TableSpec {
  WeightTable table;
};

// Networks of `base` are partitioned into groups; a group accepts when at
// least one member accepts on an independent draw.
struct AggregatedSpec {
  WeightTable base;
  std::vector<std::vector<std::size_t>> groups;
};

struct EnvSpec;

// Each step a slot is drawn uniformly; the policy is told which one.
struct MultiSlotSpec {
  std::vector<EnvSpec> slots;
};

struct EnvSpec {
  std::variant<BetaSpec, TableSpec, MultiSlotSpec, AggregatedSpec> kind;
};

// Regularized incomplete beta I_x(alpha, beta), the Beta CDF.
double beta_cdf(double x, double alpha, double beta);

class Environment {
 public:
  Environment(const EnvSpec& spec, PriceGrid grid, std::uint64_t seed);

  std::size_t networks() const { return networks_; }
  std::size_t slots() const { return slots_.size(); }
  const PriceGrid& grid() const { return grid_; }
  std::uint64_t seed() const { return rng_.seed(); }

  // Acceptance probability of every (network, price) in a slot.
  const WeightTable& true_acceptance_table(std::size_t slot = 0) const;

  // Pure per-step kernels: outcomes are a function of (seed, step) only.
  std::size_t slot_at(std::uint64_t step) const;
  StepOutcome outcome_at(std::uint64_t step, const Action& action) const;
  // Slot a probe is routed to when the caller does not pin one.
  std::size_t probe_slot_at(std::uint64_t probe_index) const;
  bool probe_at(std::uint64_t probe_index, std::size_t network, std::size_t price_idx,
                std::size_t slot) const;

  // Stateful interface: step counter and probe counter advance per call.
  std::uint64_t step() const { return step_; }
  std::size_t next_slot() const { return slot_at(step_); }
  StepOutcome run_waterfall(const Action& action) { return outcome_at(step_++, action); }
  bool probe(std::size_t network, std::size_t price_idx, std::size_t slot = 0) {
    return probe_at(probes_++, network, price_idx, slot);
  }
  std::uint64_t probes_issued() const { return probes_; }

 private:
  struct Slot {
    WeightTable member_weights;                  // per underlying network
    std::vector<std::vector<std::size_t>> groups;  // visible network -> members
    WeightTable truth;                           // per visible network
  };

  static Slot make_slot(const EnvSpec& spec, const PriceGrid& grid);
  bool accepts(const Slot& slot, CounterRng::Domain domain, std::uint64_t counter, std::size_t network,
               std::size_t price_idx) const;

  PriceGrid grid_;
  CounterRng rng_;
  std::size_t networks_ = 0;
  std::vector<Slot> slots_;
  std::uint64_t step_ = 0;
  std::uint64_t probes_ = 0;
};

}  // namespace waterfall
