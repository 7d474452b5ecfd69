#pragma once

#include <cstdint>

namespace waterfall {

// Counter-based uniform stream. Every draw is a pure function of
// (seed, domain, step, index), so a simulation gives the same outcomes
// regardless of evaluation order or thread count.
class CounterRng {
 public:
  enum Domain : std::uint64_t {
    kValuation = 1,
    kSlot = 2,
    kProbe = 3,
    kProbeSlot = 4,
  };

  explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(Domain domain, std::uint64_t step, std::uint64_t index) const {
    std::uint64_t h = mix(seed_ ^ 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ domain);
    h = mix(h ^ step);
    return mix(h ^ (index + 0x632be59bd9b4e019ULL));
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform(Domain domain, std::uint64_t step, std::uint64_t index) const {
    return static_cast<double>(bits(domain, step, index) >> 11) * 0x1.0p-53;
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t seed_;
};

}  // namespace waterfall
