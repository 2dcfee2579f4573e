#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace anonkit {

// Derives a stage-specific seed from one root seed, so a single --seed flag
// fans out into independent streams ("select", "harden", "decoys:hospA", ...).
uint64_t derive_seed(uint64_t root, std::string_view label);

// mt19937_64 wrapper whose bounded draws avoid std::uniform_int_distribution,
// which is implementation-defined and would break cross-platform replay.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next() { return engine_(); }

  // Uniform in [0, bound). bound must be positive.
  uint64_t below(uint64_t bound);

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Index drawn proportionally to the increments of a cumulative weight
  // vector (last element = total weight).
  size_t pick_cumulative(std::span<const double> cumulative);

 private:
  std::mt19937_64 engine_;
};

// n distinct indices from [0, population), returned ascending (Floyd's
// sampling, so cost scales with n rather than population).
std::vector<uint64_t> sample_indices(Rng& rng, uint64_t population, uint64_t n);

}  // namespace anonkit
