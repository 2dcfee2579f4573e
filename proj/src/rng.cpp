#include "anonkit/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace anonkit {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

uint64_t derive_seed(uint64_t root, std::string_view label) {
  return splitmix64(splitmix64(root) ^ fnv1a(label));
}

uint64_t Rng::below(uint64_t bound) {
  if (bound == 0) throw std::logic_error("Rng::below called with bound 0");
  // Rejection sampling for an unbiased result.
  const uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

size_t Rng::pick_cumulative(std::span<const double> cumulative) {
  if (cumulative.empty()) throw std::logic_error("empty cumulative weights");
  const double total = cumulative.back();
  const double u = unit() * total;
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) --it;
  return static_cast<size_t>(it - cumulative.begin());
}

std::vector<uint64_t> sample_indices(Rng& rng, uint64_t population, uint64_t n) {
  if (n > population) throw std::logic_error("sample larger than population");
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(static_cast<size_t>(n) * 2);
  for (uint64_t j = population - n; j < population; ++j) {
    uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace anonkit
