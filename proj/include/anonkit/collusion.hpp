#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "anonkit/anonymizer.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/kernels.hpp"

namespace anonkit {

// Attacker-side tooling: everything here uses only what recipients hold
// (their tables plus the public hierarchies), never the registry.

struct ReleaseClasses {
  std::string id;
  std::vector<EquivalenceClass> classes;  // members are row indexes here
};

// Groups a release's rows by their quasi tuple.
ReleaseClasses classes_of_release(const std::string& id, const Dataset& table,
                                  const BoundHierarchies& bound);

// A class is suspect when peers lack a same-origin counterpart: AnyPeer
// flags it if at least one peer has none, AllPeers only if no peer has one.
enum class SuspectMode { AnyPeer, AllPeers };

std::vector<std::vector<std::vector<std::string>>> collude(
    std::span<const ReleaseClasses> releases, const BoundHierarchies& bound,
    SuspectMode mode = SuspectMode::AnyPeer, bool strict = false,
    Exec exec = Exec::Parallel);

// Census of classes whose size is within 10% above k — the band where
// minimum-size decoy classes would sit.
size_t close_to_k_upper(int k);
size_t close_to_k_census(std::span<const size_t> sizes, int k);
std::map<size_t, size_t> size_histogram(std::span<const size_t> sizes);

// Flags classes whose linkage risk (1 / population links) exceeds
// threshold * median risk across the release.
std::vector<std::vector<std::string>> risk_outlier_screen(
    const ReleaseClasses& release, std::span<const int> lv, const Dataset& population,
    const BoundHierarchies& population_binding, double threshold,
    Exec exec = Exec::Parallel);

// Scores the colluders' endgame: guessing which suspect class is the decoy.
double simulate_guess_success(const std::vector<std::vector<std::string>>& suspects,
                              const std::set<std::vector<std::string>>& true_decoys,
                              size_t trials, uint64_t seed);

struct AttackReport {
  std::vector<std::string> release_ids;
  std::vector<std::vector<std::vector<std::string>>> suspects;  // per release
  std::vector<size_t> close_to_k;                               // per release
  std::vector<std::map<size_t, size_t>> histograms;             // per release
  int k = 0;
  SuspectMode mode = SuspectMode::AnyPeer;
  bool strict = false;
};

void save_attack_report(const AttackReport& report, const std::filesystem::path& path);

}  // namespace anonkit
