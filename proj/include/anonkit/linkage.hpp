#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "anonkit/anonymizer.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/kernels.hpp"

namespace anonkit {

// How many population records generalize into each released class. The
// smallest count bounds the re-identification risk of the whole release:
// the best guess a linker can make succeeds with probability 1/min_link.
struct LinkageReport {
  std::vector<uint64_t> per_class_links;  // aligned with view.classes
  uint64_t min_link = 0;                  // 0 when some class has no match
  double max_risk = 0.0;                  // 1/min_link, +inf when min_link is 0
};

LinkageReport link_classes(const AnonymizedView& view, const Dataset& population,
                           const BoundHierarchies& population_binding,
                           Exec exec = Exec::Parallel);

// A population equivalence class that would stand out if released: it links
// to fewer records than every genuine class does, so a re-identification
// attempt against it is risk_factor times likelier to succeed.
struct DecoyCandidate {
  std::vector<std::string> tuple;
  std::vector<int64_t> members;  // population record ids backing the class
  double risk_factor = 0.0;      // min_link / class size, > 1 by construction
  size_t size() const { return members.size(); }
};

// Removes every population record that links into the view, re-groups the
// remainder under the view's generalization, and keeps the classes whose
// size lands in [k, min_link).
std::vector<DecoyCandidate> discover_candidates(const Dataset& population,
                                                const AnonymizedView& view, int k,
                                                uint64_t min_link,
                                                const BoundHierarchies& population_binding,
                                                Exec exec = Exec::Parallel);

std::vector<double> risk_profile(std::span<const DecoyCandidate> candidates);

struct FeasibilityResult {
  LinkageReport report;
  std::vector<DecoyCandidate> candidates;
  int k = 0;
  std::vector<int> level_vector;
  std::vector<std::string> quasi_attributes;
};

void save_feasibility(const FeasibilityResult& result, const AnonymizedView& view,
                      const std::filesystem::path& path);
FeasibilityResult load_feasibility(const std::filesystem::path& path);

}  // namespace anonkit
