#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/kernels.hpp"

namespace anonkit {

enum class LossMetric { Precision, Discernibility, AvgClassSize };
LossMetric loss_metric_from_string(const std::string& s);
std::string to_string(LossMetric metric);

struct EquivalenceClass {
  std::vector<std::string> tuple;   // quasi values, binding order
  std::vector<int64_t> members;     // record ids, ascending
  size_t size() const { return members.size(); }
};

struct LossValues {
  double precision = 0.0;
  uint64_t discernibility = 0;
  double avg_class_size = 0.0;
};

// One fully generalized, k-anonymous table: the shared basis for every
// recipient release. Suppressed records are removed entirely.
struct AnonymizedView {
  Schema schema;                           // quasi (as categorical text) + sensitive
  std::vector<std::string> quasi_attributes;
  std::vector<int> level_vector;
  std::vector<EquivalenceClass> classes;   // ascending by tuple
  std::vector<int64_t> suppressed;         // record ids, ascending
  int k = 0;
  double suppression_limit = 0.0;
  LossMetric metric = LossMetric::Precision;
  size_t source_size = 0;
  Dataset generalized;                     // retained rows under this view
  LossValues loss;
  std::map<std::string, int64_t> resolved_origins;

  size_t retained() const { return generalized.size(); }
};

std::vector<EquivalenceClass> compute_classes(const Dataset& ds, std::span<const int> lv,
                                              const BoundHierarchies& bound,
                                              Exec exec = Exec::Parallel);

struct KCheck {
  bool satisfies = false;
  size_t suppressed = 0;
};
// k-anonymity with record suppression: classes under k are dropped whole, and
// the node passes when the dropped fraction stays within the limit.
KCheck check_k(std::span<const uint32_t> class_sizes, int k, double suppression_limit,
               size_t total);

LossValues compute_loss(std::span<const int> lv, std::span<const int> level_counts,
                        std::span<const uint32_t> sizes, int k, size_t total);

// Bottom-up lattice search with monotonicity pruning: any node above a
// passing node also passes, so it is tagged without evaluation. Among all
// passing nodes the one with minimal loss wins; ties go to the
// lexicographically smallest level vector.
AnonymizedView ola_search(const Dataset& ds, int k, double suppression_limit,
                          LossMetric metric, const BoundHierarchies& bound,
                          Exec exec = Exec::Parallel);

void save_view(const AnonymizedView& view, const std::filesystem::path& prefix);
AnonymizedView load_view(const std::filesystem::path& prefix);

}  // namespace anonkit
