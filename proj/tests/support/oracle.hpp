#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "anonkit/anonymizer.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"

// Deliberately naive re-implementations used as ground truth: string maps
// and exhaustive sweeps instead of dictionary encoding, pruning or kernels.
namespace anonkit::oracle {

using Tuple = std::vector<std::string>;

Tuple generalize_tuple(const std::vector<std::string>& row, const BoundHierarchies& bound,
                       std::span<const int> lv);

std::map<Tuple, std::vector<int64_t>> classes(const Dataset& ds, const BoundHierarchies& bound,
                                              std::span<const int> lv);

struct Evaluation {
  bool satisfies = false;
  size_t suppressed = 0;
};
Evaluation evaluate(const Dataset& ds, const BoundHierarchies& bound, std::span<const int> lv,
                    int k, double suppression_limit);

// Exact fraction (for precision comparisons without rounding).
struct Frac {
  uint64_t num = 0;
  uint64_t den = 1;
  void add(uint64_t n, uint64_t d);
};
bool frac_less(const Frac& a, const Frac& b);

struct NodeLoss {
  Frac precision;
  uint64_t discernibility = 0;
  uint64_t retained = 0;
  uint64_t retained_classes = 0;
};
NodeLoss node_loss(const Dataset& ds, const BoundHierarchies& bound, std::span<const int> lv,
                   int k);

struct BestNode {
  std::vector<int> level_vector;
  NodeLoss loss;
};
// Full lattice sweep; first lexicographic minimum wins, like the searcher
// claims to do.
std::optional<BestNode> exhaustive_best(const Dataset& ds, const BoundHierarchies& bound,
                                        int k, double suppression_limit, LossMetric metric);

// Linkage ground truth: per-view-class population counts, the minimum, and
// the leftover classes in [k, min_link) after linked records are removed.
struct Feasibility {
  std::map<Tuple, uint64_t> links;
  uint64_t min_link = 0;
  std::map<Tuple, std::pair<std::vector<int64_t>, double>> candidates;  // members, risk
};
Feasibility feasibility(const Dataset& population, const BoundHierarchies& population_binding,
                        const std::vector<Tuple>& view_tuples, std::span<const int> lv, int k);

}  // namespace anonkit::oracle
