#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "anonkit/dataset.hpp"

namespace anonkit {

// A generalization rule for one attribute domain. Level 0 is the raw value;
// the highest level is fully generalized. Three kinds:
//   mapping-table : explicit value -> parent tables, one column per level
//   interval      : integers bucketed by a width per level; rendered
//                   "lo-hi" with hi exclusive, e.g. width 2 at origin 1976
//                   puts 1981 in "1980-1982"; top level is "*"
//   suffix-mask   : fixed-length codes masked from the right, one character
//                   per level ("13122" -> "1312*" -> ... -> "*****")
class Hierarchy {
 public:
  enum class Kind { MappingTable, Interval, SuffixMask };

  static Hierarchy mapping_table(std::string name,
                                 std::vector<std::vector<std::string>> rows);
  static Hierarchy interval(std::string name, std::vector<int64_t> widths,
                            std::optional<int64_t> origin,
                            std::string top_label = "*");
  static Hierarchy suffix_mask(std::string name, int code_length);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  int level_count() const { return level_count_; }
  int top_level() const { return level_count_ - 1; }

  // Interval rules without an explicit anchor must be resolved against data
  // before use (the smallest value rounded down to a multiple of the largest
  // width becomes the anchor).
  bool needs_origin() const { return kind_ == Kind::Interval && !origin_.has_value(); }
  void resolve_origin(int64_t origin);
  std::optional<int64_t> origin() const { return origin_; }
  const std::vector<int64_t>& widths() const { return widths_; }

  std::string generalize(const std::string& raw, int level) const;
  // Re-generalizes a value already at level `from` up to level `to`.
  std::string generalize_from(const std::string& value, int from, int to) const;
  // Every level at which `value` is a member of this rule's domain.
  std::vector<int> levels_of(const std::string& value) const;
  bool in_domain(const std::string& value) const { return !levels_of(value).empty(); }

  // True when a == b or a is reachable from b by generalizing upward.
  bool is_ancestor(const std::string& a, const std::string& b) const;
  // Parent-or-child along one branch: equal values, or one generalizes into
  // the other. The strict variant excludes equal generalization levels.
  bool related(const std::string& a, const std::string& b) const;
  bool related_strict(const std::string& a, const std::string& b) const;

 private:
  Hierarchy() = default;

  std::string name_;
  Kind kind_ = Kind::MappingTable;
  int level_count_ = 0;

  // mapping-table state
  std::vector<std::vector<std::string>> level_values_;                    // [level][idx]
  std::vector<std::unordered_map<std::string, uint32_t>> level_index_;    // [level] value -> idx
  std::vector<std::vector<uint32_t>> parent_;                             // [level][idx] -> idx@level+1

  // interval state
  std::vector<int64_t> widths_;  // widths of levels 1..n-2, strictly increasing, each divisible by previous
  std::optional<int64_t> origin_;
  std::string top_label_ = "*";

  // suffix-mask state
  int code_length_ = 0;
};

// The rule book for a dataset: hierarchies by name, loaded from JSON.
class HierarchySet {
 public:
  static HierarchySet load(const std::filesystem::path& path);

  void add(Hierarchy h);
  bool contains(const std::string& name) const;
  const Hierarchy& get(const std::string& name) const;
  Hierarchy& get_mutable(const std::string& name);

  // Fills in missing interval anchors from the data that a rule will be
  // applied to; call once with the widest dataset (the population).
  void resolve_origins(const Dataset& ds);
  std::map<std::string, int64_t> resolved_origins() const;

 private:
  std::map<std::string, Hierarchy> by_name_;
};

// A schema's quasi attributes bound to their hierarchies, fixing the
// attribute order every kernel and report uses.
struct BoundHierarchies {
  std::vector<std::string> quasi_names;
  std::vector<size_t> quasi_cols;
  std::vector<const Hierarchy*> rules;
  std::vector<size_t> sensitive_cols;

  size_t quasi_count() const { return quasi_cols.size(); }
  std::vector<int> level_counts() const;
};

BoundHierarchies bind_hierarchies(const Schema& schema, const HierarchySet& set);
// Binds another schema (e.g. the population's) in the same quasi order as a
// reference binding, so tuples line up attribute by attribute.
BoundHierarchies bind_matching(const Schema& schema, const BoundHierarchies& reference,
                               const HierarchySet& set);

}  // namespace anonkit
