#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"

namespace anonkit {

// Every data-parallel kernel has a plain serial reference implementation;
// both are exposed so tests can check equivalence and the benchmark can
// compare them. Parallel kernels are written to give bit-identical results
// regardless of thread count.
enum class Exec { Serial, Parallel };

inline constexpr size_t kMaxQuasi = 8;

// A record's quasi tuple at some generalization level, as per-attribute
// dictionary ids. Unused slots stay zero so hashing can be branch-free.
struct TupleKey {
  std::array<uint32_t, kMaxQuasi> v{};
  uint8_t n = 0;

  friend bool operator==(const TupleKey&, const TupleKey&) = default;
  friend auto operator<=>(const TupleKey&, const TupleKey&) = default;
};

struct TupleKeyHash {
  size_t operator()(const TupleKey& k) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint32_t x : k.v) {
      h ^= x;
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

// Dictionary-encoded quasi columns plus, per generalization level, the map
// from raw code to generalized-value id. Building it is a one-off cost; all
// lattice nodes and linkage passes then work on integer ids.
class EncodedTable {
 public:
  EncodedTable(const Dataset& ds, const BoundHierarchies& bound);

  size_t row_count() const { return row_count_; }
  size_t attr_count() const { return cols_.size(); }
  const BoundHierarchies& binding() const { return *bound_; }

  TupleKey key_of(size_t row, std::span<const int> lv) const;
  // Maps an external tuple (already generalized to lv) into this table's id
  // space; nullopt when some value never occurs here at that level.
  std::optional<TupleKey> translate(std::span<const std::string> tuple,
                                    std::span<const int> lv) const;
  std::vector<std::string> tuple_of(const TupleKey& key, std::span<const int> lv) const;

 private:
  struct Column {
    std::vector<uint32_t> codes;                     // per row: raw-value id
    std::vector<std::vector<uint32_t>> gen_id;       // [level][raw id] -> generalized id
    std::vector<std::vector<std::string>> gen_str;   // [level][generalized id]
    std::vector<std::unordered_map<std::string, uint32_t>> gen_index;
  };
  std::vector<Column> cols_;
  size_t row_count_ = 0;
  const BoundHierarchies* bound_;
};

// --- class-size census (the lattice-search hot path) ---------------------
std::vector<uint32_t> class_sizes_serial(const EncodedTable& t, std::span<const int> lv);
std::vector<uint32_t> class_sizes_parallel(const EncodedTable& t, std::span<const int> lv);
std::vector<uint32_t> class_sizes(const EncodedTable& t, std::span<const int> lv, Exec exec);

// --- full grouping --------------------------------------------------------
struct GroupedClasses {
  std::vector<TupleKey> keys;                  // ascending
  std::vector<std::vector<uint32_t>> members;  // row indexes, ascending
};
GroupedClasses group_records_serial(const EncodedTable& t, std::span<const int> lv);
GroupedClasses group_records_parallel(const EncodedTable& t, std::span<const int> lv);
GroupedClasses group_records(const EncodedTable& t, std::span<const int> lv, Exec exec);
// Same, restricted to a subset of rows (given ascending).
GroupedClasses group_records_subset(const EncodedTable& t, std::span<const int> lv,
                                    std::span<const uint32_t> rows, Exec exec);

// --- linkage counting ------------------------------------------------------
// For each target key: how many rows of t generalize to it at lv.
std::vector<uint64_t> count_matching_serial(const EncodedTable& t, std::span<const int> lv,
                                            std::span<const TupleKey> targets);
std::vector<uint64_t> count_matching_parallel(const EncodedTable& t, std::span<const int> lv,
                                              std::span<const TupleKey> targets);
std::vector<uint64_t> count_matching(const EncodedTable& t, std::span<const int> lv,
                                     std::span<const TupleKey> targets, Exec exec);

// Per-row flag: does the row's key at lv appear in targets?
std::vector<uint8_t> match_mask(const EncodedTable& t, std::span<const int> lv,
                                std::span<const TupleKey> targets, Exec exec);

}  // namespace anonkit
