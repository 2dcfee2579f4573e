#include "anonkit/kernels.hpp"

#include <algorithm>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "anonkit/errors.hpp"

namespace anonkit {

namespace {

// Contiguous chunks keep row order inside each chunk, which is what makes
// the parallel merges deterministic: per-key member lists are appended in
// chunk order, so they come out ascending exactly like the serial path.
size_t pick_chunk_count(size_t rows) {
  size_t threads = 1;
#ifdef _OPENMP
  threads = static_cast<size_t>(omp_get_max_threads());
#endif
  if (threads <= 1 || rows < 8192) return 1;
  return std::min(threads * 4, rows / 2048);
}

struct ChunkRange {
  size_t lo, hi;
};

std::vector<ChunkRange> make_chunks(size_t rows, size_t count) {
  std::vector<ChunkRange> chunks;
  chunks.reserve(count);
  size_t base = rows / count, extra = rows % count, at = 0;
  for (size_t c = 0; c < count; ++c) {
    size_t len = base + (c < extra ? 1 : 0);
    chunks.push_back({at, at + len});
    at += len;
  }
  return chunks;
}

}  // namespace

EncodedTable::EncodedTable(const Dataset& ds, const BoundHierarchies& bound)
    : bound_(&bound) {
  row_count_ = ds.size();
  cols_.resize(bound.quasi_count());
  for (size_t a = 0; a < bound.quasi_count(); ++a) {
    Column& col = cols_[a];
    const size_t src = bound.quasi_cols[a];
    const Hierarchy& rule = *bound.rules[a];
    const int levels = rule.level_count();

    col.gen_id.resize(levels);
    col.gen_str.resize(levels);
    col.gen_index.resize(levels);

    col.codes.reserve(row_count_);
    auto& raw_index = col.gen_index[0];
    auto& raw_values = col.gen_str[0];
    for (const auto& row : ds.rows) {
      const std::string& v = row[src];
      auto [it, inserted] =
          raw_index.try_emplace(v, static_cast<uint32_t>(raw_values.size()));
      if (inserted) raw_values.push_back(v);
      col.codes.push_back(it->second);
    }
    col.gen_id[0].resize(raw_values.size());
    std::iota(col.gen_id[0].begin(), col.gen_id[0].end(), 0u);

    for (int l = 1; l < levels; ++l) {
      col.gen_id[l].reserve(raw_values.size());
      for (const auto& raw : raw_values) {
        std::string g = rule.generalize(raw, l);
        auto [it, inserted] =
            col.gen_index[l].try_emplace(g, static_cast<uint32_t>(col.gen_str[l].size()));
        if (inserted) col.gen_str[l].push_back(std::move(g));
        col.gen_id[l].push_back(it->second);
      }
    }
  }
}

TupleKey EncodedTable::key_of(size_t row, std::span<const int> lv) const {
  TupleKey key;
  key.n = static_cast<uint8_t>(cols_.size());
  for (size_t a = 0; a < cols_.size(); ++a)
    key.v[a] = cols_[a].gen_id[lv[a]][cols_[a].codes[row]];
  return key;
}

std::optional<TupleKey> EncodedTable::translate(std::span<const std::string> tuple,
                                                std::span<const int> lv) const {
  TupleKey key;
  key.n = static_cast<uint8_t>(cols_.size());
  for (size_t a = 0; a < cols_.size(); ++a) {
    const auto& index = cols_[a].gen_index[lv[a]];
    auto it = index.find(tuple[a]);
    if (it == index.end()) return std::nullopt;
    key.v[a] = it->second;
  }
  return key;
}

std::vector<std::string> EncodedTable::tuple_of(const TupleKey& key,
                                                std::span<const int> lv) const {
  std::vector<std::string> tuple;
  tuple.reserve(cols_.size());
  for (size_t a = 0; a < cols_.size(); ++a)
    tuple.push_back(cols_[a].gen_str[lv[a]][key.v[a]]);
  return tuple;
}

// --- class sizes ------------------------------------------------------------

std::vector<uint32_t> class_sizes_serial(const EncodedTable& t, std::span<const int> lv) {
  std::unordered_map<TupleKey, uint32_t, TupleKeyHash> census;
  census.reserve(t.row_count() / 4 + 16);
  for (size_t row = 0; row < t.row_count(); ++row) ++census[t.key_of(row, lv)];
  std::vector<uint32_t> sizes;
  sizes.reserve(census.size());
  for (const auto& [key, n] : census) sizes.push_back(n);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::vector<uint32_t> class_sizes_parallel(const EncodedTable& t, std::span<const int> lv) {
  const size_t chunk_count = pick_chunk_count(t.row_count());
  auto chunks = make_chunks(t.row_count(), chunk_count);
  std::vector<std::unordered_map<TupleKey, uint32_t, TupleKeyHash>> locals(chunks.size());

#pragma omp parallel for schedule(static)
  for (int c = 0; c < static_cast<int>(chunks.size()); ++c) {
    auto& census = locals[c];
    census.reserve((chunks[c].hi - chunks[c].lo) / 4 + 16);
    for (size_t row = chunks[c].lo; row < chunks[c].hi; ++row) ++census[t.key_of(row, lv)];
  }

  std::unordered_map<TupleKey, uint32_t, TupleKeyHash> merged;
  for (auto& local : locals)
    for (const auto& [key, n] : local) merged[key] += n;
  std::vector<uint32_t> sizes;
  sizes.reserve(merged.size());
  for (const auto& [key, n] : merged) sizes.push_back(n);
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

std::vector<uint32_t> class_sizes(const EncodedTable& t, std::span<const int> lv, Exec exec) {
  return exec == Exec::Serial ? class_sizes_serial(t, lv) : class_sizes_parallel(t, lv);
}

// --- grouping ----------------------------------------------------------------

namespace {

GroupedClasses canonicalize(std::vector<TupleKey> keys,
                            std::vector<std::vector<uint32_t>> members) {
  std::vector<size_t> order(keys.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return keys[a] < keys[b]; });
  GroupedClasses out;
  out.keys.reserve(keys.size());
  out.members.reserve(keys.size());
  for (size_t i : order) {
    out.keys.push_back(keys[i]);
    out.members.push_back(std::move(members[i]));
  }
  return out;
}

template <typename RowRange>
GroupedClasses group_rows_serial(const EncodedTable& t, std::span<const int> lv,
                                 const RowRange& rows) {
  std::unordered_map<TupleKey, uint32_t, TupleKeyHash> slot;
  std::vector<TupleKey> keys;
  std::vector<std::vector<uint32_t>> members;
  for (uint32_t row : rows) {
    TupleKey key = t.key_of(row, lv);
    auto [it, inserted] = slot.try_emplace(key, static_cast<uint32_t>(keys.size()));
    if (inserted) {
      keys.push_back(key);
      members.emplace_back();
    }
    members[it->second].push_back(row);
  }
  return canonicalize(std::move(keys), std::move(members));
}

struct AllRows {
  uint32_t n;
  struct Iter {
    uint32_t i;
    uint32_t operator*() const { return i; }
    Iter& operator++() { ++i; return *this; }
    bool operator!=(const Iter& o) const { return i != o.i; }
  };
  Iter begin() const { return {0}; }
  Iter end() const { return {n}; }
};

GroupedClasses group_rows_parallel(const EncodedTable& t, std::span<const int> lv,
                                   std::span<const uint32_t> subset, bool use_subset) {
  const size_t n = use_subset ? subset.size() : t.row_count();
  const size_t chunk_count = pick_chunk_count(n);
  auto chunks = make_chunks(n, chunk_count);
  using LocalMap = std::unordered_map<TupleKey, std::vector<uint32_t>, TupleKeyHash>;
  std::vector<LocalMap> locals(chunks.size());

#pragma omp parallel for schedule(static)
  for (int c = 0; c < static_cast<int>(chunks.size()); ++c) {
    auto& local = locals[c];
    for (size_t i = chunks[c].lo; i < chunks[c].hi; ++i) {
      uint32_t row = use_subset ? subset[i] : static_cast<uint32_t>(i);
      local[t.key_of(row, lv)].push_back(row);
    }
  }

  // Merge chunk by chunk: rows within a chunk are ascending and chunks are
  // contiguous, so each class's member list ends up sorted.
  std::unordered_map<TupleKey, uint32_t, TupleKeyHash> slot;
  std::vector<TupleKey> keys;
  std::vector<std::vector<uint32_t>> members;
  for (auto& local : locals) {
    for (auto& [key, rows] : local) {
      auto [it, inserted] = slot.try_emplace(key, static_cast<uint32_t>(keys.size()));
      if (inserted) {
        keys.push_back(key);
        members.emplace_back();
      }
      auto& dst = members[it->second];
      dst.insert(dst.end(), rows.begin(), rows.end());
    }
  }
  return canonicalize(std::move(keys), std::move(members));
}

}  // namespace

GroupedClasses group_records_serial(const EncodedTable& t, std::span<const int> lv) {
  return group_rows_serial(t, lv, AllRows{static_cast<uint32_t>(t.row_count())});
}

GroupedClasses group_records_parallel(const EncodedTable& t, std::span<const int> lv) {
  return group_rows_parallel(t, lv, {}, false);
}

GroupedClasses group_records(const EncodedTable& t, std::span<const int> lv, Exec exec) {
  return exec == Exec::Serial ? group_records_serial(t, lv) : group_records_parallel(t, lv);
}

GroupedClasses group_records_subset(const EncodedTable& t, std::span<const int> lv,
                                    std::span<const uint32_t> rows, Exec exec) {
  if (exec == Exec::Serial) return group_rows_serial(t, lv, rows);
  return group_rows_parallel(t, lv, rows, true);
}

// --- linkage counting ----------------------------------------------------------

namespace {

std::unordered_map<TupleKey, size_t, TupleKeyHash> target_index(
    std::span<const TupleKey> targets) {
  std::unordered_map<TupleKey, size_t, TupleKeyHash> index;
  index.reserve(targets.size() * 2);
  for (size_t i = 0; i < targets.size(); ++i) index.try_emplace(targets[i], i);
  return index;
}

}  // namespace

std::vector<uint64_t> count_matching_serial(const EncodedTable& t, std::span<const int> lv,
                                            std::span<const TupleKey> targets) {
  auto index = target_index(targets);
  std::vector<uint64_t> counts(targets.size(), 0);
  for (size_t row = 0; row < t.row_count(); ++row) {
    auto it = index.find(t.key_of(row, lv));
    if (it != index.end()) ++counts[it->second];
  }
  return counts;
}

std::vector<uint64_t> count_matching_parallel(const EncodedTable& t, std::span<const int> lv,
                                              std::span<const TupleKey> targets) {
  auto index = target_index(targets);
  std::vector<uint64_t> counts(targets.size(), 0);
#pragma omp parallel
  {
    std::vector<uint64_t> local(targets.size(), 0);
#pragma omp for schedule(static) nowait
    for (int64_t row = 0; row < static_cast<int64_t>(t.row_count()); ++row) {
      auto it = index.find(t.key_of(static_cast<size_t>(row), lv));
      if (it != index.end()) ++local[it->second];
    }
#pragma omp critical
    for (size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
  }
  return counts;
}

std::vector<uint64_t> count_matching(const EncodedTable& t, std::span<const int> lv,
                                     std::span<const TupleKey> targets, Exec exec) {
  return exec == Exec::Serial ? count_matching_serial(t, lv, targets)
                              : count_matching_parallel(t, lv, targets);
}

std::vector<uint8_t> match_mask(const EncodedTable& t, std::span<const int> lv,
                                std::span<const TupleKey> targets, Exec exec) {
  auto index = target_index(targets);
  std::vector<uint8_t> mask(t.row_count(), 0);
  if (exec == Exec::Serial) {
    for (size_t row = 0; row < t.row_count(); ++row)
      mask[row] = index.count(t.key_of(row, lv)) ? 1 : 0;
  } else {
#pragma omp parallel for schedule(static)
    for (int64_t row = 0; row < static_cast<int64_t>(t.row_count()); ++row)
      mask[row] = index.count(t.key_of(static_cast<size_t>(row), lv)) ? 1 : 0;
  }
  return mask;
}

}  // namespace anonkit
