#include "anonkit/anonymizer.hpp"

#include <algorithm>
#include <numeric>

#include "anonkit/csv.hpp"
#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"

namespace anonkit {

using nlohmann::json;

LossMetric loss_metric_from_string(const std::string& s) {
  if (s == "precision") return LossMetric::Precision;
  if (s == "discernibility") return LossMetric::Discernibility;
  if (s == "avg-class-size") return LossMetric::AvgClassSize;
  throw ValidationError("unknown loss metric: " + s);
}

std::string to_string(LossMetric metric) {
  switch (metric) {
    case LossMetric::Precision: return "precision";
    case LossMetric::Discernibility: return "discernibility";
    case LossMetric::AvgClassSize: return "avg-class-size";
  }
  return "?";
}

KCheck check_k(std::span<const uint32_t> class_sizes, int k, double suppression_limit,
               size_t total) {
  KCheck result;
  for (uint32_t s : class_sizes)
    if (s < static_cast<uint32_t>(k)) result.suppressed += s;
  result.satisfies =
      total == 0 ||
      static_cast<double>(result.suppressed) <=
          suppression_limit * static_cast<double>(total) + 1e-9;
  return result;
}

LossValues compute_loss(std::span<const int> lv, std::span<const int> level_counts,
                        std::span<const uint32_t> sizes, int k, size_t total) {
  LossValues loss;
  double p = 0.0;
  for (size_t i = 0; i < lv.size(); ++i)
    if (level_counts[i] > 1) p += static_cast<double>(lv[i]) / (level_counts[i] - 1);
  loss.precision = lv.empty() ? 0.0 : p / static_cast<double>(lv.size());

  uint64_t suppressed = 0, retained = 0, retained_classes = 0, dm = 0;
  for (uint32_t s : sizes) {
    if (s >= static_cast<uint32_t>(k)) {
      dm += static_cast<uint64_t>(s) * s;
      retained += s;
      ++retained_classes;
    } else {
      suppressed += s;
    }
  }
  // Each suppressed record is as identifying as a match against the whole table.
  loss.discernibility = dm + suppressed * static_cast<uint64_t>(total);
  loss.avg_class_size =
      retained_classes ? static_cast<double>(retained) / static_cast<double>(retained_classes)
                       : 0.0;
  return loss;
}

std::vector<EquivalenceClass> compute_classes(const Dataset& ds, std::span<const int> lv,
                                              const BoundHierarchies& bound, Exec exec) {
  EncodedTable enc(ds, bound);
  auto grouped = group_records(enc, lv, exec);
  std::vector<EquivalenceClass> classes;
  classes.reserve(grouped.keys.size());
  for (size_t i = 0; i < grouped.keys.size(); ++i) {
    EquivalenceClass c;
    c.tuple = enc.tuple_of(grouped.keys[i], lv);
    c.members.reserve(grouped.members[i].size());
    for (uint32_t row : grouped.members[i]) c.members.push_back(ds.record_ids[row]);
    classes.push_back(std::move(c));
  }
  std::sort(classes.begin(), classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) { return a.tuple < b.tuple; });
  return classes;
}

namespace {

constexpr uint8_t kUnknown = 0, kSat = 1, kUnsat = 2;
constexpr size_t kMaxLatticeNodes = 2'000'000;

struct Lattice {
  std::vector<int> counts;     // levels per attribute
  std::vector<size_t> stride;  // index delta for +1 on each attribute
  size_t node_count = 1;

  explicit Lattice(std::span<const int> level_counts)
      : counts(level_counts.begin(), level_counts.end()), stride(level_counts.size()) {
    for (size_t i = counts.size(); i-- > 0;) {
      stride[i] = node_count;
      node_count *= static_cast<size_t>(counts[i]);
      if (node_count > kMaxLatticeNodes)
        throw ValidationError("generalization lattice exceeds " +
                              std::to_string(kMaxLatticeNodes) + " nodes");
    }
  }

  std::vector<int> decode(size_t idx) const {
    std::vector<int> lv(counts.size());
    for (size_t i = counts.size(); i-- > 0;) {
      lv[i] = static_cast<int>(idx % counts[i]);
      idx /= counts[i];
    }
    return lv;
  }

  int sum_of(size_t idx) const {
    int s = 0;
    for (size_t i = counts.size(); i-- > 0;) {
      s += static_cast<int>(idx % counts[i]);
      idx /= counts[i];
    }
    return s;
  }
};

// Exact compare keys so metric minimization never depends on floating-point
// rounding. Precision compares as an integer after scaling by the lcm of the
// per-attribute maxima; the other two are integer-valued already.
uint64_t precision_scale(std::span<const int> level_counts) {
  uint64_t m = 1;
  for (int c : level_counts)
    if (c > 1) m = std::lcm(m, static_cast<uint64_t>(c - 1));
  return m;
}

uint64_t precision_key(std::span<const int> lv, std::span<const int> level_counts,
                       uint64_t scale) {
  uint64_t key = 0;
  for (size_t i = 0; i < lv.size(); ++i)
    if (level_counts[i] > 1)
      key += static_cast<uint64_t>(lv[i]) * (scale / static_cast<uint64_t>(level_counts[i] - 1));
  return key;
}

struct AvgKey {
  uint64_t retained = 0;
  uint64_t classes = 0;
};

// avg class size = retained/classes, compared by cross-multiplication.
bool avg_less(const AvgKey& a, const AvgKey& b) {
  return a.retained * b.classes < b.retained * a.classes;
}

Schema make_view_schema(const Schema& source, const BoundHierarchies& bound) {
  std::vector<size_t> keep;
  keep.insert(keep.end(), bound.quasi_cols.begin(), bound.quasi_cols.end());
  keep.insert(keep.end(), bound.sensitive_cols.begin(), bound.sensitive_cols.end());
  std::sort(keep.begin(), keep.end());
  std::vector<AttributeSchema> attrs;
  for (size_t c : keep) {
    AttributeSchema a = source.at(c);
    if (a.role == AttrRole::Quasi) {
      // Generalized values are interval labels / masked codes, so the view
      // column becomes free text; the hierarchy link is kept for later
      // same-origin checks.
      a.kind = AttrKind::Categorical;
      a.code_length = 0;
    }
    attrs.push_back(std::move(a));
  }
  return Schema(std::move(attrs));
}

}  // namespace

AnonymizedView ola_search(const Dataset& ds, int k, double suppression_limit,
                          LossMetric metric, const BoundHierarchies& bound, Exec exec) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (suppression_limit < 0.0 || suppression_limit > 1.0)
    throw ValidationError("suppression limit must lie in [0, 1]");
  if (bound.quasi_count() == 0) throw ValidationError("no quasi attributes to generalize");

  EncodedTable enc(ds, bound);
  const auto level_counts = bound.level_counts();
  Lattice lattice(level_counts);

  // Bucket nodes by level sum for the bottom-up sweep.
  int max_sum = 0;
  for (int c : level_counts) max_sum += c - 1;
  std::vector<std::vector<uint32_t>> by_sum(static_cast<size_t>(max_sum) + 1);
  for (size_t idx = 0; idx < lattice.node_count; ++idx)
    by_sum[lattice.sum_of(idx)].push_back(static_cast<uint32_t>(idx));

  std::vector<uint8_t> state(lattice.node_count, kUnknown);

  auto mark_sat_upward = [&](size_t start) {
    std::vector<size_t> stack{start};
    while (!stack.empty()) {
      size_t idx = stack.back();
      stack.pop_back();
      if (state[idx] == kSat) continue;
      state[idx] = kSat;
      auto lv = lattice.decode(idx);
      for (size_t a = 0; a < lv.size(); ++a)
        if (lv[a] + 1 < level_counts[a]) stack.push_back(idx + lattice.stride[a]);
    }
  };

  for (auto& bucket : by_sum) {
    std::vector<uint32_t> pending;
    for (uint32_t idx : bucket)
      if (state[idx] == kUnknown) pending.push_back(idx);
    if (pending.empty()) continue;

    std::vector<uint8_t> sat(pending.size(), 0);
    if (exec == Exec::Parallel && pending.size() > 1) {
      // Lattice nodes are independent, so parallelize across them and keep
      // the census kernel serial within each node.
#pragma omp parallel for schedule(dynamic)
      for (int64_t i = 0; i < static_cast<int64_t>(pending.size()); ++i) {
        auto lv = lattice.decode(pending[i]);
        auto sizes = class_sizes_serial(enc, lv);
        sat[i] = check_k(sizes, k, suppression_limit, ds.size()).satisfies ? 1 : 0;
      }
    } else {
      for (size_t i = 0; i < pending.size(); ++i) {
        auto lv = lattice.decode(pending[i]);
        auto sizes = class_sizes(enc, lv, exec);
        sat[i] = check_k(sizes, k, suppression_limit, ds.size()).satisfies ? 1 : 0;
      }
    }
    for (size_t i = 0; i < pending.size(); ++i) {
      if (sat[i]) mark_sat_upward(pending[i]);
      else state[pending[i]] = kUnsat;
    }
  }

  std::vector<uint32_t> satisfying;
  for (size_t idx = 0; idx < lattice.node_count; ++idx)
    if (state[idx] == kSat) satisfying.push_back(static_cast<uint32_t>(idx));
  if (satisfying.empty())
    throw ValidationError("no generalization satisfies k=" + std::to_string(k) +
                          " within suppression limit " + std::to_string(suppression_limit));

  // Pick the loss-minimal satisfying node; scanning in lexicographic index
  // order with strict improvement makes the tie-break deterministic.
  size_t best_idx = satisfying.front();
  if (metric == LossMetric::Precision) {
    const uint64_t scale = precision_scale(level_counts);
    uint64_t best_key = ~uint64_t{0};
    for (uint32_t idx : satisfying) {
      auto lv = lattice.decode(idx);
      uint64_t key = precision_key(lv, level_counts, scale);
      if (key < best_key) {
        best_key = key;
        best_idx = idx;
      }
    }
  } else {
    // These metrics depend on the class structure, so every satisfying node
    // gets one census pass.
    std::vector<uint64_t> dm_key(satisfying.size());
    std::vector<AvgKey> avg_key(satisfying.size());
    auto eval_keys = [&](size_t i, Exec kernel_exec) {
      auto lv = lattice.decode(satisfying[i]);
      auto sizes = class_sizes(enc, lv, kernel_exec);
      uint64_t dm = 0, suppressed = 0, retained = 0, classes = 0;
      for (uint32_t s : sizes) {
        if (s >= static_cast<uint32_t>(k)) {
          dm += static_cast<uint64_t>(s) * s;
          retained += s;
          ++classes;
        } else {
          suppressed += s;
        }
      }
      dm_key[i] = dm + suppressed * static_cast<uint64_t>(ds.size());
      avg_key[i] = {retained, classes};
    };
    if (exec == Exec::Parallel && satisfying.size() > 1) {
#pragma omp parallel for schedule(dynamic)
      for (int64_t i = 0; i < static_cast<int64_t>(satisfying.size()); ++i)
        eval_keys(static_cast<size_t>(i), Exec::Serial);
    } else {
      for (size_t i = 0; i < satisfying.size(); ++i) eval_keys(i, exec);
    }
    size_t best_i = 0;
    for (size_t i = 1; i < satisfying.size(); ++i) {
      if (metric == LossMetric::Discernibility ? dm_key[i] < dm_key[best_i]
                                               : avg_less(avg_key[i], avg_key[best_i]))
        best_i = i;
    }
    best_idx = satisfying[best_i];
  }

  // Materialize the winning node.
  const auto lv = lattice.decode(best_idx);
  auto grouped = group_records(enc, lv, exec);

  AnonymizedView view;
  view.schema = make_view_schema(ds.schema, bound);
  view.quasi_attributes = bound.quasi_names;
  view.level_vector = lv;
  view.k = k;
  view.suppression_limit = suppression_limit;
  view.metric = metric;
  view.source_size = ds.size();

  std::vector<uint32_t> sizes;
  sizes.reserve(grouped.keys.size());
  for (const auto& m : grouped.members) sizes.push_back(static_cast<uint32_t>(m.size()));
  view.loss = compute_loss(lv, level_counts, sizes, k, ds.size());

  std::vector<uint8_t> keep_row(ds.size(), 0);
  for (size_t i = 0; i < grouped.keys.size(); ++i) {
    if (grouped.members[i].size() < static_cast<size_t>(k)) {
      for (uint32_t row : grouped.members[i]) view.suppressed.push_back(ds.record_ids[row]);
      continue;
    }
    EquivalenceClass c;
    c.tuple = enc.tuple_of(grouped.keys[i], lv);
    for (uint32_t row : grouped.members[i]) {
      c.members.push_back(ds.record_ids[row]);
      keep_row[row] = 1;
    }
    view.classes.push_back(std::move(c));
  }
  std::sort(view.suppressed.begin(), view.suppressed.end());
  std::sort(view.classes.begin(), view.classes.end(),
            [](const EquivalenceClass& a, const EquivalenceClass& b) { return a.tuple < b.tuple; });

  // Retained rows in source order, quasi values generalized, sensitive kept.
  std::vector<size_t> keep_cols;
  keep_cols.insert(keep_cols.end(), bound.quasi_cols.begin(), bound.quasi_cols.end());
  keep_cols.insert(keep_cols.end(), bound.sensitive_cols.begin(), bound.sensitive_cols.end());
  std::sort(keep_cols.begin(), keep_cols.end());

  view.generalized.schema = view.schema;
  for (size_t row = 0; row < ds.size(); ++row) {
    if (!keep_row[row]) continue;
    TupleKey key = enc.key_of(row, lv);
    auto tuple = enc.tuple_of(key, lv);
    std::vector<std::string> out_row;
    out_row.reserve(keep_cols.size());
    for (size_t c : keep_cols) {
      auto q = std::find(bound.quasi_cols.begin(), bound.quasi_cols.end(), c);
      if (q != bound.quasi_cols.end())
        out_row.push_back(tuple[static_cast<size_t>(q - bound.quasi_cols.begin())]);
      else
        out_row.push_back(ds.rows[row][c]);
    }
    view.generalized.rows.push_back(std::move(out_row));
    view.generalized.record_ids.push_back(ds.record_ids[row]);
  }
  return view;
}

void save_view(const AnonymizedView& view, const std::filesystem::path& prefix) {
  auto csv_path = prefix;
  csv_path += ".csv";
  save_dataset(view.generalized, csv_path, true);

  json j;
  j["artifact"] = "anonymized-view";
  j["k"] = view.k;
  j["suppression_limit"] = view.suppression_limit;
  j["loss_metric"] = to_string(view.metric);
  j["quasi_attributes"] = view.quasi_attributes;
  j["level_vector"] = view.level_vector;
  j["source_records"] = view.source_size;
  j["retained_records"] = view.retained();
  j["suppressed_record_ids"] = view.suppressed;
  j["schema"] = schema_to_json(view.schema);
  json classes = json::array();
  for (const auto& c : view.classes)
    classes.push_back(json{{"tuple", c.tuple}, {"size", c.size()}});
  j["classes"] = classes;
  j["loss"] = json{{"precision", view.loss.precision},
                   {"discernibility", view.loss.discernibility},
                   {"avg_class_size", view.loss.avg_class_size}};
  j["resolved_origins"] = view.resolved_origins;

  auto manifest_path = prefix;
  manifest_path += ".manifest.json";
  save_json_file(j, manifest_path);
}

AnonymizedView load_view(const std::filesystem::path& prefix) {
  auto manifest_path = prefix;
  manifest_path += ".manifest.json";
  json j = load_json_file(manifest_path);

  AnonymizedView view;
  try {
    if (j.at("artifact").get<std::string>() != "anonymized-view")
      throw ValidationError(manifest_path.string() + ": not a view manifest");
    view.k = j.at("k").get<int>();
    view.suppression_limit = j.at("suppression_limit").get<double>();
    view.metric = loss_metric_from_string(j.at("loss_metric").get<std::string>());
    view.quasi_attributes = j.at("quasi_attributes").get<std::vector<std::string>>();
    view.level_vector = j.at("level_vector").get<std::vector<int>>();
    view.source_size = j.at("source_records").get<size_t>();
    view.suppressed = j.at("suppressed_record_ids").get<std::vector<int64_t>>();
    view.schema = schema_from_json(j.at("schema"));
    view.loss.precision = j.at("loss").at("precision").get<double>();
    view.loss.discernibility = j.at("loss").at("discernibility").get<uint64_t>();
    view.loss.avg_class_size = j.at("loss").at("avg_class_size").get<double>();
    if (j.contains("resolved_origins"))
      view.resolved_origins = j.at("resolved_origins").get<std::map<std::string, int64_t>>();

    auto csv_path = prefix;
    csv_path += ".csv";
    view.generalized = load_dataset_with_ids(csv_path, view.schema);

    // Rebuild the classes from the rows, then verify them against the
    // manifest census so a tampered or mismatched pair of files is rejected.
    std::vector<size_t> quasi_cols;
    for (const auto& name : view.quasi_attributes) {
      auto idx = view.schema.index_of(name);
      if (!idx) throw ValidationError(manifest_path.string() + ": quasi attribute '" + name +
                                      "' missing from schema");
      quasi_cols.push_back(*idx);
    }
    std::map<std::vector<std::string>, std::vector<int64_t>> groups;
    for (size_t r = 0; r < view.generalized.size(); ++r) {
      std::vector<std::string> tuple;
      tuple.reserve(quasi_cols.size());
      for (size_t c : quasi_cols) tuple.push_back(view.generalized.rows[r][c]);
      groups[std::move(tuple)].push_back(view.generalized.record_ids[r]);
    }
    std::map<std::vector<std::string>, size_t> declared;
    for (const auto& c : j.at("classes"))
      declared[c.at("tuple").get<std::vector<std::string>>()] = c.at("size").get<size_t>();
    if (declared.size() != groups.size())
      throw ValidationError(manifest_path.string() + ": class census does not match the table");
    for (auto& [tuple, members] : groups) {
      auto it = declared.find(tuple);
      if (it == declared.end() || it->second != members.size())
        throw ValidationError(manifest_path.string() + ": class census does not match the table");
      EquivalenceClass c;
      c.tuple = tuple;
      c.members = std::move(members);
      std::sort(c.members.begin(), c.members.end());
      view.classes.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ValidationError(manifest_path.string() + ": " + e.what());
  }
  return view;
}

}  // namespace anonkit
