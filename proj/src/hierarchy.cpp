#include "anonkit/hierarchy.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"

namespace anonkit {

using nlohmann::json;

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

std::optional<int64_t> parse_int(const std::string& s) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

Hierarchy Hierarchy::mapping_table(std::string name,
                                   std::vector<std::vector<std::string>> rows) {
  if (rows.empty())
    throw ValidationError("hierarchy '" + name + "': mapping table has no rows");
  const size_t levels = rows.front().size();
  if (levels == 0)
    throw ValidationError("hierarchy '" + name + "': mapping table rows are empty");

  Hierarchy h;
  h.name_ = std::move(name);
  h.kind_ = Kind::MappingTable;
  h.level_count_ = static_cast<int>(levels);
  h.level_values_.resize(levels);
  h.level_index_.resize(levels);
  h.parent_.resize(levels > 1 ? levels - 1 : 0);

  for (const auto& row : rows) {
    if (row.size() != levels)
      throw ValidationError("hierarchy '" + h.name_ + "': ragged mapping table row");
    // Intern each value, then record/verify the parent link at every level.
    std::vector<uint32_t> idx(levels);
    for (size_t l = 0; l < levels; ++l) {
      auto [it, inserted] = h.level_index_[l].try_emplace(
          row[l], static_cast<uint32_t>(h.level_values_[l].size()));
      if (inserted) h.level_values_[l].push_back(row[l]);
      idx[l] = it->second;
    }
    if (h.parent_.empty()) continue;
    for (size_t l = 0; l + 1 < levels; ++l) {
      auto& links = h.parent_[l];
      if (idx[l] < links.size()) {
        if (links[idx[l]] != idx[l + 1])
          throw ValidationError("hierarchy '" + h.name_ + "': value '" + row[l] +
                                "' has two different parents ('" +
                                h.level_values_[l + 1][links[idx[l]]] + "' and '" + row[l + 1] +
                                "')");
      } else if (idx[l] == links.size()) {
        links.push_back(idx[l + 1]);
      } else {
        throw std::logic_error("mapping table internment out of order");
      }
    }
  }
  if (levels > 1 && h.level_values_.back().size() != 1)
    throw ValidationError("hierarchy '" + h.name_ +
                          "': top level must hold a single value, found " +
                          std::to_string(h.level_values_.back().size()));
  return h;
}

Hierarchy Hierarchy::interval(std::string name, std::vector<int64_t> widths,
                              std::optional<int64_t> origin, std::string top_label) {
  for (size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] < 2)
      throw ValidationError("hierarchy '" + name + "': interval widths must be at least 2");
    if (i > 0 && (widths[i] <= widths[i - 1] || widths[i] % widths[i - 1] != 0))
      throw ValidationError("hierarchy '" + name +
                            "': widths must be strictly increasing and each divisible by "
                            "the previous so buckets nest");
  }
  Hierarchy h;
  h.name_ = std::move(name);
  h.kind_ = Kind::Interval;
  h.widths_ = std::move(widths);
  h.origin_ = origin;
  h.top_label_ = std::move(top_label);
  h.level_count_ = static_cast<int>(h.widths_.size()) + 2;
  return h;
}

Hierarchy Hierarchy::suffix_mask(std::string name, int code_length) {
  if (code_length <= 0)
    throw ValidationError("hierarchy '" + name + "': suffix-mask length must be positive");
  Hierarchy h;
  h.name_ = std::move(name);
  h.kind_ = Kind::SuffixMask;
  h.code_length_ = code_length;
  h.level_count_ = code_length + 1;
  return h;
}

void Hierarchy::resolve_origin(int64_t origin) {
  if (kind_ != Kind::Interval) throw std::logic_error("resolve_origin on non-interval hierarchy");
  origin_ = origin;
}

std::string Hierarchy::generalize(const std::string& raw, int level) const {
  if (level < 0 || level >= level_count_)
    throw std::logic_error("hierarchy '" + name_ + "': level " + std::to_string(level) +
                           " out of range");
  switch (kind_) {
    case Kind::MappingTable: {
      auto it = level_index_[0].find(raw);
      if (it == level_index_[0].end())
        throw ValidationError("hierarchy '" + name_ + "': value '" + raw +
                              "' is not in the domain");
      uint32_t idx = it->second;
      for (int l = 0; l < level; ++l) idx = parent_[l][idx];
      return level_values_[level][idx];
    }
    case Kind::Interval: {
      if (!origin_) throw std::logic_error("hierarchy '" + name_ + "': anchor unresolved");
      auto v = parse_int(raw);
      if (!v)
        throw ValidationError("hierarchy '" + name_ + "': value '" + raw +
                              "' is not an integer");
      if (*v < *origin_)
        throw ValidationError("hierarchy '" + name_ + "': value " + raw +
                              " lies below the anchor " + std::to_string(*origin_));
      if (level == 0) return raw;
      if (level == top_level()) return top_label_;
      int64_t w = widths_[level - 1];
      int64_t lo = *origin_ + floor_div(*v - *origin_, w) * w;
      return std::to_string(lo) + "-" + std::to_string(lo + w);
    }
    case Kind::SuffixMask: {
      if (raw.size() != static_cast<size_t>(code_length_) ||
          raw.find('*') != std::string::npos)
        throw ValidationError("hierarchy '" + name_ + "': value '" + raw +
                              "' is not a " + std::to_string(code_length_) +
                              "-character code");
      if (level == 0) return raw;
      return raw.substr(0, code_length_ - level) + std::string(level, '*');
    }
  }
  throw std::logic_error("unreachable");
}

std::string Hierarchy::generalize_from(const std::string& value, int from, int to) const {
  if (to < from) throw std::logic_error("generalize_from cannot move down the hierarchy");
  if (to >= level_count_) throw std::logic_error("generalize_from: level out of range");
  switch (kind_) {
    case Kind::MappingTable: {
      auto it = level_index_[from].find(value);
      if (it == level_index_[from].end())
        throw ValidationError("hierarchy '" + name_ + "': value '" + value +
                              "' is not at level " + std::to_string(from));
      uint32_t idx = it->second;
      for (int l = from; l < to; ++l) idx = parent_[l][idx];
      return level_values_[to][idx];
    }
    case Kind::Interval: {
      if (from == to) return value;
      if (from == 0) return generalize(value, to);
      if (to == top_level()) return top_label_;
      // Re-bucket the interval's lower bound at the coarser width.
      size_t dash = value.find('-', 1);
      auto lo = dash == std::string::npos ? std::nullopt : parse_int(value.substr(0, dash));
      if (!lo)
        throw ValidationError("hierarchy '" + name_ + "': '" + value +
                              "' is not an interval label");
      return generalize(std::to_string(*lo), to);
    }
    case Kind::SuffixMask: {
      if (value.size() != static_cast<size_t>(code_length_))
        throw ValidationError("hierarchy '" + name_ + "': value '" + value +
                              "' is not a " + std::to_string(code_length_) +
                              "-character code");
      if (from == to) return value;
      return value.substr(0, code_length_ - to) + std::string(to, '*');
    }
  }
  throw std::logic_error("unreachable");
}

std::vector<int> Hierarchy::levels_of(const std::string& value) const {
  std::vector<int> out;
  switch (kind_) {
    case Kind::MappingTable:
      for (int l = 0; l < level_count_; ++l)
        if (level_index_[l].count(value)) out.push_back(l);
      return out;
    case Kind::Interval: {
      if (!origin_) throw std::logic_error("hierarchy '" + name_ + "': anchor unresolved");
      if (auto v = parse_int(value)) {
        if (*v >= *origin_) out.push_back(0);
        return out;
      }
      if (value == top_label_) {
        out.push_back(top_level());
        return out;
      }
      // "lo-hi" where hi-lo matches one of the widths and lo is aligned.
      for (size_t dash = 1; dash < value.size(); ++dash) {
        if (value[dash] != '-') continue;
        auto lo = parse_int(value.substr(0, dash));
        auto hi = parse_int(value.substr(dash + 1));
        if (!lo || !hi) continue;
        int64_t w = *hi - *lo;
        for (size_t i = 0; i < widths_.size(); ++i) {
          if (widths_[i] == w && *lo >= *origin_ && (*lo - *origin_) % w == 0) {
            out.push_back(static_cast<int>(i) + 1);
            return out;
          }
        }
      }
      return out;
    }
    case Kind::SuffixMask: {
      if (value.size() != static_cast<size_t>(code_length_)) return out;
      size_t stars = 0;
      while (stars < value.size() && value[value.size() - 1 - stars] == '*') ++stars;
      const size_t first = value.find('*');
      const bool canonical =
          stars == 0 ? first == std::string::npos : first == value.size() - stars;
      if (canonical) out.push_back(static_cast<int>(stars));
      return out;
    }
  }
  return out;
}

bool Hierarchy::is_ancestor(const std::string& a, const std::string& b) const {
  auto la = levels_of(a);
  auto lb = levels_of(b);
  if (la.empty())
    throw ValidationError("hierarchy '" + name_ + "': value '" + a + "' is not in the domain");
  if (lb.empty())
    throw ValidationError("hierarchy '" + name_ + "': value '" + b + "' is not in the domain");
  for (int i : la)
    for (int j : lb)
      if (i >= j && generalize_from(b, j, i) == a) return true;
  return false;
}

bool Hierarchy::related(const std::string& a, const std::string& b) const {
  return is_ancestor(a, b) || is_ancestor(b, a);
}

bool Hierarchy::related_strict(const std::string& a, const std::string& b) const {
  auto la = levels_of(a);
  auto lb = levels_of(b);
  if (la.empty())
    throw ValidationError("hierarchy '" + name_ + "': value '" + a + "' is not in the domain");
  if (lb.empty())
    throw ValidationError("hierarchy '" + name_ + "': value '" + b + "' is not in the domain");
  for (int i : la) {
    for (int j : lb) {
      if (i > j && generalize_from(b, j, i) == a) return true;
      if (j > i && generalize_from(a, i, j) == b) return true;
    }
  }
  return false;
}

HierarchySet HierarchySet::load(const std::filesystem::path& path) {
  json j = load_json_file(path);
  HierarchySet set;
  try {
    for (const auto& [name, spec] : j.at("hierarchies").items()) {
      const std::string kind = spec.at("kind").get<std::string>();
      if (kind == "mapping-table") {
        set.add(Hierarchy::mapping_table(
            name, spec.at("rows").get<std::vector<std::vector<std::string>>>()));
      } else if (kind == "interval") {
        std::optional<int64_t> origin;
        if (spec.contains("origin")) origin = spec.at("origin").get<int64_t>();
        std::string top = spec.value("top", "*");
        set.add(Hierarchy::interval(name, spec.at("widths").get<std::vector<int64_t>>(),
                                    origin, top));
      } else if (kind == "suffix-mask") {
        set.add(Hierarchy::suffix_mask(name, spec.at("length").get<int>()));
      } else {
        throw ValidationError(path.string() + ": unknown hierarchy kind '" + kind + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return set;
}

void HierarchySet::add(Hierarchy h) {
  auto name = h.name();
  if (!by_name_.emplace(name, std::move(h)).second)
    throw ValidationError("duplicate hierarchy name: " + name);
}

bool HierarchySet::contains(const std::string& name) const { return by_name_.count(name) > 0; }

const Hierarchy& HierarchySet::get(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ValidationError("unknown hierarchy: " + name);
  return it->second;
}

Hierarchy& HierarchySet::get_mutable(const std::string& name) {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw ValidationError("unknown hierarchy: " + name);
  return it->second;
}

void HierarchySet::resolve_origins(const Dataset& ds) {
  for (auto& [name, h] : by_name_) {
    if (!h.needs_origin()) continue;
    std::optional<int64_t> min_value;
    for (size_t c = 0; c < ds.schema.size(); ++c) {
      if (ds.schema.at(c).hierarchy != name) continue;
      for (const auto& row : ds.rows) {
        auto v = parse_int(row[c]);
        if (!v)
          throw ValidationError("hierarchy '" + name + "': non-integer value '" + row[c] +
                                "' in column '" + ds.schema.at(c).name + "'");
        if (!min_value || *v < *min_value) min_value = v;
      }
    }
    if (!min_value)
      throw ValidationError("hierarchy '" + name +
                            "': cannot derive an anchor, no data column uses it");
    // Anchor at the smallest value rounded down to a multiple of the
    // coarsest width, so every level's buckets share the same grid.
    int64_t wmax = h.widths().empty() ? 1 : h.widths().back();
    h.resolve_origin(floor_div(*min_value, wmax) * wmax);
  }
}

std::map<std::string, int64_t> HierarchySet::resolved_origins() const {
  std::map<std::string, int64_t> out;
  for (const auto& [name, h] : by_name_)
    if (h.kind() == Hierarchy::Kind::Interval && h.origin()) out[name] = *h.origin();
  return out;
}

std::vector<int> BoundHierarchies::level_counts() const {
  std::vector<int> out;
  out.reserve(rules.size());
  for (const auto* h : rules) out.push_back(h->level_count());
  return out;
}

BoundHierarchies bind_hierarchies(const Schema& schema, const HierarchySet& set) {
  BoundHierarchies bound;
  for (size_t i = 0; i < schema.size(); ++i) {
    const auto& attr = schema.at(i);
    if (attr.role == AttrRole::Sensitive) bound.sensitive_cols.push_back(i);
    if (attr.role != AttrRole::Quasi) continue;
    if (attr.hierarchy.empty())
      throw ValidationError("quasi attribute '" + attr.name + "' names no hierarchy");
    if (!set.contains(attr.hierarchy))
      throw ValidationError("quasi attribute '" + attr.name + "' references unknown hierarchy '" +
                            attr.hierarchy + "'");
    const Hierarchy& h = set.get(attr.hierarchy);
    if (h.needs_origin())
      throw ValidationError("hierarchy '" + attr.hierarchy +
                            "': interval anchor unresolved; resolve it against the population "
                            "or set an explicit origin");
    bound.quasi_names.push_back(attr.name);
    bound.quasi_cols.push_back(i);
    bound.rules.push_back(&h);
  }
  if (bound.quasi_count() > 8)
    throw ValidationError("at most 8 quasi attributes are supported, schema has " +
                          std::to_string(bound.quasi_count()));
  return bound;
}

BoundHierarchies bind_matching(const Schema& schema, const BoundHierarchies& reference,
                               const HierarchySet& set) {
  BoundHierarchies bound;
  for (size_t i = 0; i < schema.size(); ++i)
    if (schema.at(i).role == AttrRole::Sensitive) bound.sensitive_cols.push_back(i);
  for (size_t q = 0; q < reference.quasi_count(); ++q) {
    const std::string& name = reference.quasi_names[q];
    auto idx = schema.index_of(name);
    if (!idx)
      throw ValidationError("attribute '" + name + "' is missing from the schema");
    const auto& attr = schema.at(*idx);
    if (attr.role != AttrRole::Quasi)
      throw ValidationError("attribute '" + name + "' is not quasi in both schemas");
    if (attr.hierarchy != reference.rules[q]->name())
      throw ValidationError("attribute '" + name + "' is bound to hierarchy '" + attr.hierarchy +
                            "' here but '" + reference.rules[q]->name() + "' in the reference");
    bound.quasi_names.push_back(name);
    bound.quasi_cols.push_back(*idx);
    bound.rules.push_back(&set.get(attr.hierarchy));
  }
  return bound;
}

}  // namespace anonkit
