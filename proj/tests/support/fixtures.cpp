#include "fixtures.hpp"

#include <stdexcept>

#include "anonkit/rng.hpp"

namespace anonkit::testing {

std::filesystem::path fixture_dir() {
#ifdef ANONKIT_FIXTURE_DIR
  return ANONKIT_FIXTURE_DIR;
#else
  throw std::logic_error("ANONKIT_FIXTURE_DIR not defined");
#endif
}

std::filesystem::path fixture(const std::string& name) { return fixture_dir() / name; }

Dataset table1() { return load_dataset(fixture("table1.csv"), table1_schema()); }

Schema table1_schema() { return load_schema(fixture("table1_schema.json")); }

HierarchySet table1_hierarchies() {
  return HierarchySet::load(fixture("table1_hierarchies.json"));
}

HierarchySet voter_hierarchies() {
  return HierarchySet::load(fixture("voter_hierarchies.json"));
}

Schema voter_schema(bool with_sensitive) {
  std::vector<AttributeSchema> attrs{
      {"Gender", AttrRole::Quasi, AttrKind::Categorical, 0, "gender"},
      {"ZIP", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, "zip"},
      {"YOB", AttrRole::Quasi, AttrKind::Integer, 0, "yob"},
  };
  if (with_sensitive)
    attrs.push_back({"Condition", AttrRole::Sensitive, AttrKind::Categorical, 0, ""});
  return Schema(std::move(attrs));
}

Dataset make_grid_population(const GridOptions& opt) {
  const Schema schema = voter_schema(opt.with_sensitive);
  static const std::vector<std::string> conditions{"flu", "cold", "migraine", "none"};
  std::vector<std::vector<std::string>> rows;
  rows.reserve(grid_cell_count(opt) * opt.copies);

  size_t serial = 0;
  auto add_row = [&](const std::string& gender, const std::string& zip, int yob) {
    std::vector<std::string> row{gender, zip, std::to_string(yob)};
    if (opt.with_sensitive) row.push_back(conditions[serial % conditions.size()]);
    ++serial;
    rows.push_back(std::move(row));
  };

  for (int z = 0; z < opt.zip_blocks * 100; ++z) {
    std::string num = std::to_string(z);
    num.insert(0, 3 - num.size(), '0');
    const std::string zip = opt.zip_prefix + num;
    for (const char* gender : {"Male", "Female"})
      for (int yob = opt.yob_min; yob <= opt.yob_max; ++yob)
        for (int c = 0; c < opt.copies; ++c) add_row(gender, zip, yob);
  }
  for (const auto& family : opt.rare)
    for (int i = 0; i < family.size; ++i) add_row(family.gender, family.zip, family.yob);

  return make_dataset(schema, std::move(rows));
}

size_t grid_cell_count(const GridOptions& opt) {
  return static_cast<size_t>(opt.zip_blocks) * 100 * 2 *
         static_cast<size_t>(opt.yob_max - opt.yob_min + 1);
}

namespace {

// A random mapping-table hierarchy: a tree with shrinking level sizes.
Hierarchy random_mapping(Rng& rng, const std::string& name, int attr_tag) {
  const int domain = 4 + static_cast<int>(rng.below(7));   // 4..10 raw values
  const int levels = 2 + static_cast<int>(rng.below(3));   // 2..4 levels
  std::vector<int> level_sizes{domain};
  for (int l = 1; l < levels - 1; ++l)
    level_sizes.push_back(std::max<int>(1, level_sizes.back() / (2 + static_cast<int>(rng.below(2)))));
  level_sizes.push_back(1);

  // parent_of[l][i]: parent index of value i at level l.
  std::vector<std::vector<int>> parent_of(levels - 1);
  for (int l = 0; l + 1 < levels; ++l) {
    parent_of[l].resize(level_sizes[l]);
    for (int i = 0; i < level_sizes[l]; ++i)
      parent_of[l][i] = static_cast<int>(rng.below(level_sizes[l + 1]));
  }

  auto label = [&](int level, int idx) {
    return "a" + std::to_string(attr_tag) + "L" + std::to_string(level) + "v" +
           std::to_string(idx);
  };
  std::vector<std::vector<std::string>> rows;
  for (int v = 0; v < domain; ++v) {
    std::vector<std::string> chain{label(0, v)};
    int idx = v;
    for (int l = 0; l + 1 < levels; ++l) {
      idx = parent_of[l][idx];
      chain.push_back(label(l + 1, idx));
    }
    rows.push_back(std::move(chain));
  }
  return Hierarchy::mapping_table(name, std::move(rows));
}

}  // namespace

RandomInstance make_random_instance(uint64_t seed, size_t max_rows) {
  Rng rng(derive_seed(seed, "instance"));
  RandomInstance inst;

  const int quasi = 2 + static_cast<int>(rng.below(3));  // 2..4
  std::vector<AttributeSchema> attrs;
  struct Domain {
    int kind;  // 0 mapping, 1 interval, 2 suffix
    std::vector<std::string> values;
  };
  std::vector<Domain> domains;

  for (int a = 0; a < quasi; ++a) {
    const int kind = static_cast<int>(rng.below(3));
    const std::string hname = "h" + std::to_string(a);
    Domain dom;
    dom.kind = kind;
    if (kind == 0) {
      Hierarchy h = random_mapping(rng, hname, a);
      for (int v = 0;; ++v) {
        std::string raw = "a" + std::to_string(a) + "L0v" + std::to_string(v);
        if (!h.in_domain(raw)) break;
        dom.values.push_back(raw);
      }
      inst.hierarchies.add(std::move(h));
      attrs.push_back({"cat" + std::to_string(a), AttrRole::Quasi, AttrKind::Categorical, 0, hname});
    } else if (kind == 1) {
      const int64_t w1 = 2 + static_cast<int64_t>(rng.below(2));        // 2..3
      const int64_t w2 = w1 * (2 + static_cast<int64_t>(rng.below(2))); // nests
      std::vector<int64_t> widths{w1};
      if (rng.below(2)) widths.push_back(w2);
      inst.hierarchies.add(Hierarchy::interval(hname, widths, 0));
      const int span = 12 + static_cast<int>(rng.below(20));
      for (int v = 0; v < span; ++v) dom.values.push_back(std::to_string(v));
      attrs.push_back({"num" + std::to_string(a), AttrRole::Quasi, AttrKind::Integer, 0, hname});
    } else {
      inst.hierarchies.add(Hierarchy::suffix_mask(hname, 3));
      // Digits 0..2 only, so masked codes collide often.
      for (char c0 = '0'; c0 <= '2'; ++c0)
        for (char c1 = '0'; c1 <= '2'; ++c1)
          for (char c2 = '0'; c2 <= '2'; ++c2)
            dom.values.push_back(std::string{c0, c1, c2});
      attrs.push_back({"code" + std::to_string(a), AttrRole::Quasi, AttrKind::FixedLengthCode, 3, hname});
    }
    domains.push_back(std::move(dom));
  }

  const bool sensitive = rng.below(2) == 0;
  if (sensitive) attrs.push_back({"note", AttrRole::Sensitive, AttrKind::Categorical, 0, ""});

  const size_t n = 30 + rng.below(max_rows > 30 ? max_rows - 30 + 1 : 1);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(n);
  static const std::vector<std::string> notes{"n1", "n2", "n3"};
  for (size_t r = 0; r < n; ++r) {
    std::vector<std::string> row;
    for (const auto& dom : domains) row.push_back(dom.values[rng.below(dom.values.size())]);
    if (sensitive) row.push_back(notes[rng.below(notes.size())]);
    rows.push_back(std::move(row));
  }

  inst.schema = Schema(std::move(attrs));
  inst.data = make_dataset(inst.schema, std::move(rows));
  return inst;
}

}  // namespace anonkit::testing
