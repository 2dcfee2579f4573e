#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "anonkit/anonymizer.hpp"
#include "anonkit/errors.hpp"
#include "anonkit/linkage.hpp"
#include "fixtures.hpp"
#include "oracle.hpp"

using namespace anonkit;
namespace fs = std::filesystem;

namespace {

struct LinkFixture {
  Dataset population;
  Dataset sample;
  HierarchySet hierarchies;
  AnonymizedView view;
  BoundHierarchies pop_bound;
};

LinkFixture make_fixture(uint64_t seed, int k) {
  LinkFixture f;
  testing::GridOptions opt;
  opt.copies = 3;
  // Far-off families sized between k and the grid bucket size: too small to
  // surface in the sample, big enough to shelter decoys.
  opt.rare = {{"20000", "Male", 1980, 10},   {"30000", "Female", 1984, 16},
              {"40000", "Male", 1990, 24},   {"50000", "Female", 1979, 40},
              {"60000", "Male", 2001, 64},   {"70000", "Female", 1995, 100}};
  f.population = testing::make_grid_population(opt);
  f.sample = sample_uniform(f.population, 1500, seed);
  f.hierarchies = testing::voter_hierarchies();
  f.hierarchies.resolve_origins(f.population);

  auto bound = bind_hierarchies(f.sample.schema, f.hierarchies);
  f.view = ola_search(f.sample, k, 0.01, LossMetric::Precision, bound);
  f.pop_bound = bind_matching(f.population.schema, bound, f.hierarchies);
  return f;
}

}  // namespace

namespace {

std::vector<oracle::Tuple> view_tuples(const AnonymizedView& view) {
  std::vector<oracle::Tuple> tuples;
  for (const auto& c : view.classes) tuples.push_back(c.tuple);
  return tuples;
}

}  // namespace

TEST_CASE("population links match a row-by-row recount") {
  for (uint64_t seed : {41, 42, 43}) {
    auto f = make_fixture(seed, 8);
    LinkageReport report = link_classes(f.view, f.population, f.pop_bound);
    REQUIRE(report.per_class_links.size() == f.view.classes.size());

    auto expected = oracle::feasibility(f.population, f.pop_bound, view_tuples(f.view),
                                        f.view.level_vector, 8);
    for (size_t i = 0; i < f.view.classes.size(); ++i) {
      CHECK(report.per_class_links[i] == expected.links.at(f.view.classes[i].tuple));
      // The sample is drawn from the population, so every class links to at
      // least its own members.
      CHECK(report.per_class_links[i] >= f.view.classes[i].size());
    }
    CHECK(report.min_link == expected.min_link);
    if (expected.min_link == 0) {
      CHECK(std::isinf(report.max_risk));
    } else {
      CHECK(report.max_risk == doctest::Approx(1.0 / expected.min_link));
    }
  }
}

TEST_CASE("candidate discovery matches the reference sweep") {
  for (uint64_t seed : {51, 52, 53, 54}) {
    auto f = make_fixture(seed, 8);
    LinkageReport report = link_classes(f.view, f.population, f.pop_bound);
    auto candidates =
        discover_candidates(f.population, f.view, 8, report.min_link, f.pop_bound);
    auto expected = oracle::feasibility(f.population, f.pop_bound, view_tuples(f.view),
                                        f.view.level_vector, 8);

    CHECK(!candidates.empty());  // the planted families must surface
    REQUIRE(candidates.size() == expected.candidates.size());
    // Both sides are sorted by tuple, so they align position by position.
    size_t i = 0;
    for (const auto& [tuple, truth] : expected.candidates) {
      CHECK(candidates[i].tuple == tuple);
      CHECK(candidates[i].members == truth.first);
      CHECK(candidates[i].risk_factor == doctest::Approx(truth.second).epsilon(1e-12));
      ++i;
    }

    for (const auto& c : candidates) {
      CHECK(c.members.size() >= 8);
      CHECK(c.members.size() < static_cast<size_t>(report.min_link));
      CHECK(c.risk_factor > 1.0);
      CHECK(c.risk_factor <= static_cast<double>(report.min_link) / 8.0);
      CHECK(std::is_sorted(c.members.begin(), c.members.end()));
    }

    auto profile = risk_profile(candidates);
    CHECK(profile.size() == candidates.size());
    CHECK(std::is_sorted(profile.begin(), profile.end()));
  }
}

TEST_CASE("no candidates exist when the floor already sits at k") {
  // Use the population itself as the sample: every class links to exactly its
  // own size, so min_link equals the smallest class and nothing qualifies.
  testing::GridOptions opt;
  opt.zip_blocks = 2;
  opt.copies = 2;
  Dataset population = testing::make_grid_population(opt);
  HierarchySet set = testing::voter_hierarchies();
  set.resolve_origins(population);

  auto bound = bind_hierarchies(population.schema, set);
  AnonymizedView view = ola_search(population, 2, 0.0, LossMetric::Precision, bound);
  LinkageReport report = link_classes(view, population, bound);
  size_t smallest = view.classes.front().size();
  for (const auto& c : view.classes) smallest = std::min(smallest, c.size());
  CHECK(report.min_link == smallest);

  auto candidates = discover_candidates(population, view, 2, report.min_link, bound);
  CHECK(candidates.empty());
}

TEST_CASE("unmatched classes read as infinite risk") {
  // Link against a population from a disjoint ZIP region: nothing matches
  // unless the view wiped the whole ZIP column, which k=8 never forces here.
  auto f = make_fixture(61, 8);
  REQUIRE(f.view.level_vector[1] < 5);  // ZIP keeps at least its first digit
  testing::GridOptions opt;
  opt.zip_prefix = "90";
  opt.zip_blocks = 1;
  opt.copies = 1;
  Dataset foreign = testing::make_grid_population(opt);
  auto foreign_bound = bind_matching(foreign.schema, f.pop_bound, f.hierarchies);

  LinkageReport report = link_classes(f.view, foreign, foreign_bound);
  for (size_t links : report.per_class_links) CHECK(links == 0);
  CHECK(report.min_link == 0);
  CHECK(std::isinf(report.max_risk));
}

TEST_CASE("feasibility artifacts round trip through disk") {
  auto f = make_fixture(71, 8);
  LinkageReport report = link_classes(f.view, f.population, f.pop_bound);
  auto candidates =
      discover_candidates(f.population, f.view, 8, report.min_link, f.pop_bound);
  FeasibilityResult result{report, candidates, f.view.k, f.view.level_vector,
                           f.view.quasi_attributes};

  auto dir = fs::temp_directory_path() / "anonkit-feas-test";
  fs::create_directories(dir);
  save_feasibility(result, f.view, dir / "feasibility.json");
  FeasibilityResult again = load_feasibility(dir / "feasibility.json");

  CHECK(again.k == result.k);
  CHECK(again.level_vector == result.level_vector);
  CHECK(again.quasi_attributes == result.quasi_attributes);
  CHECK(again.report.per_class_links == result.report.per_class_links);
  CHECK(again.report.min_link == result.report.min_link);
  REQUIRE(again.candidates.size() == result.candidates.size());
  for (size_t i = 0; i < result.candidates.size(); ++i) {
    CHECK(again.candidates[i].tuple == result.candidates[i].tuple);
    CHECK(again.candidates[i].members == result.candidates[i].members);
    CHECK(again.candidates[i].risk_factor ==
          doctest::Approx(result.candidates[i].risk_factor));
  }
  fs::remove_all(dir);
}

TEST_CASE("an empty view cannot be linked") {
  auto f = make_fixture(81, 8);
  AnonymizedView empty = f.view;
  empty.classes.clear();
  CHECK_THROWS_AS(link_classes(empty, f.population, f.pop_bound), ValidationError);
}
