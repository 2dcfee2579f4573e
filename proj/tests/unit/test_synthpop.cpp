#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "anonkit/errors.hpp"
#include "anonkit/synthpop.hpp"

using namespace anonkit;
namespace fs = std::filesystem;

namespace {

GeneratorSpec categorical(std::vector<std::string> values, std::vector<double> weights) {
  GeneratorSpec g;
  g.type = GeneratorSpec::Type::Categorical;
  g.values = std::move(values);
  g.weights = std::move(weights);
  return g;
}

GeneratorSpec year(int64_t lo, int64_t hi) {
  GeneratorSpec g;
  g.type = GeneratorSpec::Type::Year;
  g.year_min = lo;
  g.year_max = hi;
  return g;
}

GeneratorSpec code(std::vector<std::string> prefixes, int length, bool zipf = false,
                   double s = 1.0, int per_prefix = 0) {
  GeneratorSpec g;
  g.type = GeneratorSpec::Type::Code;
  g.prefixes = std::move(prefixes);
  g.code_length = length;
  g.zipf = zipf;
  g.zipf_s = s;
  g.codes_per_prefix = per_prefix;
  return g;
}

PopulationSpec voter_spec() {
  PopulationSpec spec;
  spec.schema = Schema({{"Name", AttrRole::Direct, AttrKind::Categorical, 0, ""},
                        {"Gender", AttrRole::Quasi, AttrKind::Categorical, 0, ""},
                        {"ZIP", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, ""},
                        {"YOB", AttrRole::Quasi, AttrKind::Integer, 0, ""}});
  GeneratorSpec seq;
  seq.type = GeneratorSpec::Type::Sequence;
  seq.sequence_prefix = "p-";
  spec.generators = {seq, categorical({"Male", "Female"}, {0.49, 0.51}),
                     code({"10"}, 5, false, 1.0, 200), year(1950, 2005)};
  return spec;
}

}  // namespace

TEST_CASE("generation is a pure function of spec, size and seed") {
  PopulationSpec spec = voter_spec();
  Dataset a = generate_population(spec, 500, 42);
  Dataset b = generate_population(spec, 500, 42);
  Dataset c = generate_population(spec, 500, 43);
  CHECK(a.rows == b.rows);
  CHECK(a.rows != c.rows);
  CHECK(a.size() == 500);
  CHECK(a.schema.names() == std::vector<std::string>{"Name", "Gender", "ZIP", "YOB"});
}

TEST_CASE("categorical draws follow their weights") {
  PopulationSpec spec;
  spec.schema = Schema({{"V", AttrRole::Quasi, AttrKind::Categorical, 0, ""}});
  spec.generators = {categorical({"a", "b", "c"}, {0.5, 0.3, 0.2})};
  Dataset ds = generate_population(spec, 20000, 7);

  std::map<std::string, double> freq;
  for (const auto& row : ds.rows) freq[row[0]] += 1.0 / 20000.0;
  CHECK(freq["a"] == doctest::Approx(0.5).epsilon(0.05));
  CHECK(freq["b"] == doctest::Approx(0.3).epsilon(0.07));
  CHECK(freq["c"] == doctest::Approx(0.2).epsilon(0.10));
}

TEST_CASE("years stay inside the configured range and cover it") {
  PopulationSpec spec;
  spec.schema = Schema({{"Y", AttrRole::Quasi, AttrKind::Integer, 0, ""}});
  spec.generators = {year(1990, 1999)};
  Dataset ds = generate_population(spec, 5000, 3);

  std::set<std::string> seen;
  for (const auto& row : ds.rows) {
    const int y = std::stoi(row[0]);
    CHECK(y >= 1990);
    CHECK(y <= 1999);
    seen.insert(row[0]);
  }
  CHECK(seen.size() == 10);  // 5000 draws across 10 values miss none
}

TEST_CASE("sequence columns give every record a distinct identifier") {
  PopulationSpec spec = voter_spec();
  Dataset ds = generate_population(spec, 300, 9);
  std::set<std::string> names;
  for (size_t r = 0; r < ds.size(); ++r) {
    CHECK(ds.rows[r][0] == "p-" + std::to_string(r));
    names.insert(ds.rows[r][0]);
  }
  CHECK(names.size() == 300);
}

TEST_CASE("uniform codes enumerate capped zero-padded suffixes") {
  PopulationSpec spec;
  spec.schema = Schema({{"Z", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, ""}});
  spec.generators = {code({"10", "20"}, 5, false, 1.0, 100)};
  Dataset ds = generate_population(spec, 8000, 21);

  std::set<std::string> seen;
  for (const auto& row : ds.rows) {
    const std::string& z = row[0];
    REQUIRE(z.size() == 5);
    CHECK((z.substr(0, 2) == "10" || z.substr(0, 2) == "20"));
    CHECK(std::stoi(z.substr(2)) < 100);
    seen.insert(z);
  }
  CHECK(seen.size() == 200);  // 8000 draws over 200 codes cover all of them

  // Full-length prefixes are allowed and produce exactly that code.
  PopulationSpec exact;
  exact.schema = Schema({{"Z", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, ""}});
  exact.generators = {code({"99999"}, 5)};
  Dataset only = generate_population(exact, 10, 4);
  for (const auto& row : only.rows) CHECK(row[0] == "99999");
}

TEST_CASE("zipf codes produce a heavy head and a long tail") {
  PopulationSpec spec;
  spec.schema = Schema({{"Z", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, ""}});
  spec.generators = {code({"10"}, 5, true, 1.0, 1000)};
  const size_t n = 20000;
  Dataset ds = generate_population(spec, n, 12);

  std::map<std::string, size_t> counts;
  for (const auto& row : ds.rows) ++counts[row[0]];

  // Rank 1 is the first enumerated code; its mass is 1/H(1000) of the total.
  const double h1000 = [] {
    double h = 0.0;
    for (int r = 1; r <= 1000; ++r) h += 1.0 / r;
    return h;
  }();
  const double head = static_cast<double>(counts["10000"]) / static_cast<double>(n);
  CHECK(head == doctest::Approx(1.0 / h1000).epsilon(0.15));
  CHECK(counts["10000"] > counts["10009"]);
  CHECK(counts["10009"] > counts["10099"]);

  // The tail splinters into many small classes while the head is huge.
  size_t singletons = 0;
  for (const auto& [value, c] : counts)
    if (c <= 3) ++singletons;
  CHECK(singletons > 100);
  CHECK(counts["10000"] > 2000);
}

TEST_CASE("population specs load from JSON and validate") {
  auto dir = fs::temp_directory_path() / "anonkit-spec-test";
  fs::create_directories(dir);
  const auto path = dir / "population.json";
  {
    std::ofstream out(path);
    out << R"({
      "attributes": [
        {"name": "Name", "role": "direct", "kind": "categorical",
         "generator": {"type": "sequence", "prefix": "v-"}},
        {"name": "Gender", "role": "quasi", "kind": "categorical", "hierarchy": "gender",
         "generator": {"type": "categorical", "values": ["Male", "Female"],
                       "weights": [0.5, 0.5]}},
        {"name": "ZIP", "role": "quasi", "kind": "fixed-length-code", "length": 5,
         "hierarchy": "zip",
         "generator": {"type": "code", "prefixes": ["55"], "length": 5,
                       "distribution": "zipf", "zipf_s": 1.1, "codes_per_prefix": 50}},
        {"name": "YOB", "role": "quasi", "kind": "integer", "hierarchy": "yob",
         "generator": {"type": "year", "min": 1940, "max": 2000}}
      ]
    })";
  }
  PopulationSpec spec = load_population_spec(path);
  CHECK(spec.schema.size() == 4);
  CHECK(spec.schema.at(2).code_length == 5);
  CHECK(spec.schema.at(1).hierarchy == "gender");
  CHECK(spec.generators[2].zipf);
  CHECK(spec.generators[2].zipf_s == doctest::Approx(1.1));
  Dataset ds = generate_population(spec, 100, 1);
  CHECK(ds.size() == 100);

  fs::remove_all(dir);
}

TEST_CASE("ill-formed generators are rejected") {
  auto make = [](GeneratorSpec g) {
    PopulationSpec spec;
    spec.schema = Schema({{"X", AttrRole::Quasi, AttrKind::Categorical, 0, ""}});
    spec.generators = {std::move(g)};
    return spec;
  };

  CHECK_THROWS_AS(validate_population_spec(make(categorical({"a", "b"}, {0.6, 0.6}))),
                  ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(categorical({"a"}, {-1.0}))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(categorical({"a"}, {0.5, 0.5}))),
                  ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(categorical({}, {}))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(year(2000, 1990))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(code({"123456"}, 5))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(code({}, 5))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(code({"1"}, 0))), ValidationError);
  CHECK_THROWS_AS(validate_population_spec(make(code({"1"}, 3, true, -0.5))), ValidationError);

  PopulationSpec lopsided;
  lopsided.schema = Schema({{"A", AttrRole::Quasi, AttrKind::Categorical, 0, ""},
                            {"B", AttrRole::Quasi, AttrKind::Categorical, 0, ""}});
  lopsided.generators = {categorical({"a"}, {1.0})};
  CHECK_THROWS_AS(validate_population_spec(lopsided), ValidationError);
}
