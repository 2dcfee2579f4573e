#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anonkit/dataset.hpp"

namespace anonkit {

// Column generators for synthetic population data. "code" can follow a
// Zipf-like rank distribution so the table gets both huge and tiny
// equivalence classes, which is what linkage experiments need.
struct GeneratorSpec {
  enum class Type { Categorical, Year, Code, Sequence };
  Type type = Type::Categorical;

  // categorical
  std::vector<std::string> values;
  std::vector<double> weights;  // must sum to 1

  // year: uniform integer in [min, max]
  int64_t year_min = 0;
  int64_t year_max = 0;

  // code: fixed-length strings <prefix><digits>, drawn uniformly or by rank
  std::vector<std::string> prefixes;
  int code_length = 0;
  bool zipf = false;
  double zipf_s = 1.0;
  int codes_per_prefix = 0;  // 0 = every possible suffix

  // sequence: unique "<prefix><row>" values (direct identifiers)
  std::string sequence_prefix;
};

struct PopulationSpec {
  Schema schema;
  std::vector<GeneratorSpec> generators;  // aligned with schema attributes
};

PopulationSpec load_population_spec(const std::filesystem::path& path);
void validate_population_spec(const PopulationSpec& spec);

Dataset generate_population(const PopulationSpec& spec, size_t n, uint64_t seed);

}  // namespace anonkit
