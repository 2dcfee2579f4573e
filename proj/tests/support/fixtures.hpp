#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/synthpop.hpp"

namespace anonkit::testing {

std::filesystem::path fixture_dir();
std::filesystem::path fixture(const std::string& name);

// The 7-record demo table (Name direct; Age, Gender, ZIP quasi).
Dataset table1();
Schema table1_schema();
HierarchySet table1_hierarchies();

// Gender mapping, 5-digit ZIP suffix masking, year-of-birth intervals
// (widths 2/4/8 anchored at 1976) — the running example domain.
HierarchySet voter_hierarchies();
Schema voter_schema(bool with_sensitive = false);

// A population where every generalization bucket at every lattice node holds
// the same number of records: `copies` records for each (zip, gender, yob)
// cell of a dense grid. Optional rare families sit in zip blocks far outside
// the grid, so they never link into views drawn from the grid region.
struct RareFamily {
  std::string zip;
  std::string gender;
  int yob = 0;
  int size = 0;
};

struct GridOptions {
  std::string zip_prefix = "10";  // grid zips: prefix + 000..(blocks*100-1)
  int zip_blocks = 4;             // 100 consecutive zips per block
  int yob_min = 1976;
  int yob_max = 2007;             // inclusive; span should divide evenly by 8
  int copies = 4;
  bool with_sensitive = true;
  std::vector<RareFamily> rare;
};

Dataset make_grid_population(const GridOptions& opt);
size_t grid_cell_count(const GridOptions& opt);  // rows in the dense part

// Random k-anonymization problem for oracle comparison: 2-4 quasi attributes
// of mixed hierarchy kinds plus sometimes a sensitive column.
struct RandomInstance {
  Schema schema;
  HierarchySet hierarchies;
  Dataset data;
};

RandomInstance make_random_instance(uint64_t seed, size_t max_rows = 500);

}  // namespace anonkit::testing
