// Times each OpenMP kernel against its serial reference on a synthetic
// table, plus a whole lattice search both ways. The parallel paths promise
// bit-identical results, so the benchmark doubles as a cheap equivalence
// check before printing speedups.

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "anonkit/anonymizer.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/kernels.hpp"
#include "anonkit/synthpop.hpp"

using namespace anonkit;

namespace {

PopulationSpec bench_spec() {
  PopulationSpec spec;
  spec.schema = Schema({{"gender", AttrRole::Quasi, AttrKind::Categorical, 0, "gender"},
                        {"zip", AttrRole::Quasi, AttrKind::FixedLengthCode, 5, "zip"},
                        {"yob", AttrRole::Quasi, AttrKind::Integer, 0, "yob"},
                        {"race", AttrRole::Quasi, AttrKind::Categorical, 0, "race"},
                        {"condition", AttrRole::Sensitive, AttrKind::Categorical, 0, ""}});

  GeneratorSpec gender;
  gender.type = GeneratorSpec::Type::Categorical;
  gender.values = {"Male", "Female"};
  gender.weights = {0.49, 0.51};

  GeneratorSpec zip;
  zip.type = GeneratorSpec::Type::Code;
  zip.prefixes = {"10", "11", "12", "13", "14", "15", "16", "17"};
  zip.code_length = 5;
  zip.zipf = true;
  zip.zipf_s = 1.0;
  zip.codes_per_prefix = 400;

  GeneratorSpec yob;
  yob.type = GeneratorSpec::Type::Year;
  yob.year_min = 1950;
  yob.year_max = 2005;

  GeneratorSpec race;
  race.type = GeneratorSpec::Type::Categorical;
  race.values = {"A", "B", "C", "D"};
  race.weights = {0.4, 0.3, 0.2, 0.1};

  GeneratorSpec condition;
  condition.type = GeneratorSpec::Type::Categorical;
  condition.values = {"flu", "cold", "migraine", "none"};
  condition.weights = {0.2, 0.2, 0.1, 0.5};

  spec.generators = {gender, zip, yob, race, condition};
  return spec;
}

HierarchySet bench_hierarchies() {
  HierarchySet set;
  set.add(Hierarchy::mapping_table("gender", {{"Male", "Person"}, {"Female", "Person"}}));
  set.add(Hierarchy::suffix_mask("zip", 5));
  set.add(Hierarchy::interval("yob", {2, 4, 8}, std::nullopt));
  set.add(Hierarchy::mapping_table(
      "race", {{"A", "Person"}, {"B", "Person"}, {"C", "Person"}, {"D", "Person"}}));
  return set;
}

template <typename F>
double median_ms(int reps, F&& body) {
  body();  // warm-up, also where equivalence checks fire
  std::vector<double> times;
  times.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto t0 = std::chrono::steady_clock::now();
    body();
    auto t1 = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

void print_row(const std::string& name, double serial_ms, double parallel_ms) {
  std::cout << std::left << std::setw(18) << name << std::right << std::fixed
            << std::setprecision(2) << std::setw(12) << serial_ms << std::setw(12) << parallel_ms
            << std::setw(10) << std::setprecision(2) << serial_ms / parallel_ms << "x\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs parallel kernel timings"};
  uint64_t rows = 200000;
  int reps = 5;
  uint64_t seed = 7;
  app.add_option("--rows", rows, "synthetic table size");
  app.add_option("--reps", reps, "repetitions per kernel (median reported)");
  app.add_option("--seed", seed, "population seed");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (built without OpenMP; parallel = serial path)\n";
#endif

  Dataset ds = generate_population(bench_spec(), rows, seed);
  HierarchySet set = bench_hierarchies();
  set.resolve_origins(ds);
  BoundHierarchies bound = bind_hierarchies(ds.schema, set);
  EncodedTable enc(ds, bound);

  const std::vector<int> node{0, 2, 1, 0};  // mid-lattice: many classes, real hash load
  std::cout << "rows: " << ds.size() << ", node " << node[0] << node[1] << node[2] << node[3]
            << ", median of " << reps << "\n\n";
  std::cout << std::left << std::setw(18) << "kernel" << std::right << std::setw(12)
            << "serial ms" << std::setw(12) << "parallel ms" << std::setw(11) << "speedup\n";

  {
    std::vector<uint32_t> a, b;
    double s = median_ms(reps, [&] { a = class_sizes_serial(enc, node); });
    double p = median_ms(reps, [&] { b = class_sizes_parallel(enc, node); });
    if (a != b) {
      std::cerr << "class_sizes: serial and parallel disagree\n";
      return 1;
    }
    print_row("class_sizes", s, p);
  }
  {
    GroupedClasses a, b;
    double s = median_ms(reps, [&] { a = group_records_serial(enc, node); });
    double p = median_ms(reps, [&] { b = group_records_parallel(enc, node); });
    if (a.keys != b.keys || a.members != b.members) {
      std::cerr << "group_records: serial and parallel disagree\n";
      return 1;
    }
    print_row("group_records", s, p);
  }
  {
    // Link a 5% sample's classes back against the full table.
    Dataset sampled = sample_uniform(ds, rows / 20, seed + 1);
    EncodedTable sample_enc(sampled, bound);
    auto grouped = group_records(sample_enc, node, Exec::Serial);
    std::vector<TupleKey> targets;
    targets.reserve(grouped.keys.size());
    for (const auto& key : grouped.keys) {
      auto tuple = sample_enc.tuple_of(key, node);
      if (auto translated = enc.translate(tuple, node)) targets.push_back(*translated);
    }
    std::vector<uint64_t> a, b;
    double s = median_ms(reps, [&] { a = count_matching_serial(enc, node, targets); });
    double p = median_ms(reps, [&] { b = count_matching_parallel(enc, node, targets); });
    if (a != b) {
      std::cerr << "count_matching: serial and parallel disagree\n";
      return 1;
    }
    print_row("count_matching", s, p);
  }
  {
    AnonymizedView a, b;
    double s = median_ms(
        reps, [&] { a = ola_search(ds, 10, 0.05, LossMetric::Precision, bound, Exec::Serial); });
    double p = median_ms(
        reps, [&] { b = ola_search(ds, 10, 0.05, LossMetric::Precision, bound, Exec::Parallel); });
    if (a.level_vector != b.level_vector || a.classes.size() != b.classes.size()) {
      std::cerr << "ola_search: serial and parallel disagree\n";
      return 1;
    }
    print_row("ola_search", s, p);
  }
  return 0;
}
