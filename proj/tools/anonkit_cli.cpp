// Command-line front end for the anonymization + decoy pipeline. Every
// subcommand is a thin orchestration layer over the library; all policy
// checks and artifact formats live there. Exit codes: 0 ok, 2 validation,
// 3 capacity/budget, 4 I/O.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "anonkit/anonymizer.hpp"
#include "anonkit/attribution.hpp"
#include "anonkit/collusion.hpp"
#include "anonkit/csv.hpp"
#include "anonkit/dataset.hpp"
#include "anonkit/decoy.hpp"
#include "anonkit/errors.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/json_util.hpp"
#include "anonkit/linkage.hpp"
#include "anonkit/rng.hpp"
#include "anonkit/synthpop.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace anonkit;

namespace {

std::string format_lv(const std::vector<int>& lv) {
  std::string s = "(";
  for (size_t i = 0; i < lv.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(lv[i]);
  }
  return s + ")";
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

// Tables with and without a leading record_id column both occur (synthpop
// emits ids, release tables do not), so loading sniffs the header.
Dataset load_table(const fs::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  std::getline(in, header);
  in.close();
  auto fields = split_fields(header, ',');
  const bool with_ids = !fields.empty() && fields.front() == "record_id";
  return with_ids ? load_dataset_with_ids(path, schema) : load_dataset(path, schema);
}

// Re-anchors interval rules the way the view's producer did, so tuples from
// the view land on the same bucket grid. Anything still unanchored falls
// back to the dataset at hand.
void apply_view_origins(HierarchySet& set, const AnonymizedView& view) {
  for (const auto& [name, origin] : view.resolved_origins)
    if (set.contains(name) && set.get(name).needs_origin())
      set.get_mutable(name).resolve_origin(origin);
}

bool path_inside(const fs::path& candidate, const fs::path& dir) {
  const fs::path c = fs::weakly_canonical(candidate);
  const fs::path d = fs::weakly_canonical(dir);
  for (fs::path cur = c.parent_path();; cur = cur.parent_path()) {
    if (cur == d) return true;
    if (cur == cur.parent_path()) return false;
  }
}

struct Stat {
  std::vector<double> xs;
  void add(double x) { xs.push_back(x); }
  double mean() const {
    if (xs.empty()) return 0.0;
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
  }
  double sd() const {  // sample standard deviation (n-1)
    if (xs.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
  }
};

std::string stat_cell(const Stat& s, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << s.mean() << "±" << s.sd();
  return os.str();
}

// ---------------------------------------------------------------- synthpop

struct SynthpopOpts {
  std::string spec, out;
  uint64_t n = 0;
  uint64_t seed = 1;
};

void run_synthpop(const SynthpopOpts& o) {
  PopulationSpec spec = load_population_spec(o.spec);
  Dataset pop = generate_population(spec, o.n, o.seed);
  save_dataset(pop, o.out, /*with_record_ids=*/true);
  std::cout << "wrote " << pop.size() << " records, " << pop.schema.size()
            << " attributes -> " << o.out << "\n";
}

// ---------------------------------------------------------------- anonymize

struct AnonymizeOpts {
  std::string data, schema, hierarchies, out;
  int k = 2;
  double suppression = 0.0;
  std::string metric = "precision";
  uint64_t sample = 0;  // 0 = use the whole table
  uint64_t seed = 1;
};

void run_anonymize(const AnonymizeOpts& o) {
  Schema schema = load_schema(o.schema);
  Dataset ds = load_table(o.data, schema);
  HierarchySet set = HierarchySet::load(o.hierarchies);
  // Anchor intervals against the full table before sampling, so a view built
  // from a sample still lines up with the population in later linkage steps.
  set.resolve_origins(ds);

  Dataset work = o.sample ? sample_uniform(ds, o.sample, derive_seed(o.seed, "sample"))
                          : std::move(ds);
  BoundHierarchies bound = bind_hierarchies(schema, set);
  AnonymizedView view =
      ola_search(work, o.k, o.suppression, loss_metric_from_string(o.metric), bound);
  view.resolved_origins = set.resolved_origins();
  save_view(view, o.out);

  std::cout << "node " << format_lv(view.level_vector) << "  classes " << view.classes.size()
            << "  retained " << view.retained() << "/" << view.source_size << "  suppressed "
            << view.suppressed.size() << "\n";
  std::cout << std::fixed << std::setprecision(4) << "loss  precision " << view.loss.precision
            << "  discernibility " << view.loss.discernibility << "  avg-class-size "
            << std::setprecision(2) << view.loss.avg_class_size << "\n";
  std::cout << "view -> " << o.out << ".csv / " << o.out << ".manifest.json\n";
}

// ---------------------------------------------------------------- feasibility

struct FeasibilityOpts {
  std::string view, population, population_schema, hierarchies, out;
};

void run_feasibility(const FeasibilityOpts& o) {
  AnonymizedView view = load_view(o.view);
  Schema pop_schema = load_schema(o.population_schema);
  Dataset population = load_table(o.population, pop_schema);
  HierarchySet set = HierarchySet::load(o.hierarchies);
  apply_view_origins(set, view);
  set.resolve_origins(population);

  BoundHierarchies view_bound = bind_hierarchies(view.schema, set);
  BoundHierarchies pop_bound = bind_matching(pop_schema, view_bound, set);

  LinkageReport report = link_classes(view, population, pop_bound);
  std::vector<DecoyCandidate> candidates =
      discover_candidates(population, view, view.k, report.min_link, pop_bound);

  FeasibilityResult result;
  result.report = report;
  result.candidates = candidates;
  result.k = view.k;
  result.level_vector = view.level_vector;
  result.quasi_attributes = view.quasi_attributes;
  save_feasibility(result, view, o.out);

  size_t candidate_records = 0;
  for (const auto& c : candidates) candidate_records += c.size();
  std::cout << std::setw(10) << "minLink" << std::setw(14) << "<minLink EQ" << std::setw(19)
            << "<minLink Records" << "\n";
  std::cout << std::setw(10) << report.min_link << std::setw(14) << candidates.size()
            << std::setw(19) << candidate_records << "\n";
  if (report.min_link == 0)
    std::cout << "max re-identification risk: infinite (some class links to nobody)\n";
  else
    std::cout << "max re-identification risk: 1/" << report.min_link << " = " << std::fixed
              << std::setprecision(6) << report.max_risk << "\n";

  if (!candidates.empty()) {
    // Ascending risk profile, collapsed by distinct factor.
    std::map<double, std::pair<size_t, size_t>> by_factor;  // factor -> classes, records
    for (const auto& c : candidates) {
      auto& [n_classes, n_records] = by_factor[c.risk_factor];
      ++n_classes;
      n_records += c.size();
    }
    std::cout << "risk profile (ascending):\n";
    for (const auto& [factor, counts] : by_factor)
      std::cout << "  factor " << std::fixed << std::setprecision(3) << factor << "  classes "
                << counts.first << "  records " << counts.second << "\n";
  }
  std::cout << "feasibility -> " << o.out << "\n";
}

// ---------------------------------------------------------------- release

struct ReleaseOpts {
  std::string view, feasibility, out_dir, registry;
  std::vector<std::string> recipients;
  std::string recipients_file;
  int n_d = 1;
  int records_per_class = 0;
  double risk_lo = 1.0;
  double risk_hi = std::numeric_limits<double>::infinity();
  double pool_fraction = 0.0;
  std::string harden;  // empty = no hardening
  int n_e = 1;
  double budget = 1.0;
  uint64_t seed = 1;
};

void run_release(const ReleaseOpts& o) {
  AnonymizedView view = load_view(o.view);
  FeasibilityResult feas = load_feasibility(o.feasibility);
  if (feas.k != view.k || feas.level_vector != view.level_vector)
    throw ValidationError("feasibility artifact was computed for a different view (k=" +
                          std::to_string(feas.k) + ", node " + format_lv(feas.level_vector) +
                          ")");

  std::vector<std::string> recipients = o.recipients;
  if (!o.recipients_file.empty()) {
    std::ifstream in(o.recipients_file);
    if (!in) throw IoError("cannot open " + o.recipients_file);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) recipients.push_back(line);
  }
  if (recipients.empty()) throw ValidationError("no recipients given");

  // The registry is the owner's secret; writing it into the directory that
  // ships to recipients would defeat the whole scheme.
  if (path_inside(o.registry, o.out_dir))
    throw ValidationError("registry path " + o.registry + " lies inside the release directory " +
                          o.out_dir);

  DecoyPolicy policy;
  policy.n_d = o.n_d;
  policy.records_per_class = o.records_per_class;
  policy.risk_lo = o.risk_lo;
  policy.risk_hi = o.risk_hi;
  policy.pool_fraction = o.pool_fraction;
  policy.seed = o.seed;

  std::optional<HardeningPolicy> hardening;
  if (!o.harden.empty()) {
    HardeningPolicy h;
    h.strategy = removal_strategy_from_string(o.harden);
    h.n_e = o.n_e;
    h.budget = o.budget;
    h.seed = o.seed;
    hardening = h;
  }

  ReleaseSet set = build_releases(view, feas.candidates, recipients, policy, hardening);
  save_releases(set, view, o.out_dir);
  save_registry(set.registry, o.registry);

  for (const auto& r : set.releases)
    std::cout << r.recipient_id << ": " << r.table.size() << " rows, "
              << r.decoy_signatures.size() << " decoy classes, " << r.removed_signatures.size()
              << " classes withheld\n";
  std::cout << "releases -> " << o.out_dir << "\nregistry -> " << o.registry << "\n";
}

// ---------------------------------------------------------------- collude

struct ColludeOpts {
  std::string releases_dir, hierarchies, out;
  std::string mode = "any-peer";
  bool strict = false;
};

SuspectMode suspect_mode_from_string(const std::string& s) {
  if (s == "any-peer") return SuspectMode::AnyPeer;
  if (s == "all-peers") return SuspectMode::AllPeers;
  throw ValidationError("unknown suspect mode: " + s);
}

void run_collude(const ColludeOpts& o) {
  std::vector<fs::path> manifests;
  if (!fs::is_directory(o.releases_dir))
    throw IoError(o.releases_dir + " is not a directory");
  for (const auto& entry : fs::directory_iterator(o.releases_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > 14 && name.ends_with(".manifest.json"))
      manifests.push_back(entry.path());
  }
  std::sort(manifests.begin(), manifests.end());
  if (manifests.size() < 2)
    throw ValidationError("collusion needs at least two releases, found " +
                          std::to_string(manifests.size()));

  HierarchySet set = HierarchySet::load(o.hierarchies);

  int k = 0;
  std::optional<BoundHierarchies> first_bound;
  Schema first_schema;
  std::vector<ReleaseClasses> releases;
  std::vector<std::string> ids;
  for (const auto& path : manifests) {
    json j = load_json_file(path);
    if (j.value("artifact", "") != "recipient-release")
      throw ValidationError(path.string() + ": not a release manifest");
    const std::string id = j.at("recipient_id").get<std::string>();
    Schema schema = schema_from_json(j.at("schema"));
    const int this_k = j.at("k").get<int>();
    if (releases.empty()) {
      k = this_k;
      first_schema = schema;
      first_bound = bind_hierarchies(first_schema, set);
    } else if (this_k != k) {
      throw ValidationError("releases disagree on k (" + std::to_string(k) + " vs " +
                            std::to_string(this_k) + ")");
    }
    BoundHierarchies bound = bind_matching(schema, *first_bound, set);
    Dataset table = load_dataset(path.parent_path() / (id + ".csv"), schema);
    releases.push_back(classes_of_release(id, table, bound));
    ids.push_back(id);
  }

  const SuspectMode mode = suspect_mode_from_string(o.mode);
  auto suspects = collude(releases, *first_bound, mode, o.strict);

  AttackReport report;
  report.release_ids = ids;
  report.suspects = suspects;
  report.k = k;
  report.mode = mode;
  report.strict = o.strict;
  for (const auto& r : releases) {
    std::vector<size_t> sizes;
    sizes.reserve(r.classes.size());
    for (const auto& c : r.classes) sizes.push_back(c.size());
    report.close_to_k.push_back(close_to_k_census(sizes, k));
    report.histograms.push_back(size_histogram(sizes));
  }
  save_attack_report(report, o.out);

  for (size_t r = 0; r < releases.size(); ++r) {
    std::cout << ids[r] << ": " << suspects[r].size() << " suspect classes, closeToK ["
              << k << "," << close_to_k_upper(k) << "] holds " << report.close_to_k[r]
              << " of " << releases[r].classes.size() << " classes\n";
    for (const auto& tuple : suspects[r]) std::cout << "  suspect " << join(tuple, ",") << "\n";
  }
  std::cout << "attack report -> " << o.out << "\n";
}

// ---------------------------------------------------------------- attribute

struct AttributeOpts {
  std::string registry, leak, out;
  std::string format = "auto";
  double floor = 0.5;
};

void run_attribute(const AttributeOpts& o) {
  DecoyRegistry registry = load_registry(o.registry);

  std::string format = o.format;
  if (format == "auto") format = fs::path(o.leak).extension() == ".csv" ? "csv" : "text";

  std::vector<DecoyMatch> matches;
  if (format == "csv") {
    matches = scan_dataset(read_csv(o.leak), registry);
  } else if (format == "text") {
    std::ifstream in(o.leak);
    if (!in) throw IoError("cannot open " + o.leak);
    matches = scan_text(in, registry);
  } else {
    throw ValidationError("unknown leak format: " + o.format);
  }

  Verdict verdict = attribute_matches(matches, registry, o.floor);
  save_verdict(verdict, o.out);

  std::cout << matches.size() << " decoy sighting(s) in " << o.leak << "\n";
  for (const auto& s : verdict.ranking)
    std::cout << "  " << s.recipient << ": " << s.matched << "/" << s.total
              << " signatures, fraction " << std::fixed << std::setprecision(2) << s.fraction
              << "\n";
  if (verdict.culprit)
    std::cout << "verdict: " << *verdict.culprit << "\n";
  else
    std::cout << "verdict: no evidence\n";
  std::cout << "verdict -> " << o.out << "\n";
}

// ---------------------------------------------------------------- report

struct ReportOpts {
  std::string spec, hierarchies, out;
  uint64_t population = 100000;
  uint64_t sample = 5000;
  uint64_t runs = 50;
  std::vector<int> ks{2, 5, 10};
  std::vector<double> suppressions{0.0, 0.02, 0.05};
  std::string metric = "precision";
  uint64_t seed = 1;
};

void run_report(const ReportOpts& o) {
  if (o.runs == 0) throw ValidationError("--runs must be positive");
  const LossMetric metric = loss_metric_from_string(o.metric);

  PopulationSpec spec = load_population_spec(o.spec);
  Dataset population = generate_population(spec, o.population, o.seed);
  HierarchySet set = HierarchySet::load(o.hierarchies);
  set.resolve_origins(population);
  BoundHierarchies bound = bind_hierarchies(population.schema, set);

  struct Cell {
    Stat loss, suppressed, classes, min_link, cand_classes, cand_records;
  };
  std::vector<Cell> cells(o.ks.size() * o.suppressions.size());

  // The same sample sequence feeds every (k, suppression) setting, so cells
  // differ only by policy, not by draw.
  for (uint64_t run = 0; run < o.runs; ++run) {
    Dataset sample = sample_uniform(population, o.sample,
                                    derive_seed(o.seed, "sample:" + std::to_string(run)));
    for (size_t ki = 0; ki < o.ks.size(); ++ki) {
      for (size_t si = 0; si < o.suppressions.size(); ++si) {
        AnonymizedView view = ola_search(sample, o.ks[ki], o.suppressions[si], metric, bound);
        LinkageReport link = link_classes(view, population, bound);
        auto candidates =
            discover_candidates(population, view, view.k, link.min_link, bound);
        size_t cand_records = 0;
        for (const auto& c : candidates) cand_records += c.size();

        Cell& cell = cells[ki * o.suppressions.size() + si];
        double loss = 0.0;
        switch (metric) {
          case LossMetric::Precision: loss = view.loss.precision; break;
          case LossMetric::Discernibility:
            loss = static_cast<double>(view.loss.discernibility);
            break;
          case LossMetric::AvgClassSize: loss = view.loss.avg_class_size; break;
        }
        cell.loss.add(loss);
        cell.suppressed.add(static_cast<double>(view.suppressed.size()) /
                            static_cast<double>(view.source_size));
        cell.classes.add(static_cast<double>(view.classes.size()));
        cell.min_link.add(static_cast<double>(link.min_link));
        cell.cand_classes.add(static_cast<double>(candidates.size()));
        cell.cand_records.add(static_cast<double>(cand_records));
      }
    }
  }

  std::cout << std::setw(4) << "k" << std::setw(7) << "supp" << std::setw(18)
            << ("loss(" + o.metric + ")") << std::setw(16) << "suppressed" << std::setw(15)
            << "classes" << std::setw(17) << "minLink" << std::setw(14) << "cand EQ"
            << std::setw(16) << "cand records" << "\n";
  json jcells = json::array();
  for (size_t ki = 0; ki < o.ks.size(); ++ki) {
    for (size_t si = 0; si < o.suppressions.size(); ++si) {
      const Cell& cell = cells[ki * o.suppressions.size() + si];
      std::ostringstream supp;
      supp << std::setprecision(3) << o.suppressions[si];
      std::cout << std::setw(4) << o.ks[ki] << std::setw(7) << supp.str() << std::setw(18)
                << stat_cell(cell.loss, 4) << std::setw(16) << stat_cell(cell.suppressed, 4)
                << std::setw(15) << stat_cell(cell.classes, 1) << std::setw(17)
                << stat_cell(cell.min_link, 1) << std::setw(14) << stat_cell(cell.cand_classes, 1)
                << std::setw(16) << stat_cell(cell.cand_records, 1) << "\n";

      auto stat_json = [](const Stat& s) { return json{{"mean", s.mean()}, {"sd", s.sd()}}; };
      jcells.push_back(json{{"k", o.ks[ki]},
                            {"suppression", o.suppressions[si]},
                            {"loss", stat_json(cell.loss)},
                            {"suppressed_fraction", stat_json(cell.suppressed)},
                            {"classes", stat_json(cell.classes)},
                            {"min_link", stat_json(cell.min_link)},
                            {"candidate_classes", stat_json(cell.cand_classes)},
                            {"candidate_records", stat_json(cell.cand_records)}});
    }
  }

  if (!o.out.empty()) {
    json j;
    j["artifact"] = "sweep-report";
    j["population"] = o.population;
    j["sample"] = o.sample;
    j["runs"] = o.runs;
    j["loss_metric"] = o.metric;
    j["cells"] = jcells;
    save_json_file(j, o.out);
    std::cout << "report -> " << o.out << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-anonymization with traceable decoy records"};
  app.require_subcommand(1);

  SynthpopOpts sp;
  auto* synthpop = app.add_subcommand("synthpop", "generate a synthetic population table");
  synthpop->add_option("--spec", sp.spec, "population spec (JSON)")->required();
  synthpop->add_option("--n", sp.n, "number of records")->required();
  synthpop->add_option("--seed", sp.seed, "root seed");
  synthpop->add_option("--out", sp.out, "output CSV (includes record_id)")->required();
  synthpop->callback([&] { run_synthpop(sp); });

  AnonymizeOpts an;
  auto* anonymize = app.add_subcommand("anonymize", "k-anonymize a table by lattice search");
  anonymize->add_option("--data", an.data, "input CSV")->required();
  anonymize->add_option("--schema", an.schema, "schema (JSON)")->required();
  anonymize->add_option("--hierarchies", an.hierarchies, "generalization rules (JSON)")
      ->required();
  anonymize->add_option("--k", an.k, "anonymity parameter")->required();
  anonymize->add_option("--suppression", an.suppression,
                        "max fraction of records suppressed (default 0)");
  anonymize->add_option("--metric", an.metric,
                        "loss metric: precision|discernibility|avg-class-size");
  anonymize->add_option("--sample", an.sample, "anonymize a uniform sample of this size");
  anonymize->add_option("--seed", an.seed, "root seed (used by --sample)");
  anonymize->add_option("--out", an.out, "output prefix (writes .csv + .manifest.json)")
      ->required();
  anonymize->callback([&] { run_anonymize(an); });

  FeasibilityOpts fe;
  auto* feasibility =
      app.add_subcommand("feasibility", "link a view against the population, find decoy pool");
  feasibility->add_option("--view", fe.view, "view prefix from anonymize")->required();
  feasibility->add_option("--population", fe.population, "population CSV")->required();
  feasibility->add_option("--population-schema", fe.population_schema, "population schema (JSON)")
      ->required();
  feasibility->add_option("--hierarchies", fe.hierarchies, "generalization rules (JSON)")
      ->required();
  feasibility->add_option("--out", fe.out, "feasibility report (JSON)")->required();
  feasibility->callback([&] { run_feasibility(fe); });

  ReleaseOpts re;
  auto* release =
      app.add_subcommand("release", "build per-recipient tables with unique decoy classes");
  release->add_option("--view", re.view, "view prefix from anonymize")->required();
  release->add_option("--feasibility", re.feasibility, "feasibility report (JSON)")->required();
  release->add_option("--recipients", re.recipients, "recipient ids")->delimiter(',');
  release->add_option("--recipients-file", re.recipients_file, "file with one recipient per line");
  release->add_option("--n-d", re.n_d, "decoy classes per recipient");
  release->add_option("--records-per-class", re.records_per_class,
                      "rows per decoy class (0 = k)");
  release->add_option("--risk-lo", re.risk_lo, "lower risk-factor bound for the pool");
  release->add_option("--risk-hi", re.risk_hi, "upper risk-factor bound for the pool");
  release->add_option("--pool-fraction", re.pool_fraction,
                      "max fraction of the pool one recipient may use (0 = no cap)");
  release->add_option("--harden", re.harden, "collusion hardening: random|size-based");
  release->add_option("--n-e", re.n_e, "genuine classes removed per recipient pair");
  release->add_option("--budget", re.budget, "removal budget b");
  release->add_option("--seed", re.seed, "root seed");
  release->add_option("--out", re.out_dir, "release directory")->required();
  release->add_option("--registry", re.registry,
                      "registry path (must lie outside the release directory)")
      ->required();
  release->callback([&] { run_release(re); });

  ColludeOpts co;
  auto* collude = app.add_subcommand("collude", "simulate recipients pooling their releases");
  collude->add_option("--releases", co.releases_dir, "directory of release tables + manifests")
      ->required();
  collude->add_option("--hierarchies", co.hierarchies, "generalization rules (JSON)")->required();
  collude->add_option("--mode", co.mode, "suspect mode: any-peer|all-peers");
  collude->add_flag("--strict", co.strict, "require different generalization levels on a match");
  collude->add_option("--out", co.out, "attack report (JSON)")->required();
  collude->callback([&] { run_collude(co); });

  AttributeOpts at;
  auto* attribute = app.add_subcommand("attribute", "trace a leak back to a recipient");
  attribute->add_option("--registry", at.registry, "decoy registry (JSON)")->required();
  attribute->add_option("--leak", at.leak, "leaked file")->required();
  attribute->add_option("--format", at.format, "leak format: csv|text|auto");
  attribute->add_option("--floor", at.floor, "confidence floor (matched fraction)");
  attribute->add_option("--out", at.out, "verdict (JSON)")->required();
  attribute->callback([&] { run_attribute(at); });

  ReportOpts rp;
  auto* report =
      app.add_subcommand("report", "sweep (k, suppression) settings over sampled runs");
  report->add_option("--spec", rp.spec, "population spec (JSON)")->required();
  report->add_option("--hierarchies", rp.hierarchies, "generalization rules (JSON)")->required();
  report->add_option("--population-size", rp.population, "population size");
  report->add_option("--sample", rp.sample, "sample size per run");
  report->add_option("--runs", rp.runs, "sampled runs per setting");
  report->add_option("--k", rp.ks, "k values")->delimiter(',');
  report->add_option("--suppression", rp.suppressions, "suppression limits")->delimiter(',');
  report->add_option("--metric", rp.metric,
                     "loss metric: precision|discernibility|avg-class-size");
  report->add_option("--seed", rp.seed, "root seed");
  report->add_option("--out", rp.out, "sweep report (JSON)");
  report->callback([&] { run_report(rp); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
