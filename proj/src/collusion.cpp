#include "anonkit/collusion.hpp"

#include <algorithm>
#include <limits>
#include <unordered_set>

#include "anonkit/decoy.hpp"
#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

using nlohmann::json;

ReleaseClasses classes_of_release(const std::string& id, const Dataset& table,
                                  const BoundHierarchies& bound) {
  std::map<std::vector<std::string>, std::vector<int64_t>> groups;
  for (size_t r = 0; r < table.size(); ++r) {
    std::vector<std::string> tuple;
    tuple.reserve(bound.quasi_count());
    for (size_t c : bound.quasi_cols) tuple.push_back(table.rows[r][c]);
    groups[std::move(tuple)].push_back(table.record_ids[r]);
  }
  ReleaseClasses out;
  out.id = id;
  for (auto& [tuple, members] : groups) {
    EquivalenceClass c;
    c.tuple = tuple;
    c.members = std::move(members);
    out.classes.push_back(std::move(c));
  }
  return out;
}

namespace {

struct TupleVectorHash {
  size_t operator()(const std::vector<std::string>& tuple) const {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& s : tuple) {
      for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
      }
      h ^= 0x1f;
      h *= 0x100000001b3ULL;
    }
    return static_cast<size_t>(h);
  }
};

using TupleSet = std::unordered_set<std::vector<std::string>, TupleVectorHash>;

bool has_counterpart(const std::vector<std::string>& tuple, const ReleaseClasses& peer,
                     const TupleSet& peer_tuples, const BoundHierarchies& bound, bool strict) {
  // Identical signatures are always same-origin in the inclusive reading, so
  // a hash lookup settles the common case without touching the hierarchies.
  if (!strict && peer_tuples.count(tuple)) return true;
  for (const auto& c : peer.classes)
    if (same_origin(tuple, c.tuple, bound, strict)) return true;
  return false;
}

}  // namespace

std::vector<std::vector<std::vector<std::string>>> collude(
    std::span<const ReleaseClasses> releases, const BoundHierarchies& bound,
    SuspectMode mode, bool strict, Exec exec) {
  if (releases.size() < 2)
    throw ValidationError("collusion needs at least two releases to compare");

  std::vector<TupleSet> tuple_sets(releases.size());
  for (size_t r = 0; r < releases.size(); ++r)
    for (const auto& c : releases[r].classes) tuple_sets[r].insert(c.tuple);

  std::vector<std::vector<std::vector<std::string>>> suspects(releases.size());
  for (size_t r = 0; r < releases.size(); ++r) {
    const auto& mine = releases[r].classes;
    std::vector<uint8_t> flagged(mine.size(), 0);

    auto judge = [&](size_t i) {
      size_t missing = 0, peers = 0;
      for (size_t s = 0; s < releases.size(); ++s) {
        if (s == r) continue;
        ++peers;
        if (!has_counterpart(mine[i].tuple, releases[s], tuple_sets[s], bound, strict))
          ++missing;
      }
      flagged[i] = (mode == SuspectMode::AnyPeer ? missing >= 1 : missing == peers) ? 1 : 0;
    };

    if (exec == Exec::Parallel && mine.size() > 1) {
#pragma omp parallel for schedule(dynamic)
      for (int64_t i = 0; i < static_cast<int64_t>(mine.size()); ++i)
        judge(static_cast<size_t>(i));
    } else {
      for (size_t i = 0; i < mine.size(); ++i) judge(i);
    }

    for (size_t i = 0; i < mine.size(); ++i)
      if (flagged[i]) suspects[r].push_back(mine[i].tuple);
    std::sort(suspects[r].begin(), suspects[r].end());
  }
  return suspects;
}

size_t close_to_k_upper(int k) {
  return static_cast<size_t>(std::floor(1.1 * k + 1e-9));
}

size_t close_to_k_census(std::span<const size_t> sizes, int k) {
  const size_t hi = close_to_k_upper(k);
  size_t n = 0;
  for (size_t s : sizes)
    if (s >= static_cast<size_t>(k) && s <= hi) ++n;
  return n;
}

std::map<size_t, size_t> size_histogram(std::span<const size_t> sizes) {
  std::map<size_t, size_t> hist;
  for (size_t s : sizes) ++hist[s];
  return hist;
}

std::vector<std::vector<std::string>> risk_outlier_screen(
    const ReleaseClasses& release, std::span<const int> lv, const Dataset& population,
    const BoundHierarchies& population_binding, double threshold, Exec exec) {
  if (threshold <= 0.0) throw ValidationError("risk threshold must be positive");
  if (release.classes.empty()) return {};

  EncodedTable enc(population, population_binding);
  std::vector<TupleKey> keys;
  std::vector<std::optional<size_t>> slot;
  std::unordered_map<TupleKey, size_t, TupleKeyHash> seen;
  for (const auto& c : release.classes) {
    auto key = enc.translate(c.tuple, lv);
    if (!key) {
      slot.push_back(std::nullopt);
      continue;
    }
    auto [it, inserted] = seen.try_emplace(*key, keys.size());
    if (inserted) keys.push_back(*key);
    slot.push_back(it->second);
  }
  auto counts = count_matching(enc, lv, keys, exec);

  std::vector<double> risks;
  risks.reserve(release.classes.size());
  for (size_t i = 0; i < release.classes.size(); ++i) {
    uint64_t links = slot[i] ? counts[*slot[i]] : 0;
    risks.push_back(links == 0 ? std::numeric_limits<double>::infinity()
                               : 1.0 / static_cast<double>(links));
  }

  std::vector<double> sorted = risks;
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const double median =
      n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  std::vector<std::vector<std::string>> flagged;
  for (size_t i = 0; i < release.classes.size(); ++i)
    if (risks[i] > threshold * median) flagged.push_back(release.classes[i].tuple);
  return flagged;
}

double simulate_guess_success(const std::vector<std::vector<std::string>>& suspects,
                              const std::set<std::vector<std::string>>& true_decoys,
                              size_t trials, uint64_t seed) {
  if (suspects.empty()) throw ValidationError("no suspects to guess from");
  if (trials == 0) throw ValidationError("need at least one trial");
  Rng rng(seed);
  size_t hits = 0;
  for (size_t t = 0; t < trials; ++t)
    if (true_decoys.count(suspects[rng.below(suspects.size())])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(trials);
}

void save_attack_report(const AttackReport& report, const std::filesystem::path& path) {
  json j;
  j["artifact"] = "collusion-attack-report";
  j["k"] = report.k;
  j["suspect_mode"] = report.mode == SuspectMode::AnyPeer ? "any-peer" : "all-peers";
  j["strict_same_origin"] = report.strict;
  json releases = json::array();
  for (size_t r = 0; r < report.release_ids.size(); ++r) {
    json e;
    e["release"] = report.release_ids[r];
    json sus = json::array();
    for (const auto& tuple : report.suspects[r]) sus.push_back(tuple);
    e["suspect_classes"] = sus;
    e["suspect_count"] = report.suspects[r].size();
    e["close_to_k"] = report.close_to_k[r];
    json hist = json::object();
    for (const auto& [size, count] : report.histograms[r])
      hist[std::to_string(size)] = count;
    e["class_size_histogram"] = hist;
    releases.push_back(std::move(e));
  }
  j["releases"] = releases;
  save_json_file(j, path);
}

}  // namespace anonkit
