#include "anonkit/linkage.hpp"

#include <algorithm>
#include <limits>

#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"

namespace anonkit {

using nlohmann::json;

namespace {

// View tuples translated into the population table's id space. Classes whose
// tuple never occurs in the population keep a null key and count 0.
struct TranslatedTargets {
  std::vector<TupleKey> keys;            // distinct, for the kernels
  std::vector<std::optional<size_t>> slot_of_class;  // view class -> key slot
};

TranslatedTargets translate_classes(const EncodedTable& population,
                                    const AnonymizedView& view) {
  TranslatedTargets out;
  std::unordered_map<TupleKey, size_t, TupleKeyHash> seen;
  for (const auto& c : view.classes) {
    auto key = population.translate(c.tuple, view.level_vector);
    if (!key) {
      out.slot_of_class.push_back(std::nullopt);
      continue;
    }
    auto [it, inserted] = seen.try_emplace(*key, out.keys.size());
    if (inserted) out.keys.push_back(*key);
    out.slot_of_class.push_back(it->second);
  }
  return out;
}

}  // namespace

LinkageReport link_classes(const AnonymizedView& view, const Dataset& population,
                           const BoundHierarchies& population_binding, Exec exec) {
  if (view.classes.empty())
    throw ValidationError("the view retains no classes, nothing to link");

  EncodedTable enc(population, population_binding);
  auto targets = translate_classes(enc, view);
  auto counts = count_matching(enc, view.level_vector, targets.keys, exec);

  LinkageReport report;
  report.per_class_links.reserve(view.classes.size());
  uint64_t min_link = std::numeric_limits<uint64_t>::max();
  for (size_t i = 0; i < view.classes.size(); ++i) {
    uint64_t n = targets.slot_of_class[i] ? counts[*targets.slot_of_class[i]] : 0;
    report.per_class_links.push_back(n);
    min_link = std::min(min_link, n);
  }
  report.min_link = min_link;
  report.max_risk = min_link == 0 ? std::numeric_limits<double>::infinity()
                                  : 1.0 / static_cast<double>(min_link);
  return report;
}

std::vector<DecoyCandidate> discover_candidates(const Dataset& population,
                                                const AnonymizedView& view, int k,
                                                uint64_t min_link,
                                                const BoundHierarchies& population_binding,
                                                Exec exec) {
  if (min_link <= static_cast<uint64_t>(k)) return {};  // nothing can sit in [k, min_link)

  EncodedTable enc(population, population_binding);
  auto targets = translate_classes(enc, view);
  auto linked = match_mask(enc, view.level_vector, targets.keys, exec);

  std::vector<uint32_t> residual;
  residual.reserve(population.size());
  for (size_t row = 0; row < population.size(); ++row)
    if (!linked[row]) residual.push_back(static_cast<uint32_t>(row));

  auto grouped = group_records_subset(enc, view.level_vector, residual, exec);

  std::vector<DecoyCandidate> candidates;
  for (size_t i = 0; i < grouped.keys.size(); ++i) {
    const size_t size = grouped.members[i].size();
    if (size < static_cast<size_t>(k) || size >= min_link) continue;
    DecoyCandidate c;
    c.tuple = enc.tuple_of(grouped.keys[i], view.level_vector);
    c.members.reserve(size);
    for (uint32_t row : grouped.members[i]) c.members.push_back(population.record_ids[row]);
    c.risk_factor = static_cast<double>(min_link) / static_cast<double>(size);
    candidates.push_back(std::move(c));
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const DecoyCandidate& a, const DecoyCandidate& b) { return a.tuple < b.tuple; });
  return candidates;
}

std::vector<double> risk_profile(std::span<const DecoyCandidate> candidates) {
  std::vector<double> profile;
  profile.reserve(candidates.size());
  for (const auto& c : candidates) profile.push_back(c.risk_factor);
  std::sort(profile.begin(), profile.end());
  return profile;
}

void save_feasibility(const FeasibilityResult& result, const AnonymizedView& view,
                      const std::filesystem::path& path) {
  json j;
  j["artifact"] = "decoy-feasibility";
  j["k"] = result.k;
  j["level_vector"] = result.level_vector;
  j["quasi_attributes"] = result.quasi_attributes;
  j["min_link"] = result.report.min_link;
  if (result.report.min_link == 0)
    j["max_reidentification_risk"] = "infinite";
  else
    j["max_reidentification_risk"] = result.report.max_risk;
  json links = json::array();
  for (size_t i = 0; i < view.classes.size(); ++i)
    links.push_back(json{{"tuple", view.classes[i].tuple},
                         {"size", view.classes[i].size()},
                         {"links", result.report.per_class_links[i]}});
  j["class_links"] = links;
  json cands = json::array();
  size_t candidate_records = 0;
  for (const auto& c : result.candidates) {
    cands.push_back(json{{"tuple", c.tuple},
                         {"member_record_ids", c.members},
                         {"risk_factor", c.risk_factor}});
    candidate_records += c.size();
  }
  j["candidates"] = cands;
  j["summary"] = json{{"candidate_classes", result.candidates.size()},
                      {"candidate_records", candidate_records},
                      {"risk_profile", risk_profile(result.candidates)}};
  save_json_file(j, path);
}

FeasibilityResult load_feasibility(const std::filesystem::path& path) {
  json j = load_json_file(path);
  FeasibilityResult result;
  try {
    if (j.at("artifact").get<std::string>() != "decoy-feasibility")
      throw ValidationError(path.string() + ": not a feasibility manifest");
    result.k = j.at("k").get<int>();
    result.level_vector = j.at("level_vector").get<std::vector<int>>();
    result.quasi_attributes = j.at("quasi_attributes").get<std::vector<std::string>>();
    result.report.min_link = j.at("min_link").get<uint64_t>();
    result.report.max_risk =
        result.report.min_link == 0
            ? std::numeric_limits<double>::infinity()
            : 1.0 / static_cast<double>(result.report.min_link);
    for (const auto& c : j.at("class_links"))
      result.report.per_class_links.push_back(c.at("links").get<uint64_t>());
    for (const auto& c : j.at("candidates")) {
      DecoyCandidate d;
      d.tuple = c.at("tuple").get<std::vector<std::string>>();
      d.members = c.at("member_record_ids").get<std::vector<int64_t>>();
      d.risk_factor = c.at("risk_factor").get<double>();
      result.candidates.push_back(std::move(d));
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return result;
}

}  // namespace anonkit
