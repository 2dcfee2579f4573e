#include "anonkit/attribution.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"

namespace anonkit {

using nlohmann::json;

std::vector<DecoyMatch> scan_dataset(const CsvTable& leak, const DecoyRegistry& registry) {
  std::vector<size_t> quasi_cols;
  for (const auto& name : registry.quasi_attributes) {
    auto it = std::find(leak.header.begin(), leak.header.end(), name);
    if (it == leak.header.end())
      throw ValidationError("leak table lacks quasi column '" + name + "'");
    quasi_cols.push_back(static_cast<size_t>(it - leak.header.begin()));
  }

  std::map<std::vector<std::string>, std::pair<std::string, size_t>> lookup;
  for (const auto& [id, entry] : registry.entries)
    for (size_t s = 0; s < entry.decoy_signatures.size(); ++s)
      lookup.emplace(entry.decoy_signatures[s], std::make_pair(id, s));

  std::vector<DecoyMatch> matches;
  std::vector<std::string> tuple(quasi_cols.size());
  for (size_t r = 0; r < leak.rows.size(); ++r) {
    const auto& row = leak.rows[r];
    bool complete = true;
    for (size_t i = 0; i < quasi_cols.size(); ++i) {
      if (quasi_cols[i] >= row.size()) {
        complete = false;
        break;
      }
      tuple[i] = row[quasi_cols[i]];
    }
    if (!complete) continue;
    auto it = lookup.find(tuple);
    if (it != lookup.end())
      matches.push_back({it->second.first, it->second.second, r});
  }
  return matches;
}

std::vector<DecoyMatch> scan_text(std::istream& leak, const DecoyRegistry& registry,
                                  std::string_view delimiters) {
  if (delimiters.empty()) throw ValidationError("empty delimiter set");

  // Per signature: the multiset of values a line must contain.
  struct Needle {
    std::string recipient;
    size_t index;
    std::map<std::string, size_t> required;
  };
  std::vector<Needle> needles;
  for (const auto& [id, entry] : registry.entries) {
    for (size_t s = 0; s < entry.decoy_signatures.size(); ++s) {
      Needle n{id, s, {}};
      for (const auto& v : entry.decoy_signatures[s]) ++n.required[v];
      needles.push_back(std::move(n));
    }
  }

  auto is_delim = [&](char c) { return delimiters.find(c) != std::string_view::npos; };

  std::vector<DecoyMatch> matches;
  std::string line;
  size_t line_no = 0;
  while (std::getline(leak, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::map<std::string, size_t> tokens;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || is_delim(line[i])) {
        if (i > start) ++tokens[line.substr(start, i - start)];
        start = i + 1;
      }
    }
    for (const auto& n : needles) {
      bool all = true;
      for (const auto& [value, count] : n.required) {
        auto it = tokens.find(value);
        if (it == tokens.end() || it->second < count) {
          all = false;
          break;
        }
      }
      if (all) matches.push_back({n.recipient, n.index, line_no});
    }
    ++line_no;
  }
  return matches;
}

Verdict attribute_matches(std::span<const DecoyMatch> matches, const DecoyRegistry& registry,
                          double confidence_floor) {
  if (confidence_floor <= 0.0 || confidence_floor > 1.0)
    throw ValidationError("confidence floor must lie in (0, 1]");

  std::map<std::string, std::set<size_t>> sighted;
  for (const auto& m : matches) sighted[m.recipient].insert(m.signature_index);

  Verdict verdict;
  verdict.confidence_floor = confidence_floor;
  verdict.match_count = matches.size();
  for (const auto& [id, entry] : registry.entries) {
    RecipientScore score;
    score.recipient = id;
    score.total = entry.decoy_signatures.size();
    auto it = sighted.find(id);
    score.matched = it == sighted.end() ? 0 : it->second.size();
    score.fraction =
        score.total ? static_cast<double>(score.matched) / static_cast<double>(score.total) : 0.0;
    verdict.ranking.push_back(std::move(score));
  }
  std::sort(verdict.ranking.begin(), verdict.ranking.end(),
            [](const RecipientScore& a, const RecipientScore& b) {
              if (a.fraction != b.fraction) return a.fraction > b.fraction;
              if (a.matched != b.matched) return a.matched > b.matched;
              return a.recipient < b.recipient;
            });

  if (!verdict.ranking.empty()) {
    const auto& top = verdict.ranking.front();
    const bool unique = verdict.ranking.size() == 1 ||
                        top.fraction > verdict.ranking[1].fraction;
    if (top.matched > 0 && top.fraction >= confidence_floor && unique)
      verdict.culprit = top.recipient;
  }
  return verdict;
}

void save_verdict(const Verdict& verdict, const std::filesystem::path& path) {
  json j;
  j["artifact"] = "attribution-verdict";
  j["confidence_floor"] = verdict.confidence_floor;
  j["match_count"] = verdict.match_count;
  json ranking = json::array();
  for (const auto& s : verdict.ranking)
    ranking.push_back(json{{"recipient", s.recipient},
                           {"matched_signatures", s.matched},
                           {"planted_signatures", s.total},
                           {"fraction", s.fraction}});
  j["ranking"] = ranking;
  if (verdict.culprit)
    j["verdict"] = *verdict.culprit;
  else
    j["verdict"] = "no evidence";
  save_json_file(j, path);
}

}  // namespace anonkit
