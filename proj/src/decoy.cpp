#include "anonkit/decoy.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

using nlohmann::json;

RemovalStrategy removal_strategy_from_string(const std::string& s) {
  if (s == "random") return RemovalStrategy::Random;
  if (s == "size-based") return RemovalStrategy::SizeBased;
  if (s == "risk-based") return RemovalStrategy::RiskBased;
  throw ValidationError("unknown removal strategy: " + s);
}

std::string to_string(RemovalStrategy s) {
  switch (s) {
    case RemovalStrategy::Random: return "random";
    case RemovalStrategy::SizeBased: return "size-based";
    case RemovalStrategy::RiskBased: return "risk-based";
  }
  return "?";
}

uint64_t pool_capacity(double fraction) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw ValidationError("pool fraction must lie in (0, 1]");
  // The epsilon keeps e.g. 1/0.1 from landing just below 10.
  return static_cast<uint64_t>(std::floor(1.0 / fraction + 1e-9));
}

uint64_t size_based_capacity(uint64_t eligible, uint64_t per_recipient) {
  if (per_recipient == 0) throw ValidationError("per-recipient class count must be positive");
  return eligible / per_recipient;
}

uint64_t removal_budget(double b, uint64_t eligible, uint64_t recipients) {
  if (b <= 0.0 || b > 1.0) throw ValidationError("removal budget must lie in (0, 1]");
  if (recipients == 0) throw ValidationError("removal budget needs at least one recipient");
  return static_cast<uint64_t>(
      std::floor(b * static_cast<double>(eligible) / static_cast<double>(recipients) + 1e-9));
}

double decoy_guess_probability(int n_d, int n_e) {
  if (n_d < 0 || n_e < 0 || n_d + n_e == 0)
    throw ValidationError("guess probability needs n_d + n_e > 0");
  return static_cast<double>(n_d) / static_cast<double>(n_d + n_e);
}

bool same_origin(std::span<const std::string> a, std::span<const std::string> b,
                 const BoundHierarchies& bound, bool strict) {
  if (a.size() != bound.quasi_count() || b.size() != bound.quasi_count())
    throw ValidationError("signature width does not match the quasi attribute count");
  for (size_t i = 0; i < bound.quasi_count(); ++i) {
    const Hierarchy& h = *bound.rules[i];
    if (strict ? !h.related_strict(a[i], b[i]) : !h.related(a[i], b[i])) return false;
  }
  return true;
}

std::vector<std::vector<size_t>> select_decoys(std::span<const DecoyCandidate> pool,
                                               const DecoyPolicy& policy,
                                               size_t n_recipients) {
  if (policy.n_d < 0) throw ValidationError("n_d must be non-negative");
  if (policy.risk_lo < 1.0) throw ValidationError("risk band must start at 1.0 or above");
  if (policy.risk_hi < policy.risk_lo) throw ValidationError("empty risk band");
  if (n_recipients == 0) throw ValidationError("no recipients");

  std::vector<std::vector<size_t>> assignment(n_recipients);
  if (policy.n_d == 0) return assignment;

  std::vector<size_t> filtered;
  for (size_t i = 0; i < pool.size(); ++i)
    if (pool[i].risk_factor >= policy.risk_lo && pool[i].risk_factor <= policy.risk_hi)
      filtered.push_back(i);

  if (policy.pool_fraction > 0.0) {
    const uint64_t cap = pool_capacity(policy.pool_fraction);
    if (n_recipients > cap)
      throw CapacityError("pool fraction " + std::to_string(policy.pool_fraction) +
                          " supports at most " + std::to_string(cap) + " recipients, got " +
                          std::to_string(n_recipients));
    if (static_cast<double>(policy.n_d) >
        policy.pool_fraction * static_cast<double>(filtered.size()) + 1e-9)
      throw CapacityError("n_d=" + std::to_string(policy.n_d) + " exceeds the fraction " +
                          std::to_string(policy.pool_fraction) + " of a pool of " +
                          std::to_string(filtered.size()) + " classes");
  }
  const size_t needed = n_recipients * static_cast<size_t>(policy.n_d);
  if (needed > filtered.size())
    throw CapacityError("decoy pool exhausted: " + std::to_string(filtered.size()) +
                        " classes in the risk band [" + std::to_string(policy.risk_lo) + ", " +
                        std::to_string(policy.risk_hi) + "], " + std::to_string(needed) +
                        " required for " + std::to_string(n_recipients) + " recipients");

  Rng rng(derive_seed(policy.seed, "select-decoys"));
  for (size_t i = filtered.size(); i > 1; --i)
    std::swap(filtered[i - 1], filtered[rng.below(i)]);

  size_t at = 0;
  for (auto& slots : assignment) {
    slots.assign(filtered.begin() + at, filtered.begin() + at + policy.n_d);
    std::sort(slots.begin(), slots.end());
    at += policy.n_d;
  }
  return assignment;
}

namespace {

struct ViewColumns {
  std::vector<size_t> quasi;      // view schema cols, binding order
  std::vector<size_t> sensitive;  // view schema cols
};

ViewColumns view_columns(const AnonymizedView& view) {
  ViewColumns cols;
  for (const auto& name : view.quasi_attributes) {
    auto idx = view.schema.index_of(name);
    if (!idx) throw ValidationError("view schema lost quasi attribute '" + name + "'");
    cols.quasi.push_back(*idx);
  }
  cols.sensitive = view.schema.indices(AttrRole::Sensitive);
  return cols;
}

std::vector<std::string> quasi_projection(const std::vector<std::string>& row,
                                          const ViewColumns& cols) {
  std::vector<std::string> tuple;
  tuple.reserve(cols.quasi.size());
  for (size_t c : cols.quasi) tuple.push_back(row[c]);
  return tuple;
}

// Hardening plan: which signatures each recipient keeps exclusively, and
// which get deleted from each release. Computed up front so a budget or
// capacity failure aborts before any table is touched.
struct HardeningPlan {
  std::vector<std::vector<std::vector<std::string>>> protected_by;  // [recipient]
  std::vector<std::vector<std::vector<std::string>>> removed_from;  // [recipient]
};

HardeningPlan plan_hardening(const AnonymizedView& view, const HardeningPolicy& policy,
                             size_t n_recipients) {
  if (policy.n_e < 1) throw ValidationError("n_e must be at least 1");
  if (n_recipients < 2)
    throw ValidationError("hardening needs at least two recipients to remove classes from");

  std::vector<const EquivalenceClass*> eligible;
  switch (policy.strategy) {
    case RemovalStrategy::Random:
      for (const auto& c : view.classes) eligible.push_back(&c);
      break;
    case RemovalStrategy::SizeBased: {
      // Small classes blend with decoys (whose released size is near k), so
      // removing them is the better camouflage.
      const size_t hi = static_cast<size_t>(std::floor(1.1 * view.k + 1e-9));
      for (const auto& c : view.classes)
        if (c.size() >= static_cast<size_t>(view.k) && c.size() <= hi) eligible.push_back(&c);
      break;
    }
    case RemovalStrategy::RiskBased:
      throw ValidationError("risk-based removal is declared but not implemented");
  }

  const uint64_t e_d = eligible.size();
  const uint64_t n_e = static_cast<uint64_t>(policy.n_e);
  if (n_recipients * n_e > e_d)
    throw CapacityError("hardening needs " + std::to_string(n_recipients * n_e) +
                        " distinct classes but only " + std::to_string(e_d) +
                        " are eligible (capacity " + std::to_string(size_based_capacity(e_d, n_e)) +
                        " recipients)");
  const uint64_t budget = removal_budget(policy.budget, e_d, n_recipients);
  const uint64_t removals_per_release = n_e * (n_recipients - 1);
  if (removals_per_release > budget)
    throw CapacityError("hardening would remove " + std::to_string(removals_per_release) +
                        " classes per release, over the budget of " + std::to_string(budget) +
                        " (b=" + std::to_string(policy.budget) + ", " + std::to_string(e_d) +
                        " eligible classes, " + std::to_string(n_recipients) + " recipients)");

  Rng rng(derive_seed(policy.seed, "harden"));
  std::vector<uint8_t> taken(eligible.size(), 0);
  HardeningPlan plan;
  plan.protected_by.resize(n_recipients);
  plan.removed_from.resize(n_recipients);
  for (size_t r = 0; r < n_recipients; ++r) {
    std::vector<size_t> live;
    for (size_t i = 0; i < eligible.size(); ++i)
      if (!taken[i]) live.push_back(i);
    for (uint64_t pick_idx : sample_indices(rng, live.size(), n_e)) {
      const size_t chosen = live[pick_idx];
      taken[chosen] = 1;
      plan.protected_by[r].push_back(eligible[chosen]->tuple);
      for (size_t s = 0; s < n_recipients; ++s)
        if (s != r) plan.removed_from[s].push_back(eligible[chosen]->tuple);
    }
  }
  return plan;
}

}  // namespace

ReleaseSet build_releases(const AnonymizedView& view, std::span<const DecoyCandidate> pool,
                          const std::vector<std::string>& recipient_ids,
                          const DecoyPolicy& policy,
                          const std::optional<HardeningPolicy>& hardening) {
  if (recipient_ids.empty()) throw ValidationError("no recipients");
  {
    std::set<std::string> unique(recipient_ids.begin(), recipient_ids.end());
    if (unique.size() != recipient_ids.size())
      throw ValidationError("duplicate recipient ids");
    if (unique.count("")) throw ValidationError("empty recipient id");
  }
  const int rpc = policy.records_per_class == 0 ? view.k : policy.records_per_class;
  if (rpc < view.k)
    throw ValidationError("records_per_class=" + std::to_string(rpc) +
                          " would make decoy classes smaller than k=" + std::to_string(view.k) +
                          " and trivially spottable");
  if (policy.n_d > 0 && view.retained() == 0)
    throw ValidationError("the view retains no rows to draw sensitive values from");

  // A candidate must be able to back rpc released records.
  std::vector<DecoyCandidate> usable;
  for (const auto& cand : pool)
    if (cand.size() >= static_cast<size_t>(rpc)) usable.push_back(cand);
  auto assignment = select_decoys(usable, policy, recipient_ids.size());

  const ViewColumns cols = view_columns(view);
  std::optional<HardeningPlan> plan;
  if (hardening) plan = plan_hardening(view, *hardening, recipient_ids.size());

  ReleaseSet set;
  set.registry.k = view.k;
  set.registry.level_vector = view.level_vector;
  set.registry.quasi_attributes = view.quasi_attributes;
  for (size_t c : cols.sensitive)
    set.registry.sensitive_attributes.push_back(view.schema.at(c).name);

  for (size_t r = 0; r < recipient_ids.size(); ++r) {
    const std::string& id = recipient_ids[r];
    Rng rng(derive_seed(policy.seed, "decoys:" + id));

    RecipientRelease release;
    release.recipient_id = id;
    RegistryEntry entry;

    std::vector<std::vector<std::string>> rows = view.generalized.rows;
    for (size_t slot : assignment[r]) {
      const DecoyCandidate& cand = usable[slot];
      release.decoy_signatures.push_back(cand.tuple);
      entry.decoy_signatures.push_back(cand.tuple);

      auto picked = sample_indices(rng, cand.size(), static_cast<uint64_t>(rpc));
      std::vector<int64_t> ids;
      for (uint64_t m : picked) ids.push_back(cand.members[m]);
      entry.member_record_ids.push_back(std::move(ids));

      for (int dup = 0; dup < rpc; ++dup) {
        std::vector<std::string> row(view.schema.size());
        for (size_t q = 0; q < cols.quasi.size(); ++q) row[cols.quasi[q]] = cand.tuple[q];
        // Sensitive values follow the view's empirical distribution, so the
        // decoy class is statistically unremarkable.
        for (size_t c : cols.sensitive)
          row[c] = view.generalized.rows[rng.below(view.retained())][c];
        entry.decoy_rows.push_back(row);
        rows.push_back(std::move(row));
      }
    }

    if (plan) {
      release.protected_signatures = plan->protected_by[r];
      release.removed_signatures = plan->removed_from[r];
      entry.protected_signatures = plan->protected_by[r];
      entry.removed_signatures = plan->removed_from[r];
      std::set<std::vector<std::string>> gone(release.removed_signatures.begin(),
                                              release.removed_signatures.end());
      std::erase_if(rows, [&](const std::vector<std::string>& row) {
        return gone.count(quasi_projection(row, cols)) > 0;
      });
    }

    // Sort so decoys are not betrayed by their position in the file.
    std::sort(rows.begin(), rows.end());
    release.table = make_dataset(view.schema, std::move(rows));

    set.registry.entries.emplace(id, std::move(entry));
    set.releases.push_back(std::move(release));
  }
  return set;
}

namespace {

json signatures_to_json(const std::vector<std::vector<std::string>>& sigs) {
  json out = json::array();
  for (const auto& s : sigs) out.push_back(s);
  return out;
}

void validate_registry(const DecoyRegistry& registry) {
  std::set<std::vector<std::string>> all;
  for (const auto& [id, entry] : registry.entries) {
    std::set<std::vector<std::string>> own(entry.decoy_signatures.begin(),
                                           entry.decoy_signatures.end());
    if (own.size() != entry.decoy_signatures.size())
      throw ValidationError("registry: duplicate decoy signature within recipient '" + id + "'");
    for (const auto& s : own)
      if (!all.insert(s).second)
        throw ValidationError("registry: decoy signature shared across recipients");
    if (entry.member_record_ids.size() != entry.decoy_signatures.size())
      throw ValidationError("registry: member ids not aligned with signatures for '" + id + "'");
  }
}

}  // namespace

void save_releases(const ReleaseSet& set, const AnonymizedView& view,
                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const ViewColumns cols = view_columns(view);
  for (const auto& release : set.releases) {
    save_dataset(release.table, dir / (release.recipient_id + ".csv"), false);

    std::set<std::vector<std::string>> distinct;
    for (const auto& row : release.table.rows) distinct.insert(quasi_projection(row, cols));

    json j;
    j["artifact"] = "recipient-release";
    j["recipient_id"] = release.recipient_id;
    j["k"] = view.k;
    j["level_vector"] = view.level_vector;
    j["quasi_attributes"] = view.quasi_attributes;
    j["schema"] = schema_to_json(view.schema);
    j["row_count"] = release.table.size();
    j["class_count"] = distinct.size();
    // The only hardening trace a recipient sees is how many classes were
    // withheld; which ones stays with the owner.
    j["removed_class_count"] = release.removed_signatures.size();
    save_json_file(j, dir / (release.recipient_id + ".manifest.json"));
  }
}

void save_registry(const DecoyRegistry& registry, const std::filesystem::path& path) {
  validate_registry(registry);
  json j;
  j["artifact"] = "decoy-registry";
  j["k"] = registry.k;
  j["level_vector"] = registry.level_vector;
  j["quasi_attributes"] = registry.quasi_attributes;
  j["sensitive_attributes"] = registry.sensitive_attributes;
  json recipients = json::object();
  for (const auto& [id, entry] : registry.entries) {
    json e;
    e["decoy_signatures"] = signatures_to_json(entry.decoy_signatures);
    e["decoy_rows"] = signatures_to_json(entry.decoy_rows);
    e["member_record_ids"] = entry.member_record_ids;
    e["protected_signatures"] = signatures_to_json(entry.protected_signatures);
    e["removed_signatures"] = signatures_to_json(entry.removed_signatures);
    recipients[id] = std::move(e);
  }
  j["recipients"] = recipients;
  save_json_file(j, path);
}

DecoyRegistry load_registry(const std::filesystem::path& path) {
  json j = load_json_file(path);
  DecoyRegistry registry;
  try {
    if (j.at("artifact").get<std::string>() != "decoy-registry")
      throw ValidationError(path.string() + ": not a decoy registry");
    registry.k = j.at("k").get<int>();
    registry.level_vector = j.at("level_vector").get<std::vector<int>>();
    registry.quasi_attributes = j.at("quasi_attributes").get<std::vector<std::string>>();
    registry.sensitive_attributes = j.at("sensitive_attributes").get<std::vector<std::string>>();
    for (const auto& [id, e] : j.at("recipients").items()) {
      RegistryEntry entry;
      entry.decoy_signatures = e.at("decoy_signatures").get<std::vector<std::vector<std::string>>>();
      entry.decoy_rows = e.at("decoy_rows").get<std::vector<std::vector<std::string>>>();
      entry.member_record_ids = e.at("member_record_ids").get<std::vector<std::vector<int64_t>>>();
      entry.protected_signatures =
          e.at("protected_signatures").get<std::vector<std::vector<std::string>>>();
      entry.removed_signatures =
          e.at("removed_signatures").get<std::vector<std::vector<std::string>>>();
      registry.entries.emplace(id, std::move(entry));
    }
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  validate_registry(registry);
  return registry;
}

}  // namespace anonkit
