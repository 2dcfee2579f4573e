#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "anonkit/anonymizer.hpp"
#include "anonkit/hierarchy.hpp"
#include "anonkit/linkage.hpp"

namespace anonkit {

// How decoy classes are drawn for each recipient. Decoy signatures are
// unique per recipient, so a leaked copy points back to exactly one party.
struct DecoyPolicy {
  int n_d = 1;                  // decoy classes per recipient
  int records_per_class = 0;    // 0 means: use k, the minimum that blends in
  double risk_lo = 1.0;         // accepted risk-factor band for the pool
  double risk_hi = std::numeric_limits<double>::infinity();
  double pool_fraction = 0.0;   // f: each recipient may use at most f of the pool (0 = no cap)
  uint64_t seed = 0;
};

enum class RemovalStrategy { Random, SizeBased, RiskBased /* declared, not implemented */ };
RemovalStrategy removal_strategy_from_string(const std::string& s);
std::string to_string(RemovalStrategy s);

// Collusion hardening: for every recipient, n_e genuine classes are chosen
// and removed from all *other* releases, so a colluding group sees genuine
// classes with missing counterparts too and cannot isolate the decoys.
struct HardeningPolicy {
  RemovalStrategy strategy = RemovalStrategy::Random;
  int n_e = 1;
  double budget = 1.0;  // b: each release may lose at most b*E_d/N_r classes
  uint64_t seed = 0;
};

struct RecipientRelease {
  std::string recipient_id;
  Dataset table;  // view rows + decoy rows, sorted, fresh row ids
  std::vector<std::vector<std::string>> decoy_signatures;
  std::vector<std::vector<std::string>> protected_signatures;  // classes this release keeps
  std::vector<std::vector<std::string>> removed_signatures;    // classes deleted from it
};

struct RegistryEntry {
  std::vector<std::vector<std::string>> decoy_signatures;
  std::vector<std::vector<std::string>> decoy_rows;
  std::vector<std::vector<int64_t>> member_record_ids;  // per signature
  std::vector<std::vector<std::string>> protected_signatures;
  std::vector<std::vector<std::string>> removed_signatures;
};

// The owner's secret: who received which decoy classes. Never shipped with
// a release; attribution is impossible without it.
struct DecoyRegistry {
  int k = 0;
  std::vector<int> level_vector;
  std::vector<std::string> quasi_attributes;
  std::vector<std::string> sensitive_attributes;
  std::map<std::string, RegistryEntry> entries;  // recipient id -> entry
};

// Capacity arithmetic.
uint64_t pool_capacity(double fraction);  // floor(1/f): recipients a pool of disjoint decoys can serve
uint64_t size_based_capacity(uint64_t eligible, uint64_t per_recipient);  // floor(K/d)
uint64_t removal_budget(double b, uint64_t eligible, uint64_t recipients);  // floor(b*E_d/N_r)
double decoy_guess_probability(int n_d, int n_e);  // n_d / (n_d + n_e)

// Per-attribute parent-or-child comparison of two class signatures; the
// strict variant requires different generalization levels on a match.
bool same_origin(std::span<const std::string> a, std::span<const std::string> b,
                 const BoundHierarchies& bound, bool strict = false);

// Draws disjoint decoy class sets, one per recipient, from the candidates
// whose risk factor lies in the policy band.
std::vector<std::vector<size_t>> select_decoys(std::span<const DecoyCandidate> pool,
                                               const DecoyPolicy& policy,
                                               size_t n_recipients);

struct ReleaseSet {
  std::vector<RecipientRelease> releases;
  DecoyRegistry registry;
};

ReleaseSet build_releases(const AnonymizedView& view, std::span<const DecoyCandidate> pool,
                          const std::vector<std::string>& recipient_ids,
                          const DecoyPolicy& policy,
                          const std::optional<HardeningPolicy>& hardening);

void save_releases(const ReleaseSet& set, const AnonymizedView& view,
                   const std::filesystem::path& dir);
void save_registry(const DecoyRegistry& registry, const std::filesystem::path& path);
DecoyRegistry load_registry(const std::filesystem::path& path);

}  // namespace anonkit
