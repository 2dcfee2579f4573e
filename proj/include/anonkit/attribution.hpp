#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "anonkit/csv.hpp"
#include "anonkit/decoy.hpp"

namespace anonkit {

// A decoy signature sighted in leaked material.
struct DecoyMatch {
  std::string recipient;
  size_t signature_index = 0;  // within that recipient's signatures
  size_t location = 0;         // row or line number in the leak
};

// Structured leak: a CSV that still carries the quasi columns by name. A row
// matches when its quasi projection equals a registered signature.
std::vector<DecoyMatch> scan_dataset(const CsvTable& leak, const DecoyRegistry& registry);

// Unstructured leak: line-oriented text (dumps, pastes). A line matches a
// signature when every signature value appears among the line's tokens,
// multiplicity included, in any order.
std::vector<DecoyMatch> scan_text(std::istream& leak, const DecoyRegistry& registry,
                                  std::string_view delimiters = ",;|\t ");

struct RecipientScore {
  std::string recipient;
  size_t matched = 0;  // distinct signatures sighted
  size_t total = 0;    // signatures planted
  double fraction = 0.0;
};

struct Verdict {
  std::vector<RecipientScore> ranking;  // best first
  std::optional<std::string> culprit;   // set only on a confident, unique top
  double confidence_floor = 0.5;
  size_t match_count = 0;
};

// Accuses the top recipient only when its matched fraction reaches the floor
// and strictly beats the runner-up; anything else is "no evidence".
Verdict attribute_matches(std::span<const DecoyMatch> matches, const DecoyRegistry& registry,
                          double confidence_floor = 0.5);

void save_verdict(const Verdict& verdict, const std::filesystem::path& path);

}  // namespace anonkit
