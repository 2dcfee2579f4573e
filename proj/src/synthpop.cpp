#include "anonkit/synthpop.hpp"

#include <cmath>
#include <numeric>

#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

using nlohmann::json;

namespace {

GeneratorSpec generator_from_json(const json& j) {
  GeneratorSpec g;
  const std::string type = j.at("type").get<std::string>();
  if (type == "categorical") {
    g.type = GeneratorSpec::Type::Categorical;
    g.values = j.at("values").get<std::vector<std::string>>();
    g.weights = j.at("weights").get<std::vector<double>>();
  } else if (type == "year") {
    g.type = GeneratorSpec::Type::Year;
    g.year_min = j.at("min").get<int64_t>();
    g.year_max = j.at("max").get<int64_t>();
  } else if (type == "code") {
    g.type = GeneratorSpec::Type::Code;
    g.prefixes = j.at("prefixes").get<std::vector<std::string>>();
    g.code_length = j.at("length").get<int>();
    const std::string dist = j.value("distribution", "uniform");
    if (dist == "zipf") {
      g.zipf = true;
      g.zipf_s = j.value("zipf_s", 1.0);
    } else if (dist != "uniform") {
      throw ValidationError("unknown code distribution: " + dist);
    }
    g.codes_per_prefix = j.value("codes_per_prefix", 0);
  } else if (type == "sequence") {
    g.type = GeneratorSpec::Type::Sequence;
    g.sequence_prefix = j.value("prefix", "id-");
  } else {
    throw ValidationError("unknown generator type: " + type);
  }
  return g;
}

}  // namespace

PopulationSpec load_population_spec(const std::filesystem::path& path) {
  json j = load_json_file(path);
  PopulationSpec spec;
  try {
    std::vector<AttributeSchema> attrs;
    for (const auto& a : j.at("attributes")) {
      AttributeSchema attr;
      attr.name = a.at("name").get<std::string>();
      attr.role = role_from_string(a.at("role").get<std::string>());
      attr.kind = kind_from_string(a.at("kind").get<std::string>());
      if (attr.kind == AttrKind::FixedLengthCode) attr.code_length = a.at("length").get<int>();
      if (a.contains("hierarchy")) attr.hierarchy = a.at("hierarchy").get<std::string>();
      attrs.push_back(std::move(attr));
      spec.generators.push_back(generator_from_json(a.at("generator")));
    }
    spec.schema = Schema(std::move(attrs));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  validate_population_spec(spec);
  return spec;
}

void validate_population_spec(const PopulationSpec& spec) {
  if (spec.schema.size() != spec.generators.size())
    throw ValidationError("every attribute needs a generator");
  for (size_t i = 0; i < spec.generators.size(); ++i) {
    const auto& g = spec.generators[i];
    const std::string& name = spec.schema.at(i).name;
    switch (g.type) {
      case GeneratorSpec::Type::Categorical: {
        if (g.values.empty()) throw ValidationError(name + ": empty value list");
        if (g.values.size() != g.weights.size())
          throw ValidationError(name + ": values and weights differ in length");
        double sum = 0.0;
        for (double w : g.weights) {
          if (w < 0.0) throw ValidationError(name + ": negative weight");
          sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9)
          throw ValidationError(name + ": weights sum to " + std::to_string(sum) +
                                ", expected 1");
        break;
      }
      case GeneratorSpec::Type::Year:
        if (g.year_min > g.year_max) throw ValidationError(name + ": empty year range");
        break;
      case GeneratorSpec::Type::Code: {
        if (g.prefixes.empty()) throw ValidationError(name + ": no code prefixes");
        if (g.code_length <= 0) throw ValidationError(name + ": code length must be positive");
        for (const auto& p : g.prefixes)
          if (p.size() > static_cast<size_t>(g.code_length))
            throw ValidationError(name + ": prefix '" + p + "' longer than the code length");
        if (g.zipf && g.zipf_s <= 0.0)
          throw ValidationError(name + ": zipf exponent must be positive");
        if (g.codes_per_prefix < 0) throw ValidationError(name + ": negative codes_per_prefix");
        break;
      }
      case GeneratorSpec::Type::Sequence:
        break;
    }
  }
}

namespace {

// Precomputed sampling table for one attribute.
struct Sampler {
  std::vector<std::string> values;     // categorical / code
  std::vector<double> cumulative;      // weighted draws
  bool uniform = false;                // uniform over values
  int64_t year_min = 0, year_span = 0; // year draws
  GeneratorSpec::Type type;
  std::string sequence_prefix;
};

Sampler build_sampler(const GeneratorSpec& g) {
  Sampler s;
  s.type = g.type;
  switch (g.type) {
    case GeneratorSpec::Type::Categorical: {
      s.values = g.values;
      double acc = 0.0;
      for (double w : g.weights) s.cumulative.push_back(acc += w);
      break;
    }
    case GeneratorSpec::Type::Year:
      s.year_min = g.year_min;
      s.year_span = g.year_max - g.year_min + 1;
      break;
    case GeneratorSpec::Type::Code: {
      // Enumerate <prefix><zero-padded suffix> codes in rank order.
      for (const auto& prefix : g.prefixes) {
        const int digits = g.code_length - static_cast<int>(prefix.size());
        uint64_t span = 1;
        for (int d = 0; d < digits; ++d) span *= 10;
        if (g.codes_per_prefix > 0)
          span = std::min<uint64_t>(span, static_cast<uint64_t>(g.codes_per_prefix));
        for (uint64_t v = 0; v < span; ++v) {
          std::string suffix;
          if (digits > 0) {
            suffix = std::to_string(v);
            suffix.insert(0, static_cast<size_t>(digits) - suffix.size(), '0');
          }
          s.values.push_back(prefix + suffix);
        }
      }
      if (g.zipf) {
        double acc = 0.0;
        for (size_t rank = 1; rank <= s.values.size(); ++rank)
          s.cumulative.push_back(acc += std::pow(static_cast<double>(rank), -g.zipf_s));
      } else {
        s.uniform = true;
      }
      break;
    }
    case GeneratorSpec::Type::Sequence:
      s.sequence_prefix = g.sequence_prefix;
      break;
  }
  return s;
}

}  // namespace

Dataset generate_population(const PopulationSpec& spec, size_t n, uint64_t seed) {
  validate_population_spec(spec);
  std::vector<Sampler> samplers;
  samplers.reserve(spec.generators.size());
  for (const auto& g : spec.generators) samplers.push_back(build_sampler(g));

  Rng rng(derive_seed(seed, "population"));
  std::vector<std::vector<std::string>> rows;
  rows.reserve(n);
  for (size_t r = 0; r < n; ++r) {
    std::vector<std::string> row;
    row.reserve(samplers.size());
    for (const auto& s : samplers) {
      switch (s.type) {
        case GeneratorSpec::Type::Categorical:
          row.push_back(s.values[rng.pick_cumulative(s.cumulative)]);
          break;
        case GeneratorSpec::Type::Year:
          row.push_back(std::to_string(
              s.year_min + static_cast<int64_t>(rng.below(static_cast<uint64_t>(s.year_span)))));
          break;
        case GeneratorSpec::Type::Code:
          row.push_back(s.uniform ? s.values[rng.below(s.values.size())]
                                  : s.values[rng.pick_cumulative(s.cumulative)]);
          break;
        case GeneratorSpec::Type::Sequence:
          row.push_back(s.sequence_prefix + std::to_string(r));
          break;
      }
    }
    rows.push_back(std::move(row));
  }
  return make_dataset(spec.schema, std::move(rows));
}

}  // namespace anonkit
