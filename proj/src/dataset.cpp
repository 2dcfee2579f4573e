#include "anonkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

#include "anonkit/csv.hpp"
#include "anonkit/errors.hpp"
#include "anonkit/json_util.hpp"
#include "anonkit/rng.hpp"

namespace anonkit {

using nlohmann::json;

std::string to_string(AttrRole role) {
  switch (role) {
    case AttrRole::Direct: return "direct";
    case AttrRole::Quasi: return "quasi";
    case AttrRole::Sensitive: return "sensitive";
  }
  return "?";
}

std::string to_string(AttrKind kind) {
  switch (kind) {
    case AttrKind::Categorical: return "categorical";
    case AttrKind::Integer: return "integer";
    case AttrKind::FixedLengthCode: return "fixed-length-code";
  }
  return "?";
}

AttrRole role_from_string(const std::string& s) {
  if (s == "direct") return AttrRole::Direct;
  if (s == "quasi") return AttrRole::Quasi;
  if (s == "sensitive") return AttrRole::Sensitive;
  throw ValidationError("unknown attribute role: " + s);
}

AttrKind kind_from_string(const std::string& s) {
  if (s == "categorical") return AttrKind::Categorical;
  if (s == "integer") return AttrKind::Integer;
  if (s == "fixed-length-code") return AttrKind::FixedLengthCode;
  throw ValidationError("unknown attribute kind: " + s);
}

Schema::Schema(std::vector<AttributeSchema> attrs) : attrs_(std::move(attrs)) {
  std::set<std::string> seen;
  for (const auto& a : attrs_) {
    if (a.name.empty()) throw ValidationError("attribute with empty name");
    if (!seen.insert(a.name).second)
      throw ValidationError("duplicate attribute name: " + a.name);
    if (a.kind == AttrKind::FixedLengthCode && a.code_length <= 0)
      throw ValidationError(a.name + ": fixed-length-code attributes need a positive length");
  }
}

std::optional<size_t> Schema::index_of(const std::string& name) const {
  for (size_t i = 0; i < attrs_.size(); ++i)
    if (attrs_[i].name == name) return i;
  return std::nullopt;
}

std::vector<size_t> Schema::indices(AttrRole role) const {
  std::vector<size_t> out;
  for (size_t i = 0; i < attrs_.size(); ++i)
    if (attrs_[i].role == role) out.push_back(i);
  return out;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(attrs_.size());
  for (const auto& a : attrs_) out.push_back(a.name);
  return out;
}

Schema Schema::project(const std::vector<size_t>& cols) const {
  std::vector<AttributeSchema> picked;
  picked.reserve(cols.size());
  for (size_t c : cols) picked.push_back(attrs_.at(c));
  return Schema(std::move(picked));
}

namespace {

AttributeSchema attribute_from_json(const json& j) {
  AttributeSchema a;
  a.name = j.at("name").get<std::string>();
  a.role = role_from_string(j.at("role").get<std::string>());
  a.kind = kind_from_string(j.at("kind").get<std::string>());
  if (a.kind == AttrKind::FixedLengthCode) a.code_length = j.at("length").get<int>();
  if (j.contains("hierarchy")) a.hierarchy = j.at("hierarchy").get<std::string>();
  return a;
}

json attribute_to_json(const AttributeSchema& a) {
  json j;
  j["name"] = a.name;
  j["role"] = to_string(a.role);
  j["kind"] = to_string(a.kind);
  if (a.kind == AttrKind::FixedLengthCode) j["length"] = a.code_length;
  if (!a.hierarchy.empty()) j["hierarchy"] = a.hierarchy;
  return j;
}

}  // namespace

Schema schema_from_json(const json& j) {
  std::vector<AttributeSchema> attrs;
  for (const auto& a : j.at("attributes")) attrs.push_back(attribute_from_json(a));
  return Schema(std::move(attrs));
}

json schema_to_json(const Schema& schema) {
  json attrs = json::array();
  for (const auto& a : schema.attributes()) attrs.push_back(attribute_to_json(a));
  return json{{"attributes", attrs}};
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_json_file(const json& j, const std::filesystem::path& path) {
  atomic_write_text(path, j.dump(2) + "\n");
}

Schema load_schema(const std::filesystem::path& path) {
  try {
    return schema_from_json(load_json_file(path));
  } catch (const json::exception& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  save_json_file(schema_to_json(schema), path);
}

void validate_value(const AttributeSchema& attr, const std::string& value,
                    const std::string& row_label) {
  if (value.empty())
    throw ValidationError(row_label + ", attribute '" + attr.name +
                          "': missing value (release preparation requires complete records)");
  switch (attr.kind) {
    case AttrKind::Categorical:
      break;
    case AttrKind::Integer: {
      int64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc() || ptr != value.data() + value.size() || std::to_string(v) != value)
        throw ValidationError(row_label + ", attribute '" + attr.name +
                              "': '" + value + "' is not a canonical integer");
      break;
    }
    case AttrKind::FixedLengthCode:
      if (value.size() != static_cast<size_t>(attr.code_length))
        throw ValidationError(row_label + ", attribute '" + attr.name + "': '" + value +
                              "' has length " + std::to_string(value.size()) + ", expected " +
                              std::to_string(attr.code_length));
      break;
  }
}

Dataset make_dataset(Schema schema, std::vector<std::vector<std::string>> rows) {
  Dataset ds;
  ds.schema = std::move(schema);
  ds.rows = std::move(rows);
  ds.record_ids.resize(ds.rows.size());
  for (size_t i = 0; i < ds.rows.size(); ++i) ds.record_ids[i] = static_cast<int64_t>(i);
  return ds;
}

namespace {

Dataset dataset_from_csv(CsvTable&& table, const Schema& schema, bool with_ids,
                         const std::filesystem::path& path) {
  std::vector<std::string> expected;
  if (with_ids) expected.push_back("record_id");
  for (const auto& a : schema.attributes()) expected.push_back(a.name);
  if (table.header != expected) {
    std::string got;
    for (const auto& h : table.header) got += (got.empty() ? "" : ",") + h;
    throw ValidationError(path.string() + ": header [" + got + "] does not match the schema");
  }

  Dataset ds;
  ds.schema = schema;
  ds.rows.reserve(table.rows.size());
  ds.record_ids.reserve(table.rows.size());
  for (size_t r = 0; r < table.rows.size(); ++r) {
    auto& row = table.rows[r];
    if (row.size() != expected.size())
      throw ValidationError(path.string() + ": row " + std::to_string(r) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(expected.size()));
    const std::string row_label = path.filename().string() + " row " + std::to_string(r);
    int64_t id = static_cast<int64_t>(r);
    size_t offset = 0;
    if (with_ids) {
      const std::string& field = row[0];
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), id);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw ValidationError(row_label + ": bad record_id '" + field + "'");
      offset = 1;
    }
    std::vector<std::string> values(row.begin() + offset, row.end());
    for (size_t c = 0; c < values.size(); ++c)
      validate_value(schema.at(c), values[c], row_label);
    ds.rows.push_back(std::move(values));
    ds.record_ids.push_back(id);
  }
  return ds;
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& path, const Schema& schema) {
  return dataset_from_csv(read_csv(path), schema, false, path);
}

Dataset load_dataset_with_ids(const std::filesystem::path& path, const Schema& schema) {
  return dataset_from_csv(read_csv(path), schema, true, path);
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path, bool with_record_ids) {
  std::vector<std::string> header;
  if (with_record_ids) header.push_back("record_id");
  for (const auto& a : ds.schema.attributes()) header.push_back(a.name);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(ds.size());
  for (size_t i = 0; i < ds.size(); ++i) {
    std::vector<std::string> row;
    row.reserve(header.size());
    if (with_record_ids) row.push_back(std::to_string(ds.record_ids[i]));
    for (const auto& v : ds.rows[i]) row.push_back(v);
    rows.push_back(std::move(row));
  }
  write_csv(path, header, rows);
}

Dataset strip_direct(const Dataset& ds) {
  std::vector<size_t> keep;
  for (size_t i = 0; i < ds.schema.size(); ++i)
    if (ds.schema.at(i).role != AttrRole::Direct) keep.push_back(i);
  return project_columns(ds, keep);
}

Dataset project_columns(const Dataset& ds, const std::vector<size_t>& cols) {
  Dataset out;
  out.schema = ds.schema.project(cols);
  out.rows.reserve(ds.size());
  for (const auto& row : ds.rows) {
    std::vector<std::string> picked;
    picked.reserve(cols.size());
    for (size_t c : cols) picked.push_back(row.at(c));
    out.rows.push_back(std::move(picked));
  }
  out.record_ids = ds.record_ids;
  return out;
}

Dataset sample_uniform(const Dataset& ds, size_t n, uint64_t seed) {
  if (n > ds.size())
    throw ValidationError("sample size " + std::to_string(n) +
                          " exceeds dataset size " + std::to_string(ds.size()));
  Rng rng(seed);
  auto picked = sample_indices(rng, ds.size(), n);
  Dataset out;
  out.schema = ds.schema;
  out.rows.reserve(n);
  out.record_ids.reserve(n);
  for (uint64_t idx : picked) {
    out.rows.push_back(ds.rows[idx]);
    out.record_ids.push_back(ds.record_ids[idx]);
  }
  return out;
}

}  // namespace anonkit
