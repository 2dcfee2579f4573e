#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace anonkit {

enum class AttrRole { Direct, Quasi, Sensitive };
enum class AttrKind { Categorical, Integer, FixedLengthCode };

std::string to_string(AttrRole role);
std::string to_string(AttrKind kind);
AttrRole role_from_string(const std::string& s);
AttrKind kind_from_string(const std::string& s);

struct AttributeSchema {
  std::string name;
  AttrRole role = AttrRole::Quasi;
  AttrKind kind = AttrKind::Categorical;
  int code_length = 0;     // fixed-length-code attributes only
  std::string hierarchy;   // quasi attributes: name of the generalization rule
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<AttributeSchema> attrs);

  size_t size() const { return attrs_.size(); }
  const AttributeSchema& at(size_t i) const { return attrs_.at(i); }
  const std::vector<AttributeSchema>& attributes() const { return attrs_; }
  std::optional<size_t> index_of(const std::string& name) const;
  std::vector<size_t> indices(AttrRole role) const;
  std::vector<std::string> names() const;
  Schema project(const std::vector<size_t>& cols) const;

 private:
  std::vector<AttributeSchema> attrs_;
};

Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

// Rows of strings, aligned with the schema. record_ids identify rows across
// derived artifacts; on load they are the 0-based source row order.
struct Dataset {
  Schema schema;
  std::vector<std::vector<std::string>> rows;
  std::vector<int64_t> record_ids;

  size_t size() const { return rows.size(); }
};

// Checks a single value against the attribute's kind. row_label is used in
// error messages ("row 17").
void validate_value(const AttributeSchema& attr, const std::string& value,
                    const std::string& row_label);

Dataset make_dataset(Schema schema, std::vector<std::vector<std::string>> rows);
Dataset load_dataset(const std::filesystem::path& path, const Schema& schema);
// Expects a leading record_id column (the format save_dataset emits with ids).
Dataset load_dataset_with_ids(const std::filesystem::path& path, const Schema& schema);
void save_dataset(const Dataset& ds, const std::filesystem::path& path, bool with_record_ids);

Dataset strip_direct(const Dataset& ds);
Dataset project_columns(const Dataset& ds, const std::vector<size_t>& cols);
Dataset sample_uniform(const Dataset& ds, size_t n, uint64_t seed);

}  // namespace anonkit
