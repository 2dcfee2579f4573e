#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "anonkit/dataset.hpp"

namespace anonkit {

nlohmann::json load_json_file(const std::filesystem::path& path);
void save_json_file(const nlohmann::json& j, const std::filesystem::path& path);

Schema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const Schema& schema);

}  // namespace anonkit
