#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace anonkit {

// Plain comma-separated text: first row is the header, UTF-8, no quoting or
// escaping. Values therefore must not contain commas or newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// All file output goes through here: write a sibling temp file, then rename
// into place so readers never observe a half-written artifact.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::vector<std::string> split_fields(const std::string& line, char delim);

}  // namespace anonkit
