#pragma once
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

// Report plumbing: atomic file writes (temp + rename) and CSV assembly.

namespace dforge {

// Writes content to path atomically: the file either has the old content or
// the complete new content, never a partial write.
void atomic_write(const std::filesystem::path& path, const std::string& content);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::string to_string() const;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace dforge
