#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lge {

// Small RFC 4180 subset: comma separated, double-quoted fields may contain
// commas, quotes ("") and newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name; throws ValidationError when absent.
  std::size_t column(std::string_view name) const;
  bool has_column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

std::string csv_escape(std::string_view field);
std::string csv_line(const std::vector<std::string>& fields);

}  // namespace lge
