#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace dppss {

/// Header plus rows of already formatted cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest round-trippable decimal ("%.17g" trimmed), '.' separator.
std::string format_number(double v);

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace dppss
