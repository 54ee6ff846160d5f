#pragma once

#include <string>
#include <vector>

namespace stss {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-delimited UTF-8 file whose first row is the header.
/// Supports double-quoted fields with "" escapes; cells are whitespace-trimmed.
/// Throws std::runtime_error on I/O failure or ragged rows.
CsvTable read_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace stss
