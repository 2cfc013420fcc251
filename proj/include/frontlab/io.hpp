#pragma once

// CSV artifacts: '#'-prefixed "key = value" metadata lines, one header row,
// then numeric or text rows.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace frontlab {

using Metadata = std::vector<std::pair<std::string, std::string>>;

struct CsvTable {
  Metadata meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> row);
  void add_numeric_row(const std::vector<double>& row);
};

/// Quotes a field when it contains a comma, quote, or line break.
std::string csv_field(const std::string& text);

std::string render_csv(const CsvTable& table);

/// Creates parent directories; throws std::runtime_error on I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace frontlab
