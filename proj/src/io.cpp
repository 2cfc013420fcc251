#include "frontlab/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "frontlab/format.hpp"

namespace frontlab {

std::string fmt_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string fmt_int(long long x) { return std::to_string(x); }

void CsvTable::add_row(std::vector<std::string> row) { rows.push_back(std::move(row)); }

void CsvTable::add_numeric_row(const std::vector<double>& row) {
  std::vector<std::string> text;
  text.reserve(row.size());
  for (double x : row) text.push_back(fmt_double(x));
  rows.push_back(std::move(text));
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const auto& [key, value] : table.meta) out += "# " + key + " = " + value + "\n";
  const auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_field(cells[i]);
    }
    out += "\n";
  };
  line(table.columns);
  for (const auto& row : table.rows) line(row);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  write_text(path, render_csv(table));
}

}  // namespace frontlab
