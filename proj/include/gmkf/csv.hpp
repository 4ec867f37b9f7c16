#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gmkf/common.hpp"

namespace gmkf {

/// Doubles are serialized with 17 significant digits so files round-trip
/// bit-exactly.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t c = 0; c < header.size(); ++c)
      if (header[c] == name) return static_cast<int>(c);
    return -1;
  }
  int require_column(const std::string& name) const {
    const int c = column(name);
    if (c < 0) throw ConfigError("missing required CSV column: " + name);
    return c;
  }
  double number(std::size_t row, int col) const {
    const std::string& cell = rows.at(row).at(col);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      return v;
    } catch (const std::exception&) {
      throw DataError("non-numeric CSV cell '" + cell + "' in column " +
                      header.at(col));
    }
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      table.header = std::move(cells);
      first = false;
      continue;
    }
    if (cells.size() != table.header.size())
      throw DataError("CSV row width does not match header in " + path);
    table.rows.push_back(std::move(cells));
  }
  if (first) throw DataError("CSV file has no header: " + path);
  return table;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw DataError("cannot open output file: " + path);
  }
  void header(const std::vector<std::string>& names) {
    for (std::size_t c = 0; c < names.size(); ++c)
      out_ << (c ? "," : "") << names[c];
    out_ << "\n";
  }
  void raw_row(const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c)
      out_ << (c ? "," : "") << cells[c];
    out_ << "\n";
  }
  void row(const std::vector<double>& values) {
    for (std::size_t c = 0; c < values.size(); ++c)
      out_ << (c ? "," : "") << format_double(values[c]);
    out_ << "\n";
  }

 private:
  std::ofstream out_;
};

/// FNV-1a over the canonical serialized configuration.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gmkf
