#include "altmin/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "altmin/errors.hpp"

namespace altmin {

int TraceTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

void TraceTable::add_column(const std::string& name, const std::vector<double>& values) {
  if (!rows.empty() && values.size() != rows.size())
    throw ConfigError("TraceTable: column length mismatch");
  if (rows.empty()) rows.resize(values.size());
  columns.push_back(name);
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].push_back(values[r]);
}

std::vector<double> TraceTable::column(const std::string& name) const {
  const int idx = column_index(name);
  if (idx < 0) throw ConfigError("TraceTable: no column named " + name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[static_cast<std::size_t>(idx)]);
  return out;
}

std::string to_csv(const TraceTable& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
  out << "\n";
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[i]);
      out << buf << (i + 1 < row.size() ? "," : "");
    }
    out << "\n";
  }
  return out.str();
}

void write_csv(const TraceTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("trace: cannot open " + path.string() + " for writing");
  out << to_csv(table);
}

TraceTable csv_from_string(const std::string& text) {
  TraceTable table;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace: empty CSV");
  std::istringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) table.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      if (cell == "nan" || cell.empty())
        values.push_back(std::numeric_limits<double>::quiet_NaN());
      else
        values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (values.size() != table.columns.size())
      throw ConfigError("trace: ragged CSV row");
    table.rows.push_back(std::move(values));
  }
  return table;
}

TraceTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("trace: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return csv_from_string(ss.str());
}

}  // namespace altmin
