#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace altmin {

/// Column-ordered numeric table; the CSV surface of every trace. Missing
/// values are NaN and serialize as "nan".
struct TraceTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;  // -1 when absent
  void add_column(const std::string& name, const std::vector<double>& values);
  std::vector<double> column(const std::string& name) const;
};

void write_csv(const TraceTable& table, const std::filesystem::path& path);
std::string to_csv(const TraceTable& table);
TraceTable read_csv(const std::filesystem::path& path);
TraceTable csv_from_string(const std::string& text);

}  // namespace altmin
