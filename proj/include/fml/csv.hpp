#pragma once

// CSV dataset files: comma separated, '.' decimal point, header row naming
// the input variables plus one desired-output column (last), LF endings.

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fml/dataset.hpp"

namespace fml {

struct SchemaMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonNumericCell : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace csv_detail {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  double v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    throw NonNumericCell("row " + std::to_string(row) + ", column " + std::to_string(col) +
                         ": '" + cell + "' is not a number");
  return v;
}

inline std::string format_cell(double v) {
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.6f", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

}  // namespace csv_detail

inline Dataset read_csv_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaMismatch("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line) || line.empty())
    throw SchemaMismatch("'" + path + "': missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = csv_detail::split_line(line);
  if (header.size() < 2)
    throw SchemaMismatch("'" + path + "': header needs at least one input and one output column");

  Dataset ds;
  ds.input_names.assign(header.begin(), header.end() - 1);
  ds.desired_name = header.back();

  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = csv_detail::split_line(line);
    if (cells.size() != header.size())
      throw SchemaMismatch("'" + path + "' row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
    Record r;
    for (std::size_t i = 0; i + 1 < cells.size(); ++i)
      r.inputs.push_back(csv_detail::parse_cell(cells[i], row, i + 1));
    r.desired = csv_detail::parse_cell(cells.back(), row, cells.size());
    ds.records.push_back(std::move(r));
  }
  return ds;
}

inline void write_csv_dataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < ds.input_names.size(); ++i) out << ds.input_names[i] << ',';
  out << ds.desired_name << '\n';
  for (const auto& r : ds.records) {
    for (double v : r.inputs) out << csv_detail::format_cell(v) << ',';
    out << csv_detail::format_cell(r.desired) << '\n';
  }
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace fml
