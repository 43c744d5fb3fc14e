#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dgibbs/errors.hpp"

namespace dgibbs {

// Comma-separated table, first row is the header. Cells stay strings; the
// caller decides which columns are numeric.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("csv: cannot open " + path, 0);
  CsvTable table;
  std::string line;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (row_no == 1) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size())
        throw ParseError("csv: row " + std::to_string(row_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(table.header.size()),
                         row_no);
      table.rows.push_back(std::move(cells));
    }
  }
  if (table.header.empty()) throw ParseError("csv: empty file " + path, 0);
  return table;
}

inline double csv_numeric(const std::string& cell, std::size_t row_no, const std::string& col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(cell, &pos);
    if (pos != cell.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ParseError("csv: non-numeric value '" + cell + "' in column " + col + ", row " +
                         std::to_string(row_no),
                     row_no);
  }
}

}  // namespace dgibbs
