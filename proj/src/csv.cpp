#include "polebasis/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "polebasis/errors.hpp"

namespace polebasis {

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return int(i);
  return -1;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) fail(ErrorKind::IoFailure, "write_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    std::fprintf(f, "%s%s", header[i].c_str(),
                 i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      std::fclose(f);
      fail(ErrorKind::Internal, "write_csv: ragged row in " + path);
    }
    for (std::size_t i = 0; i < row.size(); ++i)
      std::fprintf(f, "%.17g%s", row[i], i + 1 < row.size() ? "," : "\n");
  }
  std::fclose(f);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoFailure, "read_csv: cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(in, line))
    fail(ErrorKind::IoFailure, "read_csv: empty file " + path);
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      // strtod instead of stod: subnormal values must not raise.
      const char* begin = cell.c_str();
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0')
        fail(ErrorKind::IoFailure, "read_csv: non-numeric cell in " + path);
      row.push_back(v);
    }
    if (row.size() != table.header.size())
      fail(ErrorKind::IoFailure, "read_csv: ragged row in " + path);
    table.rows.push_back(std::move(row));
  }
  return table;
}

void read_two_column(const std::string& path, std::vector<double>& first,
                     std::vector<double>& second) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoFailure, "read_two_column: cannot open " + path);
  first.clear();
  second.clear();
  std::string line;
  bool maybe_header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string c1, c2;
    if (!std::getline(ss, c1, ',') || !std::getline(ss, c2, ','))
      fail(ErrorKind::IoFailure, "read_two_column: need two columns in " + path);
    try {
      double v1 = std::stod(c1);
      double v2 = std::stod(c2);
      first.push_back(v1);
      second.push_back(v2);
    } catch (...) {
      if (maybe_header) {  // tolerate one header line
        maybe_header = false;
        continue;
      }
      fail(ErrorKind::IoFailure, "read_two_column: non-numeric row in " + path);
    }
    maybe_header = false;
  }
  if (first.empty())
    fail(ErrorKind::IoFailure, "read_two_column: no data in " + path);
}

}  // namespace polebasis
