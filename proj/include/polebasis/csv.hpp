#ifndef POLEBASIS_CSV_HPP
#define POLEBASIS_CSV_HPP

#include <string>
#include <vector>

namespace polebasis {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

// Numeric CSV with a single header line; values written with %.17g so that
// a write/read round trip is bit-exact.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
CsvTable read_csv(const std::string& path);

// Two-column convenience used for tabulated densities and sampled signals.
void read_two_column(const std::string& path, std::vector<double>& first,
                     std::vector<double>& second);

}  // namespace polebasis

#endif
