#include "ggs/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ggs {

std::string format_number(double v) {
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return std::string(buf);
}

void write_csv_row(std::ostream& os, const std::vector<double>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << format_number(row[i]);
  }
  os << '\n';
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (const auto& r : rows) write_csv_row(os, r);
}

Eigen::MatrixXd read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv_matrix: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    bool bad = false;
    std::string tok;
    while (ss >> tok) {
      try {
        size_t used = 0;
        v = std::stod(tok, &used);
        if (used != tok.size()) { bad = true; break; }
      } catch (const std::exception&) {
        bad = true;
        break;
      }
      row.push_back(v);
    }
    if (bad && rows.empty()) continue;  // tolerate a single header line
    if (bad) throw std::runtime_error("read_csv_matrix: non-numeric data in " + path);
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("read_csv_matrix: no data in " + path);
  const size_t cols = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != cols) throw std::runtime_error("read_csv_matrix: ragged rows in " + path);
  Eigen::MatrixXd m(rows.size(), cols);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
  return m;
}

}  // namespace ggs
