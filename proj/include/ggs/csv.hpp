#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ggs {

/// Format a double with enough digits to round-trip, locale-independent.
std::string format_number(double v);

/// Write one CSV row of doubles.
void write_csv_row(std::ostream& os, const std::vector<double>& row);

/// Write a header plus rows.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

/// Read a plain numeric CSV (comma- or whitespace-separated, '#' comments,
/// optional non-numeric header line skipped) into a dense matrix.
Eigen::MatrixXd read_csv_matrix(const std::string& path);

}  // namespace ggs
