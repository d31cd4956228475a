#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ggs {

/// Solve a tridiagonal system in place (Thomas algorithm).
/// lower has size n-1 (sub-diagonal), diag size n, upper size n-1.
Eigen::VectorXd tridiag_solve(std::vector<double> lower, std::vector<double> diag,
                              std::vector<double> upper, Eigen::VectorXd rhs);

/// Dense matrix exponential by scaling and squaring with a Taylor kernel;
/// adequate for the small generator matrices used here.
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);

/// One-dimensional null vector of a square matrix via full-pivot LU.
/// Throws std::runtime_error if the kernel is not one-dimensional.
Eigen::VectorXd null_vector(const Eigen::MatrixXd& a);

}  // namespace ggs
