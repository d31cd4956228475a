#include "ggs/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace ggs {

Eigen::VectorXd tridiag_solve(std::vector<double> lower, std::vector<double> diag,
                              std::vector<double> upper, Eigen::VectorXd rhs) {
  const int n = static_cast<int>(diag.size());
  if (static_cast<int>(lower.size()) != n - 1 || static_cast<int>(upper.size()) != n - 1 ||
      rhs.size() != n)
    throw std::invalid_argument("tridiag_solve: inconsistent sizes");
  for (int i = 1; i < n; ++i) {
    double m = lower[i - 1] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  Eigen::VectorXd x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw std::invalid_argument("expm: matrix must be square");
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (nrm > 0.5) {
    nrm *= 0.5;
    ++s;
  }
  Eigen::MatrixXd b = a / std::pow(2.0, s);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd sum = term;
  for (int k = 1; k <= 30; ++k) {
    term = (term * b) / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18) break;
  }
  for (int k = 0; k < s; ++k) sum = sum * sum;
  return sum;
}

Eigen::VectorXd null_vector(const Eigen::MatrixXd& a) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  lu.setThreshold(1e-10);  // relative to the largest pivot
  Eigen::MatrixXd ker = lu.kernel();
  // Eigen reports an empty kernel as a single zero column
  if (ker.cols() != 1 || ker.col(0).lpNorm<Eigen::Infinity>() < 1e-14)
    throw std::runtime_error("null_vector: kernel dimension is not one (matrix reducible?)");
  return ker.col(0);
}

}  // namespace ggs
