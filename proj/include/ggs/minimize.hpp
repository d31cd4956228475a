#pragma once

#include <functional>

#include <Eigen/Dense>

namespace ggs {

using Fn1 = std::function<double(double)>;

struct MinResult {
  double x = 0.0;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Golden-section minimization of a unimodal function on [a, b].
MinResult golden_min(const Fn1& f, double a, double b, double xtol, int max_iter = 400);

/// Minimize f over [zlo, zhi] (both > 0) by scanning a log-spaced grid of n
/// points and refining the best bracket with golden section in log space.
/// stol is the golden-section tolerance in the log variable.
MinResult log_scan_min(const Fn1& f, double zlo, double zhi, int n = 61, double stol = 1e-12);

/// Expand a bracket downhill from x0 by geometric steps, staying inside
/// [-bound, bound].  Returns false if no interior bracket was found (the
/// minimum appears to sit at the search boundary).
bool bracket_downhill(const Fn1& f, double x0, double step, double bound, double& a, double& b);

struct NdMaxResult {
  Eigen::VectorXd x;
  double f = 0.0;
  bool converged = false;
  int iters = 0;
};

/// Maximize a smooth concave function on R^n by damped Newton iteration with
/// finite-difference derivatives.  Non-finite trial values are treated as
/// -infinity by the line search, so f may throw or return inf outside its
/// effective domain.
NdMaxResult concave_max(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, double gtol = 1e-11, int max_iter = 100);

}  // namespace ggs
