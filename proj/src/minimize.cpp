#include "ggs/minimize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ggs {

namespace {
constexpr double kGolden = 0.6180339887498949;  // (sqrt(5)-1)/2

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
  try {
    double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  } catch (const std::exception&) {
    return -std::numeric_limits<double>::infinity();
  }
}
}  // namespace

MinResult golden_min(const Fn1& f, double a, double b, double xtol, int max_iter) {
  MinResult res;
  if (!(b > a)) throw std::invalid_argument("golden_min: empty interval");
  double x1 = b - kGolden * (b - a);
  double x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  res.evals = 2;
  int it = 0;
  while ((b - a) > xtol && it < max_iter) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
    ++res.evals;
    ++it;
  }
  res.converged = (b - a) <= xtol;
  res.x = 0.5 * (a + b);
  res.f = f(res.x);
  ++res.evals;
  // keep the best point actually seen
  if (f1 < res.f) { res.x = x1; res.f = f1; }
  if (f2 < res.f) { res.x = x2; res.f = f2; }
  return res;
}

MinResult log_scan_min(const Fn1& f, double zlo, double zhi, int n, double stol) {
  if (!(zlo > 0.0) || !(zhi > zlo)) throw std::invalid_argument("log_scan_min: need 0 < zlo < zhi");
  if (n < 3) throw std::invalid_argument("log_scan_min: need at least 3 scan points");
  const double slo = std::log(zlo), shi = std::log(zhi);
  int best = 0;
  double fbest = std::numeric_limits<double>::infinity();
  std::vector<double> ss(n);
  for (int k = 0; k < n; ++k) {
    ss[k] = slo + (shi - slo) * k / (n - 1);
    double v = f(std::exp(ss[k]));
    if (v < fbest) { fbest = v; best = k; }
  }
  double a = ss[std::max(0, best - 1)];
  double b = ss[std::min(n - 1, best + 1)];
  auto g = [&f](double s) { return f(std::exp(s)); };
  MinResult r = golden_min(g, a, b, stol);
  r.evals += n;
  r.x = std::exp(r.x);
  if (fbest < r.f) { r.x = std::exp(ss[best]); r.f = fbest; }
  return r;
}

bool bracket_downhill(const Fn1& f, double x0, double step, double bound, double& a, double& b) {
  double f0 = f(x0);
  double dir = (f(x0 + step) < f0) ? 1.0 : -1.0;
  double h = dir * step;
  double x_prev = x0, x_cur = x0 + h;
  double f_cur = f(x_cur);
  if (f_cur >= f0) {
    // minimum already bracketed between the two probes
    a = std::min(x0 - step, x0 + step);
    b = std::max(x0 - step, x0 + step);
    return true;
  }
  while (true) {
    h *= 2.0;
    double x_next = x_cur + h;
    if (x_next > bound || x_next < -bound) {
      double edge = (h > 0) ? bound : -bound;
      if (f(edge) < f_cur) return false;  // still descending at the search boundary
      a = std::min(x_prev, edge);
      b = std::max(x_prev, edge);
      return true;
    }
    double f_next = f(x_next);
    if (f_next >= f_cur) {
      a = std::min(x_prev, x_next);
      b = std::max(x_prev, x_next);
      return true;
    }
    x_prev = x_cur;
    x_cur = x_next;
    f_cur = f_next;
  }
}

NdMaxResult concave_max(const std::function<double(const Eigen::VectorXd&)>& f,
                        Eigen::VectorXd x0, double gtol, int max_iter) {
  const int n = static_cast<int>(x0.size());
  NdMaxResult res;
  res.x = x0;
  res.f = safe_eval(f, x0);
  if (!std::isfinite(res.f)) throw std::invalid_argument("concave_max: infeasible start");

  auto gradient = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(n);
    for (int j = 0; j < n; ++j) {
      double h = 1e-6 * (1.0 + std::abs(x[j]));
      Eigen::VectorXd xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      g[j] = (safe_eval(f, xp) - safe_eval(f, xm)) / (2.0 * h);
    }
    return g;
  };

  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd g = gradient(res.x);
    if (g.lpNorm<Eigen::Infinity>() < gtol) {
      res.converged = true;
      res.iters = it;
      return res;
    }
    // finite-difference Hessian (symmetrized)
    Eigen::MatrixXd H(n, n);
    for (int j = 0; j < n; ++j) {
      double h = 1e-5 * (1.0 + std::abs(res.x[j]));
      Eigen::VectorXd xp = res.x;
      xp[j] += h;
      Eigen::VectorXd gp = gradient(xp);
      H.col(j) = (gp - g) / h;
    }
    H = 0.5 * (H + H.transpose());

    Eigen::VectorXd dx;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-H);  // -H should be positive definite
    bool use_newton = (ldlt.info() == Eigen::Success);
    if (use_newton) {
      dx = ldlt.solve(g);
      if (!dx.allFinite() || g.dot(dx) <= 0.0) use_newton = false;
    }
    if (!use_newton) dx = g / std::max(1.0, g.lpNorm<Eigen::Infinity>());

    double t = 1.0;
    double slope = g.dot(dx);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd xt = res.x + t * dx;
      double ft = safe_eval(f, xt);
      if (std::isfinite(ft) && ft >= res.f + 1e-4 * t * slope) {
        res.x = xt;
        res.f = ft;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      res.iters = it;
      res.converged = g.lpNorm<Eigen::Infinity>() < 1e3 * gtol;
      return res;  // stalled: best point found
    }
  }
  res.iters = max_iter;
  return res;
}

}  // namespace ggs
