#include "ggs/value_functions.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ggs/minimize.hpp"
#include "ggs/quadrature.hpp"

namespace ggs {

double g_closed(double alpha, double u0, double u1) {
  if (!(u0 > 0.0) || !(u1 > 0.0)) throw std::invalid_argument("g_closed: endpoints must be positive");
  double s = std::sqrt(u0 * u1);
  return s * cosh_c(alpha / s) + s * cosh_star(std::log(u1) - std::log(u0));
}

Parabola g_minimizer(double alpha, double u0, double u1) {
  if (!(u0 > 0.0) || !(u1 > 0.0))
    throw std::invalid_argument("g_minimizer: endpoints must be positive");
  Parabola p;
  p.u0 = u0;
  p.u1 = u1;
  p.b = u0 + u1 - std::sqrt(alpha * alpha + 4.0 * u0 * u1);
  return p;
}

namespace {

// Exact piecewise-linear interval integrals in log coordinates s = log u.
// Q = (s_b - s_a)/(u_b - u_a) = 1/LogMean, P = (u_b - u_a)(s_b - s_a); both
// smooth across s_a = s_b via the sinh form.
double sinh_ratio(double d) {  // (d/2)/sinh(d/2)
  if (std::abs(d) < 1e-4) return 1.0 - d * d / 24.0 + 7.0 * d * d * d * d / 5760.0;
  return 0.5 * d / std::sinh(0.5 * d);
}

double sinh_ratio_d(double d) {  // derivative of sinh_ratio
  if (std::abs(d) < 1e-4) return -d / 12.0 + 7.0 * d * d * d / 1440.0;
  double h = 0.5 * d;
  double sh = std::sinh(h);
  return 0.5 * (sh - h * std::cosh(h)) / (sh * sh);
}

struct EdgeQ {
  double value, da, db;
};

EdgeQ edge_q(double sa, double sb) {
  double m = 0.5 * (sa + sb), d = sb - sa;
  double e = std::exp(-m), g = sinh_ratio(d), gd = sinh_ratio_d(d);
  EdgeQ q;
  q.value = e * g;
  q.db = -0.5 * e * g + e * gd;
  q.da = -0.5 * e * g - e * gd;
  return q;
}

struct EdgeP {
  double value, da, db;
};

EdgeP edge_p(double sa, double sb) {
  double ea = std::exp(sa), eb = std::exp(sb), d = sb - sa;
  EdgeP p;
  p.value = (eb - ea) * d;
  p.db = eb * d + (eb - ea);
  p.da = -ea * d - (eb - ea);
  return p;
}

// Minimize F(s) = sum_k [A_k Q_k + B_k P_k] - harm_num / (h * sum_k Q_k)
// over interior log-values with fixed endpoints, by damped Newton with an
// analytic gradient and a finite-difference Hessian (Levenberg shift when
// the Newton direction fails to descend).
struct ChainProblem {
  std::vector<double> a_coef, b_coef;  // per edge, size M
  double harm_num = 0.0;
  double s_left = 0.0, s_right = 0.0;
  double h = 0.0;
  int m = 0;  // number of edges

  double eval(const Eigen::VectorXd& s_int, Eigen::VectorXd* grad) const {
    const int n = m - 1;
    auto s_at = [&](int k) {
      if (k == 0) return s_left;
      if (k == m) return s_right;
      return s_int[k - 1];
    };
    if (grad) grad->setZero(n);
    double f = 0.0, qsum = 0.0;
    Eigen::VectorXd qgrad;
    if (harm_num != 0.0) qgrad.setZero(n);
    for (int k = 0; k < m; ++k) {
      double sa = s_at(k), sb = s_at(k + 1);
      EdgeQ q = edge_q(sa, sb);
      EdgeP p = edge_p(sa, sb);
      f += a_coef[k] * q.value + b_coef[k] * p.value;
      qsum += q.value;
      if (grad) {
        if (k >= 1) (*grad)[k - 1] += a_coef[k] * q.da + b_coef[k] * p.da;
        if (k + 1 <= n) (*grad)[k] += a_coef[k] * q.db + b_coef[k] * p.db;
      }
      if (harm_num != 0.0 && qgrad.size() > 0) {
        if (k >= 1) qgrad[k - 1] += q.da;
        if (k + 1 <= n) qgrad[k] += q.db;
      }
    }
    if (harm_num != 0.0) {
      double s_int_total = h * qsum;
      f -= harm_num / s_int_total;
      if (grad) *grad += (harm_num / (s_int_total * s_int_total)) * h * qgrad;
    }
    return f;
  }
};

BruteResult chain_newton(const ChainProblem& prob, Eigen::VectorXd s) {
  const int n = prob.m - 1;
  BruteResult res;
  Eigen::VectorXd grad(n);
  double f = prob.eval(s, &grad);
  const int max_iter = 80;
  for (int iter = 0; iter < max_iter; ++iter) {
    res.iterations = iter;
    double gnorm = grad.lpNorm<Eigen::Infinity>();
    // rounding in the per-edge sums floors the attainable gradient around
    // 1e-9 for chains of a few hundred nodes; 1e-8 still leaves the value
    // accurate to ~1e-16 near a nondegenerate minimum
    if (gnorm < 1e-8 * (1.0 + std::abs(f))) {
      res.converged = true;
      break;
    }
    // finite-difference Hessian from the analytic gradient
    Eigen::MatrixXd hess(n, n);
    for (int j = 0; j < n; ++j) {
      double hj = 1e-6 * (1.0 + std::abs(s[j]));
      Eigen::VectorXd sp = s;
      sp[j] += hj;
      Eigen::VectorXd gp(n);
      prob.eval(sp, &gp);
      hess.col(j) = (gp - grad) / hj;
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    double mu = 0.0;
    Eigen::VectorXd dir;
    for (int attempt = 0; attempt < 30; ++attempt) {
      Eigen::MatrixXd shifted = hess;
      shifted.diagonal().array() += mu;
      dir = shifted.ldlt().solve(-grad);
      if (dir.allFinite() && dir.dot(grad) < 0.0) break;
      mu = (mu == 0.0) ? 1e-6 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff()) : 10.0 * mu;
    }
    if (!dir.allFinite() || dir.dot(grad) >= 0.0) dir = -grad;
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      Eigen::VectorXd cand = s + step * dir;
      Eigen::VectorXd gc(n);
      double fc = prob.eval(cand, &gc);
      if (std::isfinite(fc) && fc <= f + 1e-4 * step * dir.dot(grad)) {
        s = cand;
        f = fc;
        grad = gc;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at this scale
  }
  res.grad_norm = grad.lpNorm<Eigen::Infinity>();
  res.value = f;
  res.profile.resize(prob.m + 1);
  res.profile.front() = std::exp(prob.s_left);
  res.profile.back() = std::exp(prob.s_right);
  for (int j = 0; j < n; ++j) res.profile[j + 1] = std::exp(s[j]);
  return res;
}

Eigen::VectorXd log_linear_start(double s_left, double s_right, int m) {
  Eigen::VectorXd s(m - 1);
  for (int j = 1; j < m; ++j) s[j - 1] = s_left + (s_right - s_left) * j / m;
  return s;
}

}  // namespace

BruteResult g_brute(double alpha, double u0, double u1, int grid) {
  if (grid < 50) throw std::invalid_argument("g_brute: grid must be at least 50");
  ChainProblem prob;
  prob.m = grid;
  prob.h = 1.0 / grid;
  prob.s_left = std::log(u0);
  prob.s_right = std::log(u1);
  prob.a_coef.assign(grid, 0.5 * alpha * alpha * prob.h);
  prob.b_coef.assign(grid, 0.5 / prob.h);
  return chain_newton(prob, log_linear_start(prob.s_left, prob.s_right, grid));
}

double harm_mean(const std::function<double(double)>& f, int panels) {
  double inv = gauss5([&f](double y) { return 1.0 / f(y); }, 0.0, 1.0, panels);
  return 1.0 / inv;
}

double g_hat(double alpha, double u0, double u1, const std::function<double(double)>& a_fun,
             const std::function<double(double)>& w_fun) {
  double a_star = harm_mean([&](double y) { return a_fun(y) * w_fun(y); });
  double w0 = w_fun(0.0), w1 = w_fun(1.0);
  double s = std::sqrt(u0 * u1 / (w0 * w1));
  return a_star * s * cosh_c(alpha / (a_star * s)) +
         a_star * s * cosh_star(std::log(u0 * w1) - std::log(u1 * w0));
}

double g_hat_rescaled(double alpha, double u0, double u1,
                      const std::function<double(double)>& a_fun,
                      const std::function<double(double)>& w_fun) {
  double a_star = harm_mean([&](double y) { return a_fun(y) * w_fun(y); });
  return a_star * g_closed(alpha / a_star, u0 / w_fun(0.0), u1 / w_fun(1.0));
}

BruteResult g_hat_brute(double alpha, double u0, double u1,
                        const std::function<double(double)>& a_fun,
                        const std::function<double(double)>& w_fun, int grid) {
  if (grid < 50) throw std::invalid_argument("g_hat_brute: grid must be at least 50");
  // In the relative density V = U/W the cost is int alpha^2/(2cV) + c V'^2/(2V)
  // with c = A W, so the chain machinery applies with per-edge weights c at
  // interval midpoints.
  ChainProblem prob;
  prob.m = grid;
  prob.h = 1.0 / grid;
  prob.s_left = std::log(u0 / w_fun(0.0));
  prob.s_right = std::log(u1 / w_fun(1.0));
  prob.a_coef.resize(grid);
  prob.b_coef.resize(grid);
  for (int k = 0; k < grid; ++k) {
    double ymid = (k + 0.5) * prob.h;
    double c = a_fun(ymid) * w_fun(ymid);
    prob.a_coef[k] = 0.5 * alpha * alpha * prob.h / c;
    prob.b_coef[k] = 0.5 * c / prob.h;
  }
  return chain_newton(prob, log_linear_start(prob.s_left, prob.s_right, grid));
}

double n_closed(double delta, double v0, double v1) {
  if (!(v0 > 0.0) || !(v1 > 0.0)) throw std::invalid_argument("n_closed: endpoints must be positive");
  double s = std::sqrt(v0 * v1);
  return s * cosh_star(std::log(v1) - std::log(v0)) - s * cosh_star(delta);
}

namespace {

void check_profile(const std::vector<double>& v) {
  if (v.size() < 3) throw std::invalid_argument("profile needs at least 3 grid values");
  for (double x : v)
    if (!(x > 0.0)) throw std::invalid_argument("profile must be strictly positive");
}

// chain integral int v'^2/(2v) and resistance int dz/v for the piecewise
// linear interpolant of v on the uniform grid (both exact via log means)
void chain_and_resistance(const std::vector<double>& v, double* chain, double* resist) {
  const int m = static_cast<int>(v.size()) - 1;
  const double h = 1.0 / m;
  double c = 0.0, r = 0.0;
  for (int k = 0; k < m; ++k) {
    double lam = log_mean(v[k + 1], v[k]);
    double dv = v[k + 1] - v[k];
    c += dv * dv / (2.0 * h * lam);
    r += h / lam;
  }
  *chain = c;
  *resist = r;
}

}  // namespace

double m_of_profile(double delta, const std::vector<double>& v) {
  check_profile(v);
  double chain, resist;
  chain_and_resistance(v, &chain, &resist);
  return chain - 0.5 * delta * delta / resist;
}

double m_sup_numeric(double delta, const std::vector<double>& v) {
  check_profile(v);
  const int m = static_cast<int>(v.size()) - 1;
  const double h = 1.0 / m;
  double chain, resist;
  chain_and_resistance(v, &chain, &resist);
  // sup over tilt increments d_k with sum d_k = delta of -(1/2) sum d_k^2 w_k / h^2
  // where w_k = trapezoidal int of v over the interval; the quadratic program
  // is solved exactly by its multiplier: d_k proportional to h^2 / w_k.
  double denom = 0.0;
  for (int k = 0; k < m; ++k) denom += h * h / (0.5 * h * (v[k] + v[k + 1]));
  double sup_val = -0.5 * delta * delta / denom;
  return chain + sup_val;
}

double m_bridge_profile(double delta, const std::vector<double>& v) {
  check_profile(v);
  double chain, resist;
  chain_and_resistance(v, &chain, &resist);
  auto objective = [&](double alpha) {
    // alpha-dependent part of the chain cost: alpha^2/2 * int dz/v
    return chain + 0.5 * alpha * alpha * resist - alpha * delta;
  };
  double bound = std::abs(delta) / resist + 10.0;
  return golden_min(objective, -bound, bound, 1e-12 * (1.0 + std::abs(delta))).f;
}

BruteResult n_brute(double delta, double v0, double v1, int grid) {
  if (grid < 50) throw std::invalid_argument("n_brute: grid must be at least 50");
  ChainProblem prob;
  prob.m = grid;
  prob.h = 1.0 / grid;
  prob.s_left = std::log(v0);
  prob.s_right = std::log(v1);
  prob.a_coef.assign(grid, 0.0);
  prob.b_coef.assign(grid, 0.5 / prob.h);
  prob.harm_num = 0.5 * delta * delta;
  return chain_newton(prob, log_linear_start(prob.s_left, prob.s_right, grid));
}

double g_conjugate(double delta, double v0, double v1) {
  double s = std::sqrt(v0 * v1);
  double bound = 2.0 * s * std::sinh(0.5 * std::abs(delta)) + 10.0;
  auto neg = [&](double alpha) { return g_closed(alpha, v0, v1) - delta * alpha; };
  return -golden_min(neg, -bound, bound, 1e-12 * (1.0 + bound)).f;
}

}  // namespace ggs
