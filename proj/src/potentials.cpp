#include "ggs/potentials.hpp"

#include <cmath>
#include <stdexcept>

#include "ggs/minimize.hpp"

namespace ggs {

double arsinh(double x) {
  double ax = std::abs(x);
  double v = std::log(ax + std::sqrt(ax * ax + 1.0));
  return x < 0.0 ? -v : v;
}

namespace {
// cosh(x) overflows a double just past x = 710.
constexpr double kCoshArgMax = 709.0;
}  // namespace

double cosh_star(double xi) {
  if (std::abs(0.5 * xi) > kCoshArgMax)
    throw std::out_of_range("cosh_star: argument exceeds floating range");
  return 4.0 * (std::cosh(0.5 * xi) - 1.0);
}

double cosh_star_prime(double xi) {
  if (std::abs(0.5 * xi) > kCoshArgMax)
    throw std::out_of_range("cosh_star_prime: argument exceeds floating range");
  return 2.0 * std::sinh(0.5 * xi);
}

double cosh_c(double v) {
  return 2.0 * v * arsinh(0.5 * v) - 2.0 * std::sqrt(4.0 + v * v) + 4.0;
}

double cosh_c_prime(double v) { return 2.0 * arsinh(0.5 * v); }

double boltzmann(double z) {
  if (z < 0.0) throw std::domain_error("boltzmann: negative argument");
  if (z == 0.0) return 1.0;
  return z * std::log(z) - z + 1.0;
}

double boltzmann_prime(double z) {
  if (z < 0.0) throw std::domain_error("boltzmann_prime: negative argument");
  return std::log(std::max(z, kDensityFloor));
}

double log_mean(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_mean: arguments must be positive");
  double d = a / b - 1.0;
  if (std::abs(d) < 1e-8) return b * (1.0 + 0.5 * d);  // series; O(d^2) accurate
  return b * d / std::log1p(d);
}

DissipationPair quadratic_pair() {
  DissipationPair p;
  p.kind = PairKind::quadratic;
  p.psi = [](double v) { return 0.5 * v * v; };
  p.psi_star = [](double x) { return 0.5 * x * x; };
  p.dpsi = [](double v) { return v; };
  p.dpsi_star = [](double x) { return x; };
  p.ddpsi_star0 = 1.0;
  return p;
}

DissipationPair cosh_pair() {
  DissipationPair p;
  p.kind = PairKind::cosh;
  p.psi = cosh_c;
  p.psi_star = cosh_star;
  p.dpsi = cosh_c_prime;
  p.dpsi_star = cosh_star_prime;
  p.ddpsi_star0 = 1.0;  // cosh(0)
  return p;
}

double legendre_transform(const std::function<double(double)>& psi, double xi,
                          double search_bound, double tol) {
  auto neg = [&](double v) { return psi(v) - xi * v; };
  double a, b;
  if (!bracket_downhill(neg, 0.0, 1e-2, search_bound, a, b))
    throw std::runtime_error("legendre_transform: supremum not attained within search bound");
  // golden tolerance in the argument; value accuracy is quadratically finer
  double xtol = std::max(tol, 1e-12 * (1.0 + std::abs(a) + std::abs(b)));
  MinResult r = golden_min(neg, a, b, xtol);
  return -r.f;
}

double inf_convolution_cosh(double a, double b, double xi) {
  if (!(a >= 0.0) || !(b >= 0.0))
    throw std::domain_error("inf_convolution_cosh: weights must be nonnegative");
  double s = a + b;
  return 4.0 * std::sqrt(s * s + 0.5 * a * b * cosh_star(xi)) - 4.0 * s;
}

double dual_slope_ratio(const DissipationPair& pair, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0))
    throw std::domain_error("dual_slope_ratio: arguments must be positive");
  switch (pair.kind) {
    case PairKind::cosh:
      return std::sqrt(p * q);
    case PairKind::quadratic:
      return log_mean(p, q);
    case PairKind::custom: {
      double d = std::log(p) - std::log(q);
      if (std::abs(d) < 1e-6) return 0.5 * (p + q) / pair.ddpsi_star0;
      return (p - q) / pair.dpsi_star(d);
    }
  }
  return 0.0;  // unreachable
}

}  // namespace ggs
