#include "ggs/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ggs {

namespace {
// 5-point Gauss-Legendre nodes/weights on [-1, 1]
const double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                          0.5384693101056831, 0.9061798459386640};
const double kWeights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                           0.4786286704993665, 0.2369268850561891};
}  // namespace

double gauss5(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("gauss5: panels must be >= 1");
  double total = 0.0;
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    double half = 0.5 * h;
    for (int k = 0; k < 5; ++k) total += kWeights[k] * f(mid + half * kNodes[k]) * half;
  }
  return total;
}

double log_integral_exp(const std::function<double(double)>& g, double a, double b, int panels) {
  if (panels < 1) throw std::invalid_argument("log_integral_exp: panels must be >= 1");
  double h = (b - a) / panels;
  std::vector<double> expo;
  std::vector<double> wgt;
  expo.reserve(5 * panels);
  wgt.reserve(5 * panels);
  double gmax = -1e300;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * h;
    double mid = lo + 0.5 * h;
    double half = 0.5 * h;
    for (int k = 0; k < 5; ++k) {
      double x = mid + half * kNodes[k];
      double e = g(x);
      expo.push_back(e);
      wgt.push_back(kWeights[k] * half);
      if (e > gmax) gmax = e;
    }
  }
  double s = 0.0;
  for (size_t i = 0; i < expo.size(); ++i) s += wgt[i] * std::exp(expo[i] - gmax);
  return gmax + std::log(s);
}

double trapezoid(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (size_t k = 0; k + 1 < t.size(); ++k) s += 0.5 * (t[k + 1] - t[k]) * (y[k] + y[k + 1]);
  return s;
}

}  // namespace ggs
