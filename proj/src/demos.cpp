#include "ggs/demos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggs/minimize.hpp"
#include "ggs/quadrature.hpp"

namespace ggs {

namespace {

double rk4_step(const std::function<double(double, double)>& f, double t, double u, double h) {
  double k1 = f(t, u);
  double k2 = f(t + 0.5 * h, u + 0.5 * h * k1);
  double k3 = f(t + 0.5 * h, u + 0.5 * h * k2);
  double k4 = f(t + h, u + h * k3);
  return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// step-doubling adaptive RK4 from (t, u) to t_end
double rk4_adaptive(const std::function<double(double, double)>& f, double t, double u,
                    double t_end, double h0, double tol) {
  double h = std::min(h0, t_end - t);
  while (t < t_end) {
    if (t + h > t_end) h = t_end - t;
    double big = rk4_step(f, t, u, h);
    double half = rk4_step(f, t, u, 0.5 * h);
    double two = rk4_step(f, t + 0.5 * h, half, 0.5 * h);
    double err = std::abs(two - big) / 15.0;
    if (err <= tol || h <= 1e-14) {
      if (h <= 1e-14 && err > tol)
        throw std::runtime_error("wiggly integration: step size underflow");
      t += h;
      u = two + (two - big) / 15.0;
      if (err > 0.0) h = std::min(2.0 * h, 0.9 * h * std::pow(tol / err, 0.2));
    } else {
      h = std::max(1e-14, 0.9 * h * std::pow(tol / err, 0.25));
    }
  }
  return u;
}

}  // namespace

WigglyResult demo_wiggly(double eps, double r, const std::function<double(double)>& load,
                         double T, double u0, int samples) {
  if (!(eps > 0.0) || eps > 1.0) throw std::invalid_argument("demo_wiggly: need 0 < eps <= 1");
  if (r < 0.0) throw std::invalid_argument("demo_wiggly: need r >= 0");
  if (samples < 2) throw std::invalid_argument("demo_wiggly: need at least 2 samples");
  auto rhs = [&](double t, double u) {
    return -(u - load(t) + r * std::cos(u / eps)) / eps;
  };
  WigglyResult res;
  res.times.resize(samples);
  res.u.resize(samples);
  res.play.resize(samples);
  res.load.resize(samples);
  double u = u0;
  double z = std::clamp(u0, load(0.0) - r, load(0.0) + r);
  // explicit steps must resolve the cos(u/eps) scale; the local stiffness is
  // of order r/eps^2, so seed the adaptive control well below its inverse
  double h0 = std::min(T / (samples - 1.0), 0.5 * eps * eps / std::max(r, eps));
  for (int k = 0; k < samples; ++k) {
    double t = T * k / (samples - 1.0);
    res.times[k] = t;
    res.load[k] = load(t);
    if (k > 0) {
      u = rk4_adaptive(rhs, res.times[k - 1], u, t, h0, 1e-9);
      z = std::clamp(z, res.load[k] - r, res.load[k] + r);
    }
    res.u[k] = u;
    res.play[k] = z;
    res.sup_gap = std::max(res.sup_gap, std::abs(u - z));
  }
  return res;
}

double hysteresis_width(const WigglyResult& res, double t_min) {
  double lo = 1e300, hi = -1e300;
  for (size_t k = 0; k < res.times.size(); ++k) {
    if (res.times[k] < t_min) continue;
    double d = res.u[k] - res.load[k];
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  if (hi < lo) throw std::invalid_argument("hysteresis_width: no samples past t_min");
  return hi - lo;
}

TwoStructuresReport demo_two_structures(const std::function<double(double)>& a_profile,
                                        const std::vector<double>& eps_list,
                                        int grid_points, double bump_width) {
  if (grid_points < 16) throw std::invalid_argument("demo_two_structures: grid too coarse");
  if (!(bump_width > 0.0) || bump_width > 0.5)
    throw std::invalid_argument("demo_two_structures: bump width must lie in (0, 1/2]");
  TwoStructuresReport rep;

  // locate the extrema of the periodic coefficient on one period
  const int scan = 4096;
  int kmin = 0, kmax = 0;
  double vmin = a_profile(0.0), vmax = vmin;
  for (int k = 1; k < scan; ++k) {
    double v = a_profile(static_cast<double>(k) / scan);
    if (v < vmin) {
      vmin = v;
      kmin = k;
    }
    if (v > vmax) {
      vmax = v;
      kmax = k;
    }
  }
  auto refine = [&](int k, double sign) {
    double a = (k - 1.0) / scan, b = (k + 1.0) / scan;
    MinResult m = golden_min([&](double y) { return sign * a_profile(y); }, a, b, 1e-12);
    return m;
  };
  MinResult mn = refine(kmin, 1.0), mx = refine(kmax, -1.0);
  rep.a_min = mn.f;
  rep.y_min = mn.x;
  rep.a_max = -mx.f;
  rep.y_max = mx.x;
  if (!(rep.a_min > 0.0))
    throw std::invalid_argument("demo_two_structures: coefficient must be positive");

  for (double eps : eps_list) {
    if (!(eps > 0.0)) throw std::invalid_argument("demo_two_structures: need eps > 0");
    TwoStructuresEntry e;
    e.epsilon = eps;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < grid_points; ++i) {
      double x = (i + 0.5) / grid_points;
      double a = a_profile(std::fmod(x / eps, 1.0));
      // pointwise linear decay integrated with fixed-step RK4
      double u = 1.0;
      const int nsteps = 1000;
      for (int s = 0; s < nsteps; ++s)
        u = rk4_step([&](double, double v) { return -a * v; }, 0.0, u, 1.0 / nsteps);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    e.min_ratio = lo;
    e.max_ratio = hi;
    rep.entries.push_back(e);
  }

  // period averages along oscillatory profiles rho(x) = g(x/eps) with g a
  // unit-mass bump of the given width; for eps = 1/K these equal the exact
  // energies of the recovery sequences
  auto averages = [&](double center, double& mean_a, double& mean_inv_a) {
    auto wrap = [&](double y) { return a_profile(y - std::floor(y)); };
    double a = center - 0.5 * bump_width, b = center + 0.5 * bump_width;
    mean_a = gauss5(wrap, a, b, 8) / bump_width;
    mean_inv_a = gauss5([&](double y) { return 1.0 / wrap(y); }, a, b, 8) / bump_width;
  };
  double ma = 0.0, mia = 0.0;
  averages(rep.y_min, ma, mia);
  rep.energy_along_first = ma;
  rep.hat_energy_along_first = mia;
  averages(rep.y_max, ma, mia);
  rep.energy_along_second = ma;
  rep.hat_energy_along_second = mia;
  return rep;
}

}  // namespace ggs
