#pragma once

#include <functional>
#include <vector>

#include "ggs/potentials.hpp"

namespace ggs {

/// Boundary-value cost of the flux/profile functional
///   g(alpha, u0, u1) = min { int_0^1 (alpha^2 + u'^2)/(2u) dx : u(0)=u0, u(1)=u1, u>0 }
/// in closed form, via its explicit parabolic minimizer, and via free
/// discretized minimization (the oracle route).  The companion value
///   n(delta, v0, v1) = inf_v sup_zeta int v'^2/(2v) - zeta'^2 v/2
/// (sup over tilts with increment delta) has a closed form as well and is
/// linked to g by one-dimensional conjugation in alpha.

double g_closed(double alpha, double u0, double u1);

struct Parabola {
  double u0 = 1.0, u1 = 1.0, b = 0.0;
  double operator()(double x) const { return (1.0 - x) * u0 + x * u1 + b * (x * x - x); }
};

Parabola g_minimizer(double alpha, double u0, double u1);

struct BruteResult {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double grad_norm = 0.0;  // sup norm of the gradient at the returned point
  std::vector<double> profile;  // grid values on the uniform grid, endpoints included
};

BruteResult g_brute(double alpha, double u0, double u1, int grid = 400);

/// Harmonic mean (int_0^1 dy / f(y))^{-1} by composite quadrature.
double harm_mean(const std::function<double(double)>& f, int panels = 64);

/// Variable-coefficient value min int alpha^2/(2 A U) + A U ((log(U/W))')^2 / 2,
/// evaluated three ways: the closed display, the rescaling route through
/// g_closed, and free minimization.
double g_hat(double alpha, double u0, double u1, const std::function<double(double)>& a_fun,
             const std::function<double(double)>& w_fun);
double g_hat_rescaled(double alpha, double u0, double u1,
                      const std::function<double(double)>& a_fun,
                      const std::function<double(double)>& w_fun);
BruteResult g_hat_brute(double alpha, double u0, double u1,
                        const std::function<double(double)>& a_fun,
                        const std::function<double(double)>& w_fun, int grid = 400);

double n_closed(double delta, double v0, double v1);

/// Saddle value for a fixed positive profile v on the uniform grid:
/// int v'^2/(2v) dz - (delta^2/2) Harm(v), with the piecewise-linear
/// integrals evaluated exactly through logarithmic means.
double m_of_profile(double delta, const std::vector<double>& v);

/// Same quantity through a direct sup over discretized tilt increments
/// (trapezoidal weights, so the agreement with m_of_profile is a genuine
/// discretization check, not an identity).
double m_sup_numeric(double delta, const std::vector<double>& v);

/// Same quantity a third way: min over alpha of the alpha-chain cost minus
/// alpha*delta (the per-profile conjugation bridge), by golden section.
double m_bridge_profile(double delta, const std::vector<double>& v);

BruteResult n_brute(double delta, double v0, double v1, int grid = 150);

/// One-dimensional conjugate sup_alpha { delta*alpha - g_closed(alpha, v0, v1) }.
double g_conjugate(double delta, double v0, double v1);

}  // namespace ggs
