#pragma once

#include <functional>
#include <vector>

namespace ggs {

/// Composite Gauss-Legendre quadrature of f on [a, b] with n panels of 5
/// nodes each.
double gauss5(const std::function<double(double)>& f, double a, double b, int panels = 16);

/// log of integral of exp(g) on [a, b], evaluated stably by shifting the
/// maximum sampled exponent out of the quadrature (log-sum-exp over composite
/// Gauss panels).  Useful when g spans hundreds of e-folds.
double log_integral_exp(const std::function<double(double)>& g, double a, double b,
                        int panels = 64);

/// Trapezoid rule over sampled values y_k at abscissae t_k.
double trapezoid(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace ggs
