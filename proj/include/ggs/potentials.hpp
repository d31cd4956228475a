#pragma once

#include <functional>
#include <string>

namespace ggs {

/// Densities are clamped to this floor inside logarithms only; values
/// themselves are never modified.
constexpr double kDensityFloor = 1e-14;

/// arsinh via the logarithmic form, reflected for negative arguments so that
/// no cancellation occurs on either tail.
double arsinh(double x);

/// cosh-type dual dissipation potential  4*(cosh(xi/2) - 1).
/// Throws std::out_of_range once cosh would overflow the double range.
double cosh_star(double xi);
double cosh_star_prime(double xi);  // 2*sinh(xi/2)

/// Primal partner of cosh_star:  2*v*arsinh(v/2) - 2*sqrt(4+v^2) + 4.
double cosh_c(double v);
double cosh_c_prime(double v);  // 2*arsinh(v/2)

/// Boltzmann function z*log(z) - z + 1, extended by 1 at z = 0.
/// Throws std::domain_error for negative arguments.
double boltzmann(double z);
double boltzmann_prime(double z);  // log z (clamped at the density floor)

/// Logarithmic mean (a-b)/(log a - log b), continuous on the diagonal.
/// Throws std::domain_error unless both arguments are positive.
double log_mean(double a, double b);

enum class PairKind { quadratic, cosh, custom };

/// A convex dissipation potential psi together with its Legendre dual and
/// both derivatives.  ddpsi_star0 = (psi*)''(0) is kept explicitly because it
/// enters removable-singularity formulas.
struct DissipationPair {
  PairKind kind = PairKind::custom;
  std::function<double(double)> psi;
  std::function<double(double)> psi_star;
  std::function<double(double)> dpsi;
  std::function<double(double)> dpsi_star;
  double ddpsi_star0 = 1.0;
};

DissipationPair quadratic_pair();  // psi = v^2/2, psi* = xi^2/2
DissipationPair cosh_pair();       // psi = cosh_c, psi* = cosh_star

/// Numeric Legendre transform  sup_{|v| <= search_bound} (xi*v - psi(v))
/// by bracket expansion plus golden section.  Throws std::runtime_error when
/// the supremum is still growing at the search boundary.
double legendre_transform(const std::function<double(double)>& psi, double xi,
                          double search_bound = 1e3, double tol = 1e-10);

/// Infimal convolution of two scaled cosh_star terms,
///   inf_tau [ a*cosh_star(tau) + b*cosh_star(xi - tau) ],
/// in closed form: 4*sqrt((a+b)^2 + (a*b/2)*cosh_star(xi)) - 4*(a+b).
double inf_convolution_cosh(double a, double b, double xi);

/// Prefactor (p - q)/psi_star'(log p - log q) shared by reaction-rate and
/// jump-rate gradient structures; reduces to sqrt(p*q) for the cosh pair and
/// to the logarithmic mean for the quadratic pair.  Removable singularity on
/// p = q is filled by the series limit.
double dual_slope_ratio(const DissipationPair& pair, double p, double q);

}  // namespace ggs
