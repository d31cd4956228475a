#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ggs/gradient_system.hpp"
#include "ggs/potentials.hpp"

namespace ggs {

/// Scalar convex energy density with first and second derivative.
struct ScalarConvex {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> ddf;
};

ScalarConvex quadratic_density();  // r^2/2
ScalarConvex boltzmann_density();  // z log z - z + 1

enum class FamilyCase { quadratic, cosh, entropic_quadratic, custom };

/// A member of the three-state fast-exchange family: energy density phi on
/// relative densities against the weights (1, eps, 1)/(2+eps), dissipation
/// pair (psi, psi*) on the two exchange edges.  Every admissible choice of
/// (phi, pair) generates the same linear exchange dynamics.
struct FamilyConfig {
  FamilyCase kind = FamilyCase::cosh;
  double epsilon = 0.1;
  ScalarConvex phi;
  DissipationPair pair;
};

FamilyConfig make_family(FamilyCase kind, double epsilon);

Eigen::Vector3d family_weights(double eps);  // (1, eps, 1)/(2+eps)

/// Edge coefficient (r_left - r_right)/psi_star'(phi'(r_left) - phi'(r_right))
/// with the removable singularity at r_left = r_right filled by a series.
double pair_coefficient(const FamilyConfig& cfg, double r_left, double r_right);

/// The full three-state gradient system at the config's epsilon.
GradientSystem family_gs(const FamilyConfig& cfg);

/// Closed-form primal dissipation potential R_eps(u, v) for tangent v
/// (v sums to zero); +infinity when an edge with zero coefficient is forced
/// to carry rate.
double r_eps_primal(const FamilyConfig& cfg, const Eigen::Vector3d& u, const Eigen::Vector3d& v);

/// Reduced (eps -> 0) quantities on the slow variable p in (0,1):
/// the effective energy, the exchange-profile value Sigma(p,z), its minimum
/// sigma(p), the contracted dual potential R*(p, eta) via the nested
/// sup_z inf_tau construction, and the cell value m(p, v) whose minimizer
/// gives the matched middle-state amplitude.
class Reduced {
 public:
  explicit Reduced(FamilyConfig cfg) : cfg_(std::move(cfg)) {}

  double energy(double p) const;
  double d_energy(double p) const;
  double a_hat(double p, double r) const;  // pair_coefficient(2p, r)
  double sigma_profile(double p, double z) const;
  double sigma(double p) const;
  double r_star(double p, double eta) const;
  double d_r_star_eta(double p, double eta) const;  // envelope derivative
  double m_value(double p, double v) const;
  double m_minimizer(double p, double v) const;  // optimal z
  double r_primal(double p, double v) const;     // m_value - sigma

  const FamilyConfig& config() const { return cfg_; }

 private:
  double inner_inf(double p, double z, double eta, double* tau_opt = nullptr) const;
  FamilyConfig cfg_;
};

/// Closed forms available for the quadratic and cosh cases.
double sigma_closed(FamilyCase kind, double p);
double r_star_closed(FamilyCase kind, double p, double eta);

/// Exact slow-variable solution p(t) = 1/2 + (p0 - 1/2) e^{-2t}.
double slow_solution(double p0, double t);

struct GrowthRow {
  double eta = 0.0;
  double r_star = 0.0;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  double small_eta_coefficient = 0.0;  // effective quadratic coefficient at eta -> 0
};

/// Growth diagnostics of the entropic-quadratic reduced R* (superquadratic
/// in eta).  Requires |eta| <= 40 so the z-scan window covers the witnesses.
GrowthReport entropic_quadratic_growth(double p, const std::vector<double>& eta_grid);

struct SweepEntry {
  double epsilon = 0.0;
  double sup_state_err = 0.0;   // sup_t |u_1(t) - p(t)|
  double d_eps = 0.0;           // path dissipation of the eps-system
  double d_limit = 0.0;         // path dissipation of the reduced system
  double edb_limit_residual = 0.0;
};

/// Sweep the family over eps_list from matched initial data (middle-state
/// amplitude from the m-cell minimizer) and compare against the reduced
/// dynamics.
std::vector<SweepEntry> edp_sweep(FamilyCase kind, const std::vector<double>& eps_list,
                                  double p0, double T, double dt,
                                  Integrator scheme = Integrator::implicit_euler, int jobs = 1);

}  // namespace ggs
