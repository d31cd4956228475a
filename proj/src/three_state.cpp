#include "ggs/three_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ggs/minimize.hpp"
#include "ggs/parallel.hpp"
#include "ggs/quadrature.hpp"

namespace ggs {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ScalarConvex quadratic_density() {
  ScalarConvex s;
  s.f = [](double r) { return 0.5 * r * r; };
  s.df = [](double r) { return r; };
  s.ddf = [](double) { return 1.0; };
  return s;
}

ScalarConvex boltzmann_density() {
  ScalarConvex s;
  s.f = [](double z) { return boltzmann(z); };
  s.df = [](double z) { return boltzmann_prime(z); };
  s.ddf = [](double z) { return 1.0 / std::max(z, kDensityFloor); };
  return s;
}

FamilyConfig make_family(FamilyCase kind, double epsilon) {
  FamilyConfig cfg;
  cfg.kind = kind;
  cfg.epsilon = epsilon;
  switch (kind) {
    case FamilyCase::quadratic:
      cfg.phi = quadratic_density();
      cfg.pair = quadratic_pair();
      break;
    case FamilyCase::cosh:
      cfg.phi = boltzmann_density();
      cfg.pair = cosh_pair();
      break;
    case FamilyCase::entropic_quadratic:
      cfg.phi = boltzmann_density();
      cfg.pair = quadratic_pair();
      break;
    case FamilyCase::custom:
      break;  // caller supplies phi and pair
  }
  return cfg;
}

Eigen::Vector3d family_weights(double eps) {
  return Eigen::Vector3d(1.0, eps, 1.0) / (2.0 + eps);
}

double pair_coefficient(const FamilyConfig& cfg, double r_left, double r_right) {
  double d = cfg.phi.df(r_left) - cfg.phi.df(r_right);
  if (std::abs(d) < 1e-6) {
    double rbar = 0.5 * (r_left + r_right);
    return 1.0 / (cfg.pair.ddpsi_star0 * cfg.phi.ddf(rbar));
  }
  return (r_left - r_right) / cfg.pair.dpsi_star(d);
}

GradientSystem family_gs(const FamilyConfig& cfg) {
  const Eigen::Vector3d w = family_weights(cfg.epsilon);
  GradientSystem gs;
  gs.dim = 3;
  gs.constraint = Constraint::simplex;
  auto rel = [w](const Eigen::VectorXd& u) {
    Eigen::Vector3d r;
    for (int i = 0; i < 3; ++i) r[i] = std::max(u[i], 0.0) / w[i];
    return r;
  };
  gs.energy = [cfg, w, rel](const Eigen::VectorXd& u) {
    Eigen::Vector3d r = rel(u);
    return w[0] * cfg.phi.f(r[0]) + w[1] * cfg.phi.f(r[1]) + w[2] * cfg.phi.f(r[2]);
  };
  gs.d_energy = [cfg, rel](const Eigen::VectorXd& u) {
    Eigen::Vector3d r = rel(u);
    return Eigen::VectorXd(Eigen::Vector3d(cfg.phi.df(r[0]), cfg.phi.df(r[1]), cfg.phi.df(r[2])));
  };
  gs.r_star = [cfg, rel](const Eigen::VectorXd& u, const Eigen::VectorXd& xi) {
    Eigen::Vector3d r = rel(u);
    double a1 = pair_coefficient(cfg, r[0], r[1]);
    double a2 = pair_coefficient(cfg, r[1], r[2]);
    return a1 * cfg.pair.psi_star(xi[1] - xi[0]) + a2 * cfg.pair.psi_star(xi[2] - xi[1]);
  };
  gs.d_r_star = [cfg, rel](const Eigen::VectorXd& u, const Eigen::VectorXd& xi) {
    Eigen::Vector3d r = rel(u);
    double a1 = pair_coefficient(cfg, r[0], r[1]);
    double a2 = pair_coefficient(cfg, r[1], r[2]);
    double j1 = a1 * cfg.pair.dpsi_star(xi[1] - xi[0]);
    double j2 = a2 * cfg.pair.dpsi_star(xi[2] - xi[1]);
    return Eigen::VectorXd(Eigen::Vector3d(-j1, j1 - j2, j2));
  };
  return gs;
}

namespace {

// a * psi(v/a) with the lower-semicontinuous 0 * psi(./0) convention
double scaled_psi(const FamilyConfig& cfg, double a, double v) {
  if (a <= 1e-300) return std::abs(v) <= 1e-300 ? 0.0 : kInf;
  return a * cfg.pair.psi(v / a);
}

}  // namespace

double r_eps_primal(const FamilyConfig& cfg, const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  if (std::abs(v.sum()) > 1e-9 * (1.0 + v.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("r_eps_primal: rate must sum to zero");
  const Eigen::Vector3d w = family_weights(cfg.epsilon);
  Eigen::Vector3d r;
  for (int i = 0; i < 3; ++i) r[i] = std::max(u[i], 0.0) / w[i];
  double a1 = pair_coefficient(cfg, r[0], r[1]);
  double a2 = pair_coefficient(cfg, r[1], r[2]);
  // Fenchel dual of the two-edge R*; for even psi the sign of the first
  // argument is immaterial.
  return scaled_psi(cfg, a1, -v[0]) + scaled_psi(cfg, a2, v[2]);
}

double Reduced::energy(double p) const { return 0.5 * cfg_.phi.f(2.0 * p) + 0.5 * cfg_.phi.f(2.0 - 2.0 * p); }

double Reduced::d_energy(double p) const { return cfg_.phi.df(2.0 * p) - cfg_.phi.df(2.0 - 2.0 * p); }

double Reduced::a_hat(double p, double r) const { return pair_coefficient(cfg_, 2.0 * p, r); }

double Reduced::sigma_profile(double p, double z) const {
  double al = a_hat(p, z);
  double ar = a_hat(1.0 - p, z);
  return al * cfg_.pair.psi_star(cfg_.phi.df(2.0 * p) - cfg_.phi.df(z)) +
         ar * cfg_.pair.psi_star(cfg_.phi.df(2.0 - 2.0 * p) - cfg_.phi.df(z));
}

double Reduced::sigma(double p) const {
  auto obj = [this, p](double z) { return sigma_profile(p, z); };
  return log_scan_min(obj, 1e-6, 1e6).f;
}

double Reduced::inner_inf(double p, double z, double eta, double* tau_opt) const {
  double al = a_hat(p, z);
  double ar = a_hat(1.0 - p, z);
  auto obj = [this, al, ar, eta](double tau) {
    return al * cfg_.pair.psi_star(eta - tau) + ar * cfg_.pair.psi_star(tau);
  };
  double lo = std::min(0.0, eta) - 1.0;
  double hi = std::max(0.0, eta) + 1.0;
  MinResult r = golden_min(obj, lo, hi, 1e-11 * (1.0 + std::abs(eta)));
  if (tau_opt) *tau_opt = r.x;
  return r.f;
}

double Reduced::r_star(double p, double eta) const {
  double sig = sigma(p);
  auto neg_gain = [this, p, eta](double z) { return sigma_profile(p, z) - inner_inf(p, z, eta); };
  MinResult r = log_scan_min(neg_gain, 1e-6, 1e6);
  return sig - r.f;
}

double Reduced::d_r_star_eta(double p, double eta) const {
  auto neg_gain = [this, p, eta](double z) { return sigma_profile(p, z) - inner_inf(p, z, eta); };
  MinResult r = log_scan_min(neg_gain, 1e-6, 1e6);
  double tau = 0.0;
  inner_inf(p, r.x, eta, &tau);
  // envelope: only the explicit eta-dependence of the left edge term survives
  return a_hat(p, r.x) * cfg_.pair.dpsi_star(eta - tau);
}

double Reduced::m_value(double p, double v) const {
  auto obj = [this, p, v](double z) {
    return scaled_psi(cfg_, a_hat(p, z), v) + scaled_psi(cfg_, a_hat(1.0 - p, z), v) +
           sigma_profile(p, z);
  };
  return log_scan_min(obj, 1e-6, 1e6).f;
}

double Reduced::m_minimizer(double p, double v) const {
  auto obj = [this, p, v](double z) {
    return scaled_psi(cfg_, a_hat(p, z), v) + scaled_psi(cfg_, a_hat(1.0 - p, z), v) +
           sigma_profile(p, z);
  };
  return log_scan_min(obj, 1e-6, 1e6).x;
}

double Reduced::r_primal(double p, double v) const { return m_value(p, v) - sigma(p); }

double sigma_closed(FamilyCase kind, double p) {
  switch (kind) {
    case FamilyCase::quadratic:
      return (1.0 - 2.0 * p) * (1.0 - 2.0 * p);
    case FamilyCase::cosh: {
      double d = std::sqrt(p) - std::sqrt(1.0 - p);
      return 2.0 * d * d;
    }
    default:
      throw std::invalid_argument("sigma_closed: no closed form for this case");
  }
}

double r_star_closed(FamilyCase kind, double p, double eta) {
  switch (kind) {
    case FamilyCase::quadratic:
      return 0.25 * eta * eta;
    case FamilyCase::cosh:
      return std::sqrt(p * (1.0 - p)) * cosh_star(eta);
    default:
      throw std::invalid_argument("r_star_closed: no closed form for this case");
  }
}

double slow_solution(double p0, double t) { return 0.5 + (p0 - 0.5) * std::exp(-2.0 * t); }

GrowthReport entropic_quadratic_growth(double p, const std::vector<double>& eta_grid) {
  for (double eta : eta_grid)
    if (std::abs(eta) > 40.0)
      throw std::invalid_argument("entropic_quadratic_growth: |eta| must be <= 40");
  Reduced red(make_family(FamilyCase::entropic_quadratic, 0.1));
  GrowthReport rep;
  rep.rows.reserve(eta_grid.size());
  for (double eta : eta_grid) rep.rows.push_back({eta, red.r_star(p, eta)});
  const double eta_small = 1e-3;
  rep.small_eta_coefficient = red.r_star(p, eta_small) / (eta_small * eta_small);
  return rep;
}

std::vector<SweepEntry> edp_sweep(FamilyCase kind, const std::vector<double>& eps_list,
                                  double p0, double T, double dt, Integrator scheme, int jobs) {
  Reduced red(make_family(kind, 1.0));
  const double zeta = 0.5 * red.m_minimizer(p0, 1.0 - 2.0 * p0);

  // reduced-path quantities are eps-independent: evaluate once on the grid
  const int nsteps = static_cast<int>(std::round(T / dt));
  std::vector<double> times(nsteps + 1), pvals(nsteps + 1), integrand(nsteps + 1);
  for (int k = 0; k <= nsteps; ++k) {
    times[k] = k * dt;
    pvals[k] = slow_solution(p0, times[k]);
    double pdot = 1.0 - 2.0 * pvals[k];
    integrand[k] = red.r_primal(pvals[k], pdot) + red.r_star(pvals[k], -red.d_energy(pvals[k]));
  }
  const double d_limit = trapezoid(times, integrand);
  const double edb_limit =
      std::abs(red.energy(pvals.back()) + d_limit - red.energy(pvals.front()));

  std::vector<SweepEntry> out(eps_list.size());
  parallel_for_index(static_cast<int>(eps_list.size()), jobs, [&](int i) {
    const double eps = eps_list[i];
    FamilyConfig cfg = make_family(kind, eps);
    GradientSystem gs = family_gs(cfg);
    Eigen::VectorXd u0(3);
    u0 << p0 * (1.0 - eps * zeta), eps * zeta, (1.0 - p0) * (1.0 - eps * zeta);
    EvolveOptions opts;
    opts.scheme = scheme;
    Trajectory traj = evolve(gs, u0, T, dt, opts);

    double sup_err = 0.0;
    for (size_t k = 0; k < traj.times.size(); ++k)
      sup_err = std::max(sup_err, std::abs(traj.states[k][0] - slow_solution(p0, traj.times[k])));

    auto vel = path_velocities(traj);
    std::vector<double> g(traj.times.size());
    for (size_t k = 0; k < traj.times.size(); ++k) {
      const Eigen::VectorXd& u = traj.states[k];
      Eigen::Vector3d v = vel[k];
      v.array() -= v.mean();  // FD noise off the mass shell
      g[k] = r_eps_primal(cfg, u, v) + gs.r_star(u, -gs.d_energy(u));
    }
    SweepEntry e;
    e.epsilon = eps;
    e.sup_state_err = sup_err;
    e.d_eps = trapezoid(traj.times, g);
    e.d_limit = d_limit;
    e.edb_limit_residual = edb_limit;
    out[i] = e;
  });
  return out;
}

}  // namespace ggs
