#include "ggs/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ggs/linalg.hpp"
#include "ggs/csv.hpp"
#include "ggs/parallel.hpp"
#include "ggs/potentials.hpp"
#include "ggs/quadrature.hpp"

namespace ggs {

void LayerProfile::validate() const {
  if (!a_minus || !a_plus || !a_star || !v_minus || !v_plus || !v_star)
    throw std::invalid_argument("layer profile: all six coefficient functions must be set");
  if (std::abs(v_minus(0.0) - v_star(0.0)) > 1e-10 || std::abs(v_star(1.0) - v_plus(0.0)) > 1e-10)
    throw std::invalid_argument("layer profile: potential must be continuous across the layer");
  for (int k = 0; k <= 20; ++k) {
    double t = k / 20.0;
    if (!(a_minus(-t) > 0.0) || !(a_plus(t) > 0.0) || !(a_star(t) > 0.0))
      throw std::invalid_argument("layer profile: diffusivities must be strictly positive");
  }
}

double LayerProfile::a_eps(double eps, double x) const {
  if (x < 0.0) return a_minus(x);
  if (x <= eps) return eps * a_star(x / eps);
  return a_plus(x);
}

double LayerProfile::v_eps(double eps, double x) const {
  if (x < 0.0) return v_minus(x);
  if (x <= eps) return v_star(x / eps);
  // shifted so the bulk potential attaches continuously at x = eps
  return v_plus(x - eps);
}

LayerProfile flat_profile() {
  LayerProfile p;
  auto one = [](double) { return 1.0; };
  auto zero = [](double) { return 0.0; };
  p.a_minus = one;
  p.a_plus = one;
  p.a_star = one;
  p.v_minus = zero;
  p.v_plus = zero;
  p.v_star = zero;
  return p;
}

namespace {

double z0_of(const LayerProfile& p) {
  return gauss5([&p](double x) { return std::exp(-p.v_minus(x)); }, -1.0, 0.0) +
         gauss5([&p](double x) { return std::exp(-p.v_plus(x)); }, 0.0, 1.0);
}

}  // namespace

double a_star_coeff(const LayerProfile& p) {
  double z0 = z0_of(p);
  double resist = gauss5([&](double y) { return z0 * std::exp(p.v_star(y)) / p.a_star(y); }, 0.0, 1.0);
  return 1.0 / resist;
}

double a_star_coeff_harm(const LayerProfile& p) {
  // independent route: harmonic mean of the product coefficient, with the
  // normalization obtained by log-space integration
  double z0 = std::exp(log_integral_exp([&p](double x) { return -p.v_minus(x); }, -1.0, 0.0));
  z0 += std::exp(log_integral_exp([&p](double x) { return -p.v_plus(x); }, 0.0, 1.0));
  auto coeff = [&](double y) { return p.a_star(y) * std::exp(-p.v_star(y)) / z0; };
  double inv = gauss5([&](double y) { return 1.0 / coeff(y); }, 0.0, 1.0);
  return 1.0 / inv;
}

namespace {

MembraneMesh finish_mesh(std::vector<double> edges) {
  MembraneMesh m;
  m.edges = std::move(edges);
  const int n = static_cast<int>(m.edges.size()) - 1;
  m.centers.resize(n);
  m.widths.resize(n);
  for (int i = 0; i < n; ++i) {
    m.centers[i] = 0.5 * (m.edges[i] + m.edges[i + 1]);
    m.widths[i] = m.edges[i + 1] - m.edges[i];
  }
  return m;
}

// resistance of 1/(a wtil) between two points lying in one smooth piece
double resistance(const std::function<double(double)>& a, const std::function<double(double)>& v,
                  double xa, double xb) {
  return gauss5([&](double x) { return std::exp(v(x)) / a(x); }, xa, xb, 4);
}

void check_spec(const MeshSpec& spec) {
  if (spec.cells_left < 10 || spec.cells_right < 10)
    throw std::invalid_argument("mesh spec: need at least 10 bulk cells per side");
  if (spec.cells_layer < 20) throw std::invalid_argument("mesh spec: need at least 20 layer cells");
  if (!(spec.grading >= 1.0)) throw std::invalid_argument("mesh spec: grading must be >= 1");
}

}  // namespace

MembraneOperator build_thin_layer(const LayerProfile& p, double eps, const MeshSpec& spec) {
  p.validate();
  check_spec(spec);
  if (!(eps > 0.0) || eps >= 0.5) throw std::invalid_argument("layer width must be in (0, 0.5)");

  std::vector<double> edges;
  for (int k = 0; k <= spec.cells_left; ++k) edges.push_back(-1.0 + k / double(spec.cells_left));
  {
    // layer cells geometrically refined toward both layer edges
    const int nl = spec.cells_layer;
    std::vector<double> rel(nl);
    double total = 0.0;
    for (int k = 0; k < nl; ++k) {
      rel[k] = std::pow(spec.grading, std::min(k, nl - 1 - k));
      total += rel[k];
    }
    double x = 0.0;
    for (int k = 0; k < nl - 1; ++k) {
      x += eps * rel[k] / total;
      edges.push_back(x);
    }
    edges.push_back(eps);
  }
  for (int k = 1; k <= spec.cells_right; ++k)
    edges.push_back(eps + k * (1.0 - eps) / double(spec.cells_right));

  MembraneOperator op;
  op.mesh = finish_mesh(std::move(edges));
  const int n = op.mesh.n();
  auto afun = [&](double x) { return p.a_eps(eps, x); };
  auto vfun = [&](double x) { return p.v_eps(eps, x); };

  op.wtil.resize(n);
  for (int i = 0; i < n; ++i)
    op.wtil[i] = gauss5([&](double x) { return std::exp(-vfun(x)); }, op.mesh.edges[i],
                        op.mesh.edges[i + 1], 2) /
                 op.mesh.widths[i];
  op.z_total = 0.0;
  for (int i = 0; i < n; ++i) op.z_total += op.wtil[i] * op.mesh.widths[i];

  op.face_coef = Eigen::VectorXd::Zero(n + 1);
  for (int f = 1; f < n; ++f) {
    double r = resistance(afun, vfun, op.mesh.centers[f - 1], op.mesh.edges[f]) +
               resistance(afun, vfun, op.mesh.edges[f], op.mesh.centers[f]);
    op.face_coef[f] = 1.0 / r;
  }
  return op;
}

MembraneOperator build_limit(const LayerProfile& p, const MeshSpec& spec, double a_star_override) {
  p.validate();
  check_spec(spec);
  std::vector<double> edges;
  for (int k = 0; k <= spec.cells_left; ++k) edges.push_back(-1.0 + k / double(spec.cells_left));
  for (int k = 1; k <= spec.cells_right; ++k) edges.push_back(k / double(spec.cells_right));

  MembraneOperator op;
  op.mesh = finish_mesh(std::move(edges));
  op.interface_face = spec.cells_left;
  op.a_star = a_star_override >= 0.0 ? a_star_override : a_star_coeff(p);
  const int n = op.mesh.n();

  auto vfun = [&](double x) { return x < 0.0 ? p.v_minus(x) : p.v_plus(x); };
  auto afun = [&](double x) { return x < 0.0 ? p.a_minus(x) : p.a_plus(x); };
  op.wtil.resize(n);
  for (int i = 0; i < n; ++i)
    op.wtil[i] = gauss5([&](double x) { return std::exp(-vfun(x)); }, op.mesh.edges[i],
                        op.mesh.edges[i + 1], 2) /
                 op.mesh.widths[i];
  op.z_total = 0.0;
  for (int i = 0; i < n; ++i) op.z_total += op.wtil[i] * op.mesh.widths[i];
  op.z0 = op.z_total;

  op.face_coef = Eigen::VectorXd::Zero(n + 1);
  for (int f = 1; f < n; ++f) {
    double r = resistance(afun, vfun, op.mesh.centers[f - 1], op.mesh.edges[f]) +
               resistance(afun, vfun, op.mesh.edges[f], op.mesh.centers[f]);
    if (f == op.interface_face) {
      if (op.a_star <= 0.0) {
        op.face_coef[f] = 0.0;  // decoupled subdomains
        continue;
      }
      r += 1.0 / (op.a_star * op.z0);  // transmission resistance in series
    }
    op.face_coef[f] = 1.0 / r;
  }
  return op;
}

Eigen::VectorXd cell_average(const MembraneMesh& mesh, const std::function<double(double)>& f) {
  Eigen::VectorXd u(mesh.n());
  for (int i = 0; i < mesh.n(); ++i)
    u[i] = gauss5(f, mesh.edges[i], mesh.edges[i + 1], 2) / mesh.widths[i];
  return u;
}

Eigen::VectorXd equilibrium(const MembraneOperator& op) { return op.wtil / op.z_total; }

double mass(const MembraneOperator& op, const Eigen::VectorXd& u) {
  double m = 0.0;
  for (int i = 0; i < op.mesh.n(); ++i) m += u[i] * op.mesh.widths[i];
  return m;
}

double energy(const MembraneOperator& op, const Eigen::VectorXd& u) {
  double e = 0.0;
  for (int i = 0; i < op.mesh.n(); ++i) {
    double w = op.wtil[i] / op.z_total;
    e += boltzmann(std::max(u[i], 0.0) / w) * w * op.mesh.widths[i];
  }
  return e;
}

MembraneTrajectory solve(const MembraneOperator& op, const Eigen::VectorXd& u0, double T,
                         double dt) {
  const int n = op.mesh.n();
  if (u0.size() != n) throw std::invalid_argument("solve: state size does not match the mesh");
  if (std::abs(mass(op, u0) - 1.0) > 1e-8)
    throw std::invalid_argument("solve: initial mass must be 1 (normalize first)");
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("solve: need positive T and dt");

  // constant tridiagonal implicit-Euler matrix in u
  std::vector<double> lower(n - 1), diag(n), upper(n - 1);
  for (int i = 0; i < n; ++i) {
    double cl = op.face_coef[i], cr = op.face_coef[i + 1];
    diag[i] = op.mesh.widths[i] / dt + (cl + cr) / op.wtil[i];
    if (i > 0) lower[i - 1] = -cl / op.wtil[i - 1];
    if (i < n - 1) upper[i] = -cr / op.wtil[i + 1];
  }

  MembraneTrajectory traj;
  const int nsteps = static_cast<int>(std::round(T / dt));
  Eigen::VectorXd u = u0;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  traj.energies.push_back(energy(op, u));
  traj.min_density = u.minCoeff();
  traj.max_mass_defect = std::abs(mass(op, u) - 1.0);
  for (int k = 0; k < nsteps; ++k) {
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) rhs[i] = op.mesh.widths[i] / dt * u[i];
    u = tridiag_solve(lower, diag, upper, rhs);
    traj.times.push_back((k + 1) * dt);
    traj.states.push_back(u);
    traj.energies.push_back(energy(op, u));
    traj.min_density = std::min(traj.min_density, u.minCoeff());
    traj.max_mass_defect = std::max(traj.max_mass_defect, std::abs(mass(op, u) - 1.0));
  }
  return traj;
}

namespace {

// linear extrapolation of cell values to an interface lying at face f
double extrapolate(const MembraneMesh& mesh, const Eigen::VectorXd& vals, int f, bool from_left) {
  double x = mesh.edges[f];
  int i1 = from_left ? f - 1 : f;
  int i2 = from_left ? f - 2 : f + 1;
  double c1 = mesh.centers[i1], c2 = mesh.centers[i2];
  return vals[i1] + (x - c1) * (vals[i1] - vals[i2]) / (c1 - c2);
}

}  // namespace

std::pair<double, double> interface_traces(const MembraneOperator& op, const Eigen::VectorXd& u) {
  if (op.interface_face < 0) throw std::invalid_argument("interface_traces: limit operator required");
  Eigen::VectorXd r = u.array() / op.wtil.array();
  return {extrapolate(op.mesh, r, op.interface_face, true),
          extrapolate(op.mesh, r, op.interface_face, false)};
}

namespace {

struct DissipationData {
  const Eigen::VectorXd* wtil;
  const Eigen::VectorXd* face_coef;
  const std::vector<double>* i_weights;  // cell weights for the velocity integral
  int interface_face = -1;
  double a_star = 0.0, z0 = 0.0;
  const MembraneMesh* mesh = nullptr;  // for interface trace extrapolation
};

double dissipation_instant(const DissipationData& d, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& v) {
  const int n = static_cast<int>(d.wtil->size());
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = std::max(u[i], kDensityFloor) / (*d.wtil)[i];
  double val = 0.0;
  double iflux = 0.0;
  for (int f = 1; f < n; ++f) {
    iflux += v[f - 1] * (*d.i_weights)[f - 1];
    if (f == d.interface_face) {
      double rl = extrapolate(*d.mesh, r, f, true);
      double rr = extrapolate(*d.mesh, r, f, false);
      double scale = d.a_star * d.z0 * std::sqrt(std::max(rl * rr, kDensityFloor));
      val += scale * cosh_c(iflux / scale);
      val += scale * cosh_star(std::log(rl) - std::log(rr));
      continue;
    }
    double cf = (*d.face_coef)[f];
    if (cf <= 0.0) continue;
    double lam = log_mean(r[f], r[f - 1]);
    double den = std::max(cf * lam, 1e-300);
    val += iflux * iflux / (2.0 * den);
    double dlog = std::log(r[f]) - std::log(r[f - 1]);
    val += 0.5 * cf * lam * dlog * dlog;
  }
  return val;
}

std::vector<Eigen::VectorXd> trajectory_velocities(const MembraneTrajectory& traj) {
  const size_t m = traj.times.size();
  if (m < 3) throw std::invalid_argument("dissipation: need at least 3 samples");
  std::vector<Eigen::VectorXd> v(m);
  for (size_t k = 0; k < m; ++k) {
    if (k == 0) {
      double h = traj.times[1] - traj.times[0];
      v[k] = (-3.0 * traj.states[0] + 4.0 * traj.states[1] - traj.states[2]) / (2.0 * h);
    } else if (k == m - 1) {
      double h = traj.times[k] - traj.times[k - 1];
      v[k] = (3.0 * traj.states[k] - 4.0 * traj.states[k - 1] + traj.states[k - 2]) / (2.0 * h);
    } else {
      v[k] = (traj.states[k + 1] - traj.states[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
    }
  }
  return v;
}

}  // namespace

double dissipation(const MembraneOperator& op, const MembraneTrajectory& traj) {
  DissipationData d;
  d.wtil = &op.wtil;
  d.face_coef = &op.face_coef;
  d.i_weights = &op.mesh.widths;
  d.interface_face = op.interface_face;
  d.a_star = op.a_star;
  d.z0 = op.z0;
  d.mesh = &op.mesh;
  auto vel = trajectory_velocities(traj);
  std::vector<double> g(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k)
    g[k] = dissipation_instant(d, traj.states[k], vel[k]);
  return trapezoid(traj.times, g);
}

double r_star_limit(const MembraneOperator& op, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& xi) {
  if (op.interface_face < 0) throw std::invalid_argument("r_star_limit: limit operator required");
  const int n = op.mesh.n();
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = std::max(u[i], kDensityFloor) / op.wtil[i];
  double val = 0.0;
  for (int f = 1; f < n; ++f) {
    if (f == op.interface_face) continue;
    double lam = log_mean(r[f], r[f - 1]);
    double dxi = xi[f] - xi[f - 1];
    val += 0.5 * op.face_coef[f] * lam * dxi * dxi;
  }
  double rl = extrapolate(op.mesh, r, op.interface_face, true);
  double rr = extrapolate(op.mesh, r, op.interface_face, false);
  double xl = extrapolate(op.mesh, xi, op.interface_face, true);
  double xr = extrapolate(op.mesh, xi, op.interface_face, false);
  val += op.a_star * op.z0 * std::sqrt(rl * rr) * cosh_star(xr - xl);
  return val;
}

double r_star_half_convention(const MembraneOperator& op, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& xi, double b) {
  if (op.interface_face < 0)
    throw std::invalid_argument("r_star_half_convention: limit operator required");
  const int n = op.mesh.n();
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) r[i] = std::max(u[i], kDensityFloor) / op.wtil[i];
  double val = 0.0;
  for (int f = 1; f < n; ++f) {
    if (f == op.interface_face) continue;
    double lam = log_mean(r[f], r[f - 1]);
    double dxi = xi[f] - xi[f - 1];
    val += op.face_coef[f] * lam * dxi * dxi;
  }
  // interface term on the densities themselves, with doubled force argument
  Eigen::VectorXd rho = u;
  double ul = extrapolate(op.mesh, rho, op.interface_face, true);
  double ur = extrapolate(op.mesh, rho, op.interface_face, false);
  double xl = extrapolate(op.mesh, xi, op.interface_face, true);
  double xr = extrapolate(op.mesh, xi, op.interface_face, false);
  val += b * std::sqrt(std::max(ul * ur, 0.0)) * cosh_star(2.0 * (xr - xl));
  return val;
}

double l1_distance(const MembraneMesh& ma, const Eigen::VectorXd& ua, const MembraneMesh& mb,
                   const Eigen::VectorXd& ub) {
  std::vector<double> cuts;
  cuts.reserve(ma.edges.size() + mb.edges.size());
  cuts.insert(cuts.end(), ma.edges.begin(), ma.edges.end());
  cuts.insert(cuts.end(), mb.edges.begin(), mb.edges.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             cuts.end());
  double total = 0.0;
  size_t ia = 0, ib = 0;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    while (ia + 1 < ma.centers.size() && ma.edges[ia + 1] < mid) ++ia;
    while (ib + 1 < mb.centers.size() && mb.edges[ib + 1] < mid) ++ib;
    total += std::abs(ua[ia] - ub[ib]) * (cuts[k + 1] - cuts[k]);
  }
  return total;
}

BlowUp blow_up_map(double eps, const MembraneMesh& mesh) {
  BlowUp b;
  auto y_of_x = [eps](double x) {
    if (x <= 0.0) return x;
    if (x <= eps) return (1.0 + eps) / eps * x;
    return x + 1.0;
  };
  auto x_of_y = [eps](double y) {
    if (y <= 0.0) return y;
    if (y <= 1.0 + eps) return eps / (1.0 + eps) * y;
    return y - 1.0;
  };
  std::vector<double> edges(mesh.edges.size());
  for (size_t k = 0; k < mesh.edges.size(); ++k) edges[k] = y_of_x(mesh.edges[k]);
  b.mesh = finish_mesh(std::move(edges));
  b.x_of_y = x_of_y;
  b.y_of_x = y_of_x;
  return b;
}

double dissipation_blow_up(const LayerProfile& p, double eps, const MembraneTrajectory& traj,
                           const MembraneMesh& mesh) {
  BlowUp bu = blow_up_map(eps, mesh);
  const int n = bu.mesh.n();
  // transformed coefficient a_hat = a(X(y))/X'(y) and equilibrium
  // w_hat(y) = e^{-V(X(y))}; resistances of 1/(a_hat w_hat) are assembled in
  // the blown-up variable, an independent quadrature of the same integrals
  auto xprime = [&](double y) {
    if (y <= 0.0 || y >= 1.0 + eps) return 1.0;
    return eps / (1.0 + eps);
  };
  auto inv_aw = [&](double y) {
    double x = bu.x_of_y(y);
    return xprime(y) * std::exp(p.v_eps(eps, x)) / p.a_eps(eps, x);
  };
  Eigen::VectorXd wtil(n);
  for (int i = 0; i < n; ++i)
    wtil[i] = gauss5([&](double y) { return std::exp(-p.v_eps(eps, bu.x_of_y(y))); },
                     bu.mesh.edges[i], bu.mesh.edges[i + 1], 2) /
              bu.mesh.widths[i];
  Eigen::VectorXd face_coef = Eigen::VectorXd::Zero(n + 1);
  for (int f = 1; f < n; ++f) {
    double r = gauss5(inv_aw, bu.mesh.centers[f - 1], bu.mesh.edges[f], 4) +
               gauss5(inv_aw, bu.mesh.edges[f], bu.mesh.centers[f], 4);
    face_coef[f] = 1.0 / r;
  }
  DissipationData d;
  d.wtil = &wtil;
  d.face_coef = &face_coef;
  d.i_weights = &mesh.widths;  // velocity integral keeps the original measure
  d.mesh = &bu.mesh;
  auto vel = trajectory_velocities(traj);
  std::vector<double> g(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k)
    g[k] = dissipation_instant(d, traj.states[k], vel[k]);
  return trapezoid(traj.times, g);
}

Eigen::VectorXd well_prepared(const LayerProfile& p, double eps, const MembraneOperator& op,
                              const std::function<double(double)>& u0_limit) {
  double z0 = z0_of(p);
  double a_st = a_star_coeff(p);
  double v0 = u0_limit(-1e-9) * z0 * std::exp(p.v_star(0.0));
  double v1 = u0_limit(+1e-9) * z0 * std::exp(p.v_star(1.0));
  double b = v0 + v1 - 2.0 * std::sqrt(v0 * v1);  // zero-flux optimal bridge
  auto zmap = [&](double y) {
    return a_st * gauss5([&](double s) { return z0 * std::exp(p.v_star(s)) / p.a_star(s); }, 0.0,
                         y, 4);
  };
  auto layer_density = [&](double x) {
    double y = std::min(std::max(x / eps, 0.0), 1.0);
    double z = zmap(y);
    double v = (1.0 - z) * v0 + z * v1 + b * (z * z - z);
    return v * std::exp(-p.v_star(y)) / z0;
  };
  auto init = [&](double x) {
    if (x < 0.0) return u0_limit(x);
    if (x <= eps) return layer_density(x);
    return u0_limit(x - eps);
  };
  Eigen::VectorXd u = cell_average(op.mesh, init);
  double m = mass(op, u);
  return u / m;
}

MembraneReport edp_check_membrane(const LayerProfile& p, const std::vector<double>& eps_list,
                                  const std::function<double(double)>& u0_limit, double T,
                                  double dt, const MeshSpec& spec, int jobs) {
  MembraneReport rep;
  MembraneOperator lim = build_limit(p, spec);
  rep.a_star = lim.a_star;
  Eigen::VectorXd u0 = cell_average(lim.mesh, u0_limit);
  u0 /= mass(lim, u0);
  MembraneTrajectory traj0 = solve(lim, u0, T, dt);
  rep.d_limit = dissipation(lim, traj0);
  rep.edb_limit = std::abs(traj0.energies.back() + rep.d_limit - traj0.energies.front());

  const size_t nt = traj0.times.size();
  std::vector<size_t> l1_samples, e_samples;
  for (size_t k = 0; k < nt; k += std::max<size_t>(1, nt / 50)) l1_samples.push_back(k);
  l1_samples.push_back(nt - 1);
  for (int j = 0; j <= 4; ++j) e_samples.push_back(j * (nt - 1) / 4);

  rep.entries.resize(eps_list.size());
  parallel_for_index(static_cast<int>(eps_list.size()), jobs, [&](int idx) {
    double eps = eps_list[idx];
    MembraneOperator thin = build_thin_layer(p, eps, spec);
    Eigen::VectorXd ue0 = well_prepared(p, eps, thin, u0_limit);
    MembraneTrajectory traj = solve(thin, ue0, T, dt);
    MembraneSweepEntry e;
    e.epsilon = eps;
    for (size_t k : l1_samples)
      e.sup_l1_gap = std::max(
          e.sup_l1_gap, l1_distance(thin.mesh, traj.states[k], lim.mesh, traj0.states[k]));
    e.d_eps = dissipation(thin, traj);
    for (size_t k : e_samples)
      e.energy_gap = std::max(e.energy_gap, std::abs(traj.energies[k] - traj0.energies[k]));
    e.edb_eps = std::abs(traj.energies.back() + e.d_eps - traj.energies.front());
    rep.entries[idx] = e;
  });
  return rep;
}

void write_snapshot(const MembraneOperator& op, const Eigen::VectorXd& u, std::ostream& os) {
  os << "x,u,w,flux\n";
  const int n = op.mesh.n();
  for (int i = 0; i < n; ++i) {
    double flux = 0.0;
    if (i < n - 1 && op.face_coef[i + 1] > 0.0)
      flux = op.face_coef[i + 1] * (u[i + 1] / op.wtil[i + 1] - u[i] / op.wtil[i]);
    write_csv_row(os, {op.mesh.centers[i], u[i], op.wtil[i] / op.z_total, flux});
  }
}

}  // namespace ggs
