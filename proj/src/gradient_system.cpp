#include "ggs/gradient_system.hpp"

#include <cmath>
#include <stdexcept>

#include "ggs/csv.hpp"
#include "ggs/minimize.hpp"
#include "ggs/quadrature.hpp"

namespace ggs {

void Trajectory::write_csv(std::ostream& os) const {
  os << "t";
  const int n = states.empty() ? 0 : static_cast<int>(states.front().size());
  for (int j = 1; j <= n; ++j) os << ",u_" << j;
  os << ",E,edb_residual\n";
  for (size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row;
    row.reserve(n + 3);
    row.push_back(times[k]);
    for (int j = 0; j < n; ++j) row.push_back(states[k][j]);
    row.push_back(energies[k]);
    row.push_back(k < edb_residual.size() ? edb_residual[k] : 0.0);
    write_csv_row(os, row);
  }
}

namespace {

bool admissible(const Eigen::VectorXd& u, double floor) { return u.minCoeff() >= floor; }

Eigen::VectorXd rk4_step(const GradientSystem& gs, const Eigen::VectorXd& u, double h) {
  Eigen::VectorXd k1 = gs.vector_field(u);
  Eigen::VectorXd k2 = gs.vector_field(u + 0.5 * h * k1);
  Eigen::VectorXd k3 = gs.vector_field(u + 0.5 * h * k2);
  Eigen::VectorXd k4 = gs.vector_field(u + h * k3);
  return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// advance by `span` with local error control via step doubling
Eigen::VectorXd rk4_adaptive_advance(const GradientSystem& gs, Eigen::VectorXd u, double span,
                                     const EvolveOptions& opts) {
  double remaining = span;
  double h = span;
  while (remaining > 1e-14 * span) {
    if (h > remaining) h = remaining;
    if (h < opts.dt_min)
      throw std::runtime_error("evolve: step size underflow (state left admissible set?)");
    bool ok = true;
    Eigen::VectorXd full, half2;
    try {
      full = rk4_step(gs, u, h);
      Eigen::VectorXd mid = rk4_step(gs, u, 0.5 * h);
      half2 = rk4_step(gs, mid, 0.5 * h);
      ok = full.allFinite() && half2.allFinite() && admissible(half2, opts.floor);
    } catch (const std::exception&) {
      ok = false;
    }
    if (!ok) {
      h *= 0.5;
      continue;
    }
    double err = (full - half2).lpNorm<Eigen::Infinity>() / 15.0;
    double tol = opts.rk_tol * (1.0 + u.lpNorm<Eigen::Infinity>());
    if (err > tol) {
      h *= 0.5;
      continue;
    }
    u = half2;
    remaining -= h;
    if (err < 0.01 * tol) h *= 2.0;
  }
  return u;
}

// one implicit Euler step u+ = u + h f(u+), Newton with FD Jacobian;
// recursively halves on failure
Eigen::VectorXd implicit_euler_advance(const GradientSystem& gs, const Eigen::VectorXd& u,
                                       double h, const EvolveOptions& opts, int depth = 0) {
  if (h < opts.dt_min || depth > 40)
    throw std::runtime_error("evolve: implicit step size underflow");
  const int n = gs.dim;
  Eigen::VectorXd x = u;  // predictor: frozen state
  bool converged = false;
  try {
    for (int it = 0; it < opts.newton_max_iter; ++it) {
      Eigen::VectorXd fx = gs.vector_field(x);
      Eigen::VectorXd res = x - u - h * fx;
      if (res.lpNorm<Eigen::Infinity>() < opts.newton_tol * (1.0 + u.lpNorm<Eigen::Infinity>())) {
        converged = true;
        break;
      }
      Eigen::MatrixXd jac(n, n);
      for (int j = 0; j < n; ++j) {
        double hj = 1e-7 * (1.0 + std::abs(x[j]));
        Eigen::VectorXd xp = x;
        xp[j] += hj;
        jac.col(j) = (gs.vector_field(xp) - fx) / hj;
      }
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n) - h * jac;
      Eigen::VectorXd dx = m.partialPivLu().solve(-res);
      if (!dx.allFinite()) break;
      x += dx;
    }
  } catch (const std::exception&) {
    converged = false;
  }
  if (!converged || !x.allFinite() || !admissible(x, opts.floor)) {
    Eigen::VectorXd mid = implicit_euler_advance(gs, u, 0.5 * h, opts, depth + 1);
    return implicit_euler_advance(gs, mid, 0.5 * h, opts, depth + 1);
  }
  return x;
}

}  // namespace

Trajectory evolve(const GradientSystem& gs, const Eigen::VectorXd& u0, double T, double dt,
                  const EvolveOptions& opts) {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("evolve: need positive T and dt");
  if (u0.size() != gs.dim) throw std::invalid_argument("evolve: state dimension mismatch");
  if (!admissible(u0, opts.floor)) throw std::invalid_argument("evolve: inadmissible initial state");

  Trajectory traj;
  const int nsteps = static_cast<int>(std::round(T / dt));
  traj.times.reserve(nsteps + 1);
  traj.states.reserve(nsteps + 1);

  Eigen::VectorXd u = u0;
  traj.times.push_back(0.0);
  traj.states.push_back(u);
  traj.energies.push_back(gs.energy(u));
  traj.edb_residual.push_back(0.0);

  // R + R* along the generated flow equals -<DE, f> by the Fenchel identity.
  auto chain_power = [&gs](const Eigen::VectorXd& x) {
    return -gs.d_energy(x).dot(gs.vector_field(x));
  };
  double power_prev = chain_power(u);

  for (int k = 0; k < nsteps; ++k) {
    if (opts.scheme == Integrator::rk4_adaptive)
      u = rk4_adaptive_advance(gs, u, dt, opts);
    else
      u = implicit_euler_advance(gs, u, dt, opts);
    double e = gs.energy(u);
    if (!std::isfinite(e)) throw std::runtime_error("evolve: energy is not finite");
    double power = chain_power(u);
    traj.times.push_back((k + 1) * dt);
    traj.states.push_back(u);
    traj.energies.push_back(e);
    traj.edb_residual.push_back(e - traj.energies[k] + 0.5 * dt * (power_prev + power));
    power_prev = power;
  }
  return traj;
}

double primal_r(const GradientSystem& gs, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const int n = gs.dim;
  Eigen::VectorXd vt = v;
  int m = n;
  Eigen::MatrixXd basis;
  if (gs.constraint == Constraint::simplex) {
    vt.array() -= v.mean();  // project onto the mass-preserving tangent space
    m = n - 1;
    basis = Eigen::MatrixXd::Zero(n, m);
    for (int j = 0; j < m; ++j) {
      basis(j, j) = 1.0;
      basis(n - 1, j) = -1.0;
    }
  } else {
    basis = Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::VectorXd rhs = basis.transpose() * vt;
  auto objective = [&](const Eigen::VectorXd& y) {
    return rhs.dot(y) - gs.r_star(u, basis * y);
  };
  NdMaxResult r = concave_max(objective, Eigen::VectorXd::Zero(m), 1e-11);
  return r.f;
}

std::vector<Eigen::VectorXd> path_velocities(const Trajectory& traj) {
  const size_t n = traj.times.size();
  std::vector<Eigen::VectorXd> v(n);
  if (n < 3) throw std::invalid_argument("path_velocities: need at least 3 samples");
  for (size_t k = 0; k < n; ++k) {
    if (k == 0) {
      double h = traj.times[1] - traj.times[0];
      v[k] = (-3.0 * traj.states[0] + 4.0 * traj.states[1] - traj.states[2]) / (2.0 * h);
    } else if (k == n - 1) {
      double h = traj.times[k] - traj.times[k - 1];
      v[k] = (3.0 * traj.states[k] - 4.0 * traj.states[k - 1] + traj.states[k - 2]) / (2.0 * h);
    } else {
      double h = traj.times[k + 1] - traj.times[k - 1];
      v[k] = (traj.states[k + 1] - traj.states[k - 1]) / h;
    }
  }
  return v;
}

double path_dissipation(const GradientSystem& gs, const Trajectory& traj) {
  auto v = path_velocities(traj);
  std::vector<double> integrand(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const Eigen::VectorXd& u = traj.states[k];
    integrand[k] = primal_r(gs, u, v[k]) + gs.r_star(u, -gs.d_energy(u));
  }
  return trapezoid(traj.times, integrand);
}

double rate_functional(const GradientSystem& gs, const Trajectory& traj) {
  auto v = path_velocities(traj);
  std::vector<double> integrand(traj.times.size());
  for (size_t k = 0; k < traj.times.size(); ++k) {
    const Eigen::VectorXd& u = traj.states[k];
    integrand[k] =
        primal_r(gs, u, v[k]) + gs.r_star(u, -gs.d_energy(u)) + gs.d_energy(u).dot(v[k]);
  }
  return trapezoid(traj.times, integrand);
}

}  // namespace ggs
