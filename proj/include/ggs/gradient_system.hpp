#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

namespace ggs {

enum class Constraint { none, simplex };

/// A gradient system (state space, energy, dual dissipation potential).
/// The induced evolution is  du/dt = d_r_star(u, -d_energy(u)).
struct GradientSystem {
  int dim = 0;
  Constraint constraint = Constraint::none;
  std::function<double(const Eigen::VectorXd&)> energy;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> d_energy;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> r_star;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> d_r_star;

  Eigen::VectorXd vector_field(const Eigen::VectorXd& u) const { return d_r_star(u, -d_energy(u)); }
};

/// Time-discrete solution record.  edb_residual[k] is the defect
/// E(u_{k+1}) - E(u_k) + int_{t_k}^{t_{k+1}} (R + R*) dt of the energy
/// balance over step k (trapezoid in time, R evaluated through the Fenchel
/// identity along the generated flow); entry 0 is 0 by convention so the
/// column aligns with times.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energies;
  std::vector<double> edb_residual;

  /// Columns: t, u_1..u_n, E, edb_residual.
  void write_csv(std::ostream& os) const;
};

enum class Integrator { rk4_adaptive, implicit_euler };

struct EvolveOptions {
  Integrator scheme = Integrator::rk4_adaptive;
  double rk_tol = 1e-10;     // per-step error target of the step-doubling control
  double newton_tol = 1e-12;
  int newton_max_iter = 30;
  double dt_min = 1e-12;     // hard failure below this substep size
  double floor = -1e-12;     // states with entries below this are rejected
};

/// Integrate the generated flow from u0 over [0, T], recording every dt.
/// Step rejection (negative densities, failed Newton, RK error) halves the
/// internal substep; dropping below opts.dt_min throws std::runtime_error.
Trajectory evolve(const GradientSystem& gs, const Eigen::VectorXd& u0, double T, double dt,
                  const EvolveOptions& opts = {});

/// Finite-difference velocities along a trajectory: centered differences in
/// the interior, second-order one-sided stencils at the ends.  Needs at
/// least three samples.
std::vector<Eigen::VectorXd> path_velocities(const Trajectory& traj);

/// Primal dissipation potential R(u, v) = sup_xi <xi,v> - R*(u, xi), the
/// supremum taken over the tangent space of the constraint (for simplex
/// systems R* is invariant under constant shifts of xi, so the reduction is
/// exact).  v is projected onto the tangent space first.
double primal_r(const GradientSystem& gs, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

/// Time-integrated dissipation  int R(u, du/dt) + R*(u, -DE(u)) dt along a
/// trajectory, with finite-difference velocities and trapezoid quadrature.
double path_dissipation(const GradientSystem& gs, const Trajectory& traj);

/// Nonnegative path functional  int R + R* + <DE(u), du/dt> dt; zero exactly
/// on solutions of the generated flow.
double rate_functional(const GradientSystem& gs, const Trajectory& traj);

}  // namespace ggs
