#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ggs {

/// Double-well problem on the cylinder [0,1] x [0,7]: diffusion with mobility
/// m_omega in x and Kramers-scaled drift-diffusion along the reaction path y.
/// The potential has wells at y = 2, 6 (values 0) and its strict global
/// maximum at the barrier y = 5; the stored curvatures are the exact second
/// derivatives there (the default potential is built from exact quadratic
/// windows around these points, joined by quintic Hermite connectors).
struct ReactionSetup {
  std::function<double(double)> potential;
  double curv_well_0 = 4.0;    // V''(2)
  double curv_well_1 = 1.0;    // V''(6)
  double curv_barrier = 2.0;   // -V''(5)
  double barrier_height = 1.0;
  double m_omega = 1.0;
  double m_upsilon = 1.0;
  int omega_cells = 40;
  int upsilon_cells = 280;
  double epsilon = 0.1;

  void validate() const;  // throws std::invalid_argument if the shape is wrong
};

ReactionSetup default_setup(double epsilon, double curv_well_0 = 4.0, double curv_well_1 = 1.0,
                            double curv_barrier = 2.0, double barrier_height = 1.0);

/// Equilibrium weights of the two wells and the Kramers time scale.
struct KramersData {
  double alpha0 = 0.0, alpha1 = 0.0;  // curvature formula
  double tau_eps = 0.0;               // m_Y * integral of 1/w_eps
  double scaled_rate = 0.0;           // (tau_eps/eps) exp(-V(5)/eps)
  double limit_rate = 0.0;            // its eps->0 limit from the curvatures
};
KramersData kramers(const ReactionSetup& s);

/// Assembled finite-volume operator on the cylinder: cell-averaged
/// equilibrium weights in y and exponential-fitted face conductances (exact
/// resistance integrals of 1/w_eps between cell centers, times tau_eps), so
/// the discrete steady state is exactly the cell-averaged equilibrium.
struct FpGrid {
  int nx = 0, ny = 0;
  double hx = 0.0, hy = 0.0;
  std::vector<double> xc, yc;   // cell centers
  Eigen::VectorXd wy;           // cell-averaged equilibrium density in y, sum(wy)*hy = 1
  Eigen::VectorXd y_face_coef;  // size ny+1, zero at the boundary faces
  double x_face_coef = 0.0;     // m_omega / hx
  double tau_eps = 0.0;
  double m_omega = 0.0;
  double epsilon = 0.0;
};
FpGrid build_fp(const ReactionSetup& s);

Eigen::MatrixXd fp_equilibrium(const FpGrid& g);  // nx x ny, mass exactly 1
double fp_mass(const FpGrid& g, const Eigen::MatrixXd& u);
double fp_energy(const FpGrid& g, const Eigen::MatrixXd& u);
/// Right-hand side of the evolution (x-diffusion plus y drift-diffusion).
Eigen::MatrixXd fp_field(const FpGrid& g, const Eigen::MatrixXd& u);
/// Dual dissipation potential, quadratic with log-mean weights (so the force
/// xi = -DE reproduces fp_field exactly).
double fp_r_star(const FpGrid& g, const Eigen::MatrixXd& u, const Eigen::MatrixXd& xi);
Eigen::MatrixXd fp_d_r_star(const FpGrid& g, const Eigen::MatrixXd& u, const Eigen::MatrixXd& xi);

struct FpTrajectory {
  std::vector<double> times;
  std::vector<Eigen::MatrixXd> states;
  std::vector<double> energies;
  double max_mass_defect = 0.0;
  double min_density = 0.0;
};
/// Strang splitting (implicit x half-step, implicit y step, implicit x
/// half-step); every sub-step conserves mass and decreases the relative
/// entropy.  jobs > 1 solves the independent rows/columns concurrently.
FpTrajectory solve_fp(const FpGrid& g, const Eigen::MatrixXd& u0, double T, double dt,
                      int jobs = 1);

/// Well marginals: x-profiles of the mass left and right of the barrier.
std::pair<Eigen::VectorXd, Eigen::VectorXd> fp_marginals(const FpGrid& g,
                                                         const Eigen::MatrixXd& u,
                                                         double split_y = 5.0);

/// Duality functional of a trajectory with test field xi(t, x, y):
/// int <xi, udot> - R*(u, xi) + R*(u, -DE(u)) dt.  Bounded by the De Giorgi
/// dissipation, with equality at xi = -DE(u).
double fp_b(const FpGrid& g, const FpTrajectory& traj,
            const std::function<double(double, double, double)>& xi);
/// De Giorgi dissipation along a solution (the optimal test field -DE).
double fp_dissipation(const FpGrid& g, const FpTrajectory& traj);
/// Tail of a trajectory from the first sample with time >= t_from.  Used to
/// take the duality/dissipation comparison on the resolved time window: cut
/// initial data equilibrates within the wells in a fraction of one time step,
/// and no fixed-step quadrature can integrate across that layer.
FpTrajectory fp_window(const FpTrajectory& traj, double t_from);

/// Rescaling of the reaction path to z in [0,1] by normalized resistance.
struct ZData {
  std::vector<double> y;      // uniform nodes on [0,7]
  std::vector<double> z;      // Z(y), monotone, Z(0)=0, Z(7)=1
  std::vector<double> w_hat;  // transformed equilibrium density at z nodes
  std::vector<double> v;      // u/w_eps at the nodes (empty unless u given)
  double z_end_ratio = 0.0;   // cumulative vs independent total quadrature
  double w_hat_mass = 0.0;    // integral of w_hat dz (computed in y variables)
  double z_of(double y) const;  // piecewise-linear interpolation
};
ZData z_transform(const ReactionSetup& s, const std::function<double(double)>& u_of_y = {},
                  int nodes = 1401);

/// Smooth and analytic path fields (t, x, z) for the dualization identity:
/// the original-variable functional evaluated at u = v w_eps, xi = zeta(Z(y))
/// equals the rescaled functional evaluated on (v, zeta).
struct PathFields {
  std::function<double(double, double, double)> v, v_t, v_x, v_z;
  std::function<double(double, double, double)> zeta, zeta_x, zeta_z;
};
double b_eps_fields(const ReactionSetup& s, const PathFields& f, double T, int panels_t = 6,
                    int panels_x = 12, int panels_y = 320);
double b_hat_eps_fields(const ReactionSetup& s, const PathFields& f, double T, int panels_t = 6,
                        int panels_x = 12, int panels_y = 320);

/// Limit reaction-diffusion system for c = (c0, c1) on [0,1]:
/// c0' = m_O c0'' - m_Y (c0/a0 - c1/a1), c1' = m_O c1'' + m_Y (...), Neumann.
struct RdsGrid {
  int n = 0;
  double h = 0.0;
  std::vector<double> xc;
  double m_omega = 0.0, m_upsilon = 0.0;
  double alpha0 = 0.0, alpha1 = 0.0;
};
RdsGrid build_rds(const ReactionSetup& s, int cells = 80);

struct RdsTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;  // stacked [c0; c1]
  std::vector<double> energies;
};
/// Exact-in-time linear propagation (matrix exponential of the constant
/// generator, precomputed once per step size).
RdsTrajectory solve_limit_rds(const RdsGrid& g, const Eigen::VectorXd& c0,
                              const Eigen::VectorXd& c1, double T, double dt);

Eigen::VectorXd rds_field(const RdsGrid& g, const Eigen::VectorXd& c);
double rds_energy(const RdsGrid& g, const Eigen::VectorXd& c);
double rds_r_star(const RdsGrid& g, const Eigen::VectorXd& c, const Eigen::VectorXd& eta);
Eigen::VectorXd rds_d_r_star(const RdsGrid& g, const Eigen::VectorXd& c,
                             const Eigen::VectorXd& eta);
double rds_dissipation(const RdsGrid& g, const RdsTrajectory& traj);
/// Duality functional with component test fields zeta_j(t, x).
double rds_b(const RdsGrid& g, const RdsTrajectory& traj,
             const std::function<double(double, double)>& zeta0,
             const std::function<double(double, double)>& zeta1);
/// Interface cost between the two wells for a force jump dzeta and boundary
/// relative densities (v0, v1); the z-profile inf-sup in closed form.
double n_pair(double dzeta, double v0, double v1);

/// Well-prepared cylinder data from limit densities: c_j(x) w_eps(y) times a
/// normalized tent cutoff around each well.
Eigen::MatrixXd recovery_data(const FpGrid& g, const ReactionSetup& s,
                              const std::function<double(double)>& c0,
                              const std::function<double(double)>& c1);

struct ReactionSweepEntry {
  double epsilon = 0.0;
  double tau_eps = 0.0;
  double sup_marginal_l1 = 0.0;  // sup over times, both species
  double energy_gap = 0.0;       // max over sampled times |E_eps - E_0|
  double d_eps = 0.0;            // De Giorgi dissipation of the cylinder solve
  double b_best = 0.0;           // best duality lower bound from the zeta dictionary
  double well_mass_0 = 0.0, well_mass_1 = 0.0;  // equilibrium split
};
struct ReactionReport {
  std::vector<ReactionSweepEntry> entries;
  double d_limit = 0.0;        // De Giorgi dissipation of the limit system
  double b_limit_best = 0.0;   // dictionary bound for the limit trajectory
  double alpha0 = 0.0, alpha1 = 0.0;
};
/// Convergence study: solves the limit system once and the cylinder problem
/// per epsilon from recovery data, comparing well marginals, energies, and
/// duality bounds.
ReactionReport edp_check_reaction(const ReactionSetup& base, const std::vector<double>& eps_list,
                                  const std::function<double(double)>& c0_init,
                                  const std::function<double(double)>& c1_init, double T,
                                  double dt, int jobs = 1);

}  // namespace ggs
