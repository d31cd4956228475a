#pragma once

#include <functional>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ggs {

/// Coefficients of the thin-layer diffusion problem on [-1,1]: bulk
/// diffusivities a_-, a_+ and potentials V_-, V_+ on their subdomains, and
/// layer profiles a_*, V_* on the unit reference interval.  The assembled
/// potential is continuous: V_-(0) = V_*(0) and V_*(1) = V_+(0) are required.
struct LayerProfile {
  std::function<double(double)> a_minus, a_plus, a_star;  // a_minus on [-1,0], others on [0,1]
  std::function<double(double)> v_minus, v_plus, v_star;

  void validate() const;  // throws std::invalid_argument on violation

  // assembled coefficients at layer width eps: diffusivity jumps at 0 and
  // eps, potential is continuous (the bulk potential attaches shifted so its
  // boundary value meets the layer's)
  double a_eps(double eps, double x) const;
  double v_eps(double eps, double x) const;
};

LayerProfile flat_profile();

/// Transmission coefficient of the collapsed layer, by direct quadrature of
/// 1 / integral of Z0 e^{V_*}/a_*.
double a_star_coeff(const LayerProfile& p);
/// The same number through the harmonic-mean route (independent code path).
double a_star_coeff_harm(const LayerProfile& p);

/// Nonuniform finite-volume mesh (cell edges, centers, widths).
struct MembraneMesh {
  std::vector<double> edges;    // size n+1
  std::vector<double> centers;  // size n
  std::vector<double> widths;   // size n
  int n() const { return static_cast<int>(centers.size()); }
};

struct MeshSpec {
  int cells_left = 200;
  int cells_right = 200;
  int cells_layer = 40;    // >= 20; geometrically refined toward both layer edges
  double grading = 1.15;   // growth ratio of layer cell widths away from the edges
};

/// Assembled FV operator: cell-averaged unnormalized equilibrium wtil =
/// e^{-V}, face conductances from exact resistance integrals of 1/(a wtil)
/// between neighboring cell centers.  The flux through an interior face is
/// face_coef * (u_right/wtil_right - u_left/wtil_left), which makes wtil an
/// exact discrete steady state.  Limit operators additionally carry the
/// transmission data of the collapsed layer at the interface face.
struct MembraneOperator {
  MembraneMesh mesh;
  Eigen::VectorXd wtil;
  Eigen::VectorXd face_coef;  // size n+1; zero at the two boundary faces
  double z_total = 0.0;       // integral of e^{-V}
  // limit-only data
  int interface_face = -1;    // face index at x = 0, or -1 for thin-layer operators
  double a_star = 0.0;
  double z0 = 0.0;
};

MembraneOperator build_thin_layer(const LayerProfile& p, double eps, const MeshSpec& spec = {});
/// Limit (transmission) operator; pass a_star_override >= 0 to replace the
/// profile-derived coefficient (0 decouples the subdomains).
MembraneOperator build_limit(const LayerProfile& p, const MeshSpec& spec = {},
                             double a_star_override = -1.0);

Eigen::VectorXd cell_average(const MembraneMesh& mesh, const std::function<double(double)>& f);
/// Equilibrium density cells wtil / z_total.
Eigen::VectorXd equilibrium(const MembraneOperator& op);

double mass(const MembraneOperator& op, const Eigen::VectorXd& u);
double energy(const MembraneOperator& op, const Eigen::VectorXd& u);

struct MembraneTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> energies;
  double min_density = 0.0;
  double max_mass_defect = 0.0;  // max |mass - 1| over the trajectory
};

/// Implicit Euler in time (the scheme is linear, one tridiagonal solve per
/// step); records every step.  Throws if the initial mass is not 1 within
/// 1e-8 (normalize first), keeps mass to 1e-12 per step.
MembraneTrajectory solve(const MembraneOperator& op, const Eigen::VectorXd& u0, double T,
                         double dt);

/// One-sided interface traces of r = u/wtil by linear extrapolation from the
/// two adjacent cells on each side; returns {r_left, r_right}.
std::pair<double, double> interface_traces(const MembraneOperator& op, const Eigen::VectorXd& u);

/// De Giorgi dissipation along a trajectory: velocity integrals I at faces
/// plus the entropy-gradient term, face-quadrature consistent with the
/// operator (so the on-solution integrand telescopes against dE/dt); for
/// limit operators the interface face contributes the cosh pair evaluated at
/// the transmission flux and the jump of the driving force.
double dissipation(const MembraneOperator& op, const MembraneTrajectory& traj);

/// Dual dissipation potential at state u and cellwise force xi (limit
/// operator: quadratic bulk part plus cosh interface term).
double r_star_limit(const MembraneOperator& op, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& xi);

/// Chain-derived membrane functional with interface coefficient b and the
/// doubled-force convention: bulk integral of a (xi')^2 u plus
/// b sqrt(rho(0^-)rho(0^+)) C*(2(xi(0^+)-xi(0^-))).  For flat bulk
/// potentials it equals r_star_limit(u, 2 xi)/2 with b = a_star.
double r_star_half_convention(const MembraneOperator& op, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& xi, double b);

/// Piecewise-constant L1 distance between cell functions on two meshes over
/// the common domain [-1,1].
double l1_distance(const MembraneMesh& ma, const Eigen::VectorXd& ua, const MembraneMesh& mb,
                   const Eigen::VectorXd& ub);

/// Blow-up of the thin layer onto [-1,2]: mesh edges map exactly, cell
/// values are preserved; carries the transformed coefficient so dissipation
/// can be re-evaluated in blown-up variables.
struct BlowUp {
  MembraneMesh mesh;                       // image mesh on [-1, 2]
  std::function<double(double)> x_of_y;    // inverse map
  std::function<double(double)> y_of_x;
};
BlowUp blow_up_map(double eps, const MembraneMesh& mesh);
/// Dissipation of a thin-layer trajectory evaluated in blown-up variables
/// (independent quadrature route; equals dissipation() up to quadrature
/// error).
double dissipation_blow_up(const LayerProfile& p, double eps, const MembraneTrajectory& traj,
                           const MembraneMesh& mesh);

/// Well-prepared thin-layer initial data from limit data u0 (defined on
/// [-1,0) U (0,1] with a possible jump): bulk parts transplanted, the layer
/// bridged by the zero-flux optimal profile in the rescaled variable,
/// normalized to unit mass.
Eigen::VectorXd well_prepared(const LayerProfile& p, double eps, const MembraneOperator& op,
                              const std::function<double(double)>& u0_limit);

struct MembraneSweepEntry {
  double epsilon = 0.0;
  double sup_l1_gap = 0.0;        // sup over sampled times of L1 distance to the limit solution
  double d_eps = 0.0;             // De Giorgi dissipation of the thin-layer solve
  double energy_gap = 0.0;        // max over sampled times of |E_eps - E_0|
  double edb_eps = 0.0;           // |E_eps(T) + D_eps - E_eps(0)|
};

struct MembraneReport {
  std::vector<MembraneSweepEntry> entries;
  double d_limit = 0.0;
  double edb_limit = 0.0;
  double a_star = 0.0;
};

MembraneReport edp_check_membrane(const LayerProfile& p, const std::vector<double>& eps_list,
                                  const std::function<double(double)>& u0_limit, double T,
                                  double dt, const MeshSpec& spec = {}, int jobs = 1);

/// Snapshot CSV: columns x, u, w, flux (flux at the right face of each cell).
void write_snapshot(const MembraneOperator& op, const Eigen::VectorXd& u, std::ostream& os);

}  // namespace ggs
