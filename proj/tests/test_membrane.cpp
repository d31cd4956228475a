#include "doctest.h"

#include <cmath>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "ggs/membrane.hpp"

using namespace ggs;

namespace {

LayerProfile ramp_profile() {
  LayerProfile p;
  p.a_minus = [](double) { return 1.0; };
  p.a_plus = [](double) { return 1.0; };
  p.a_star = [](double) { return 1.0; };
  p.v_minus = [](double) { return 0.0; };
  p.v_star = [](double y) { return y; };
  p.v_plus = [](double) { return 1.0; };
  return p;
}

double side_mass(const MembraneOperator& op, const Eigen::VectorXd& u, bool left) {
  double acc = 0.0;
  for (int i = 0; i < op.mesh.n(); ++i)
    if ((op.mesh.centers[i] < 0.0) == left) acc += u[i] * op.mesh.widths[i];
  return acc;
}

}  // namespace

TEST_CASE("transmission coefficient: flat value, scaling, closed ramp form") {
  LayerProfile flat = flat_profile();
  CHECK(std::abs(a_star_coeff(flat) - 0.5) < 1e-10);
  CHECK(std::abs(a_star_coeff_harm(flat) - 0.5) < 1e-10);

  LayerProfile fast = flat;
  fast.a_star = [](double) { return 2.0; };
  CHECK(a_star_coeff(fast) == doctest::Approx(1.0).epsilon(1e-10));

  LayerProfile ramp = ramp_profile();
  double z0 = 1.0 + std::exp(-1.0);
  double expected = 1.0 / (z0 * (std::exp(1.0) - 1.0));
  CHECK(a_star_coeff(ramp) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(a_star_coeff_harm(ramp) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("profile validation and assembled coefficients") {
  LayerProfile broken = flat_profile();
  broken.v_star = [](double y) { return 0.3 * y + 0.1; };  // jumps at x = 0
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  LayerProfile ramp = ramp_profile();
  ramp.validate();
  double eps = 0.05;
  // continuity of the assembled potential across both seams
  for (double seam : {0.0, eps}) {
    double below = ramp.v_eps(eps, seam - 1e-9);
    double above = ramp.v_eps(eps, seam + 1e-9);
    CHECK(std::abs(below - above) < 1e-6);
  }
  // layer diffusivity is the eps-scaled profile (O(1) layer resistance)
  CHECK(ramp.a_eps(eps, 0.5 * eps) == doctest::Approx(eps).epsilon(1e-12));
  CHECK(ramp.a_eps(eps, -0.3) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ramp.a_eps(eps, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("equilibrium is an exact steady state of both operators") {
  LayerProfile prof = flat_profile();
  prof.v_minus = [](double x) { return 0.25 * x * x; };
  prof.v_plus = [](double x) { return 0.4 + 0.3 * x * x; };
  prof.v_star = [](double y) { return 0.4 * y; };
  prof.validate();

  MeshSpec spec;
  spec.cells_left = 80;
  spec.cells_right = 80;
  spec.cells_layer = 24;
  for (bool thin : {true, false}) {
    MembraneOperator op = thin ? build_thin_layer(prof, 0.1, spec)
                               : build_limit(prof, spec);
    Eigen::VectorXd eq = equilibrium(op);
    CHECK(std::abs(mass(op, eq) - 1.0) < 1e-12);
    MembraneTrajectory traj = solve(op, eq, 0.1, 1e-3);
    double sup = 0.0;
    for (const auto& u : traj.states)
      sup = std::max(sup, (u - eq).lpNorm<Eigen::Infinity>());
    CHECK(sup < 1e-12);
  }
}

TEST_CASE("transparent interface reproduces the pure diffusion mode") {
  MeshSpec spec;
  spec.cells_left = 150;
  spec.cells_right = 150;
  spec.cells_layer = 24;
  MembraneOperator op = build_limit(flat_profile(), spec, 1e6);
  const double k = M_PI / 2.0;
  Eigen::VectorXd u0 = cell_average(op.mesh, [&](double x) {
    return 0.5 + 0.1 * std::cos(k * (x + 1.0));
  });
  u0 /= mass(op, u0);
  const double T = 0.2, dt = 2e-4;
  MembraneTrajectory traj = solve(op, u0, T, dt);
  double sup = 0.0;
  for (int i = 0; i < op.mesh.n(); ++i) {
    double exact = 0.5 + 0.1 * std::cos(k * (op.mesh.centers[i] + 1.0)) *
                             std::exp(-k * k * T);
    sup = std::max(sup, std::abs(traj.states.back()[i] - exact));
  }
  CHECK(sup < 1e-4);
  // continuity of the density across the transparent interface
  auto traces = interface_traces(op, traj.states.back());
  CHECK(std::abs(traces.first - traces.second) < 1e-3);
}

TEST_CASE("closed interface conserves the two side masses separately") {
  MeshSpec spec;
  spec.cells_left = 60;
  spec.cells_right = 60;
  spec.cells_layer = 24;
  MembraneOperator op = build_limit(flat_profile(), spec, 0.0);
  Eigen::VectorXd u0(op.mesh.n());
  for (int i = 0; i < op.mesh.n(); ++i)
    u0[i] = op.mesh.centers[i] < 0 ? 0.75 : 0.25;
  MembraneTrajectory traj = solve(op, u0, 0.3, 1e-3);
  CHECK(std::abs(side_mass(op, traj.states.back(), true) - 0.75) < 1e-12);
  CHECK(std::abs(side_mass(op, traj.states.back(), false) - 0.25) < 1e-12);
}

TEST_CASE("energy decays and the balance closes on both operators") {
  LayerProfile prof = flat_profile();
  prof.v_plus = [](double x) { return 0.3 * x; };
  prof.validate();
  MeshSpec spec;
  spec.cells_left = 100;
  spec.cells_right = 100;
  spec.cells_layer = 24;
  auto u0_fun = [](double x) { return x < 0 ? 0.8 : 0.2 + 0.1 * x; };
  for (bool thin : {true, false}) {
    MembraneOperator op = thin ? build_thin_layer(prof, 0.08, spec)
                               : build_limit(prof, spec);
    Eigen::VectorXd u0 = thin ? well_prepared(prof, 0.08, op, u0_fun)
                              : cell_average(op.mesh, u0_fun);
    u0 /= mass(op, u0);
    MembraneTrajectory traj = solve(op, u0, 0.3, 1e-3);
    CHECK(traj.max_mass_defect < 1e-11);
    CHECK(traj.min_density > 0.0);
    for (std::size_t kk = 1; kk < traj.energies.size(); ++kk)
      CHECK(traj.energies[kk] <= traj.energies[kk - 1] + 1e-13);
    double defect = traj.energies.back() - traj.energies.front() +
                    dissipation(op, traj);
    CHECK(std::abs(defect) < 1e-3);

    if (thin) {
      double blow = dissipation_blow_up(prof, 0.08, traj, op.mesh);
      double direct = dissipation(op, traj);
      CHECK(std::abs(blow - direct) / (1.0 + direct) < 1e-6);
    }
  }
}

TEST_CASE("half-convention identity at a flat profile") {
  MeshSpec spec;
  spec.cells_left = 40;
  spec.cells_right = 40;
  spec.cells_layer = 20;
  MembraneOperator op = build_limit(flat_profile(), spec);
  Eigen::VectorXd u(op.mesh.n()), xi(op.mesh.n());
  for (int i = 0; i < op.mesh.n(); ++i) {
    double x = op.mesh.centers[i];
    u[i] = 0.5 + 0.2 * std::sin(1.7 * x) + 0.1 * (x > 0 ? 1.0 : -1.0);
    xi[i] = 0.7 * std::sin(2.0 * x) + 0.2 * (x > 0 ? 1.0 : 0.0);
  }
  u /= mass(op, u);
  double lhs = 0.5 * r_star_limit(op, u, 2.0 * xi);
  double rhs = r_star_half_convention(op, u, xi, op.a_star);
  CHECK(std::abs(lhs - rhs) < 1e-12);
  // zero force gives zero potential
  CHECK(r_star_limit(op, u, Eigen::VectorXd::Zero(op.mesh.n())) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("piecewise-constant L1 distance on mismatched meshes") {
  MembraneMesh ma;
  ma.edges = {-1.0, 0.0, 1.0};
  ma.centers = {-0.5, 0.5};
  ma.widths = {1.0, 1.0};
  MembraneMesh mb;
  mb.edges = {-1.0, -0.5, 1.0};
  mb.centers = {-0.75, 0.25};
  mb.widths = {0.5, 1.5};
  Eigen::VectorXd ua(2), ub(2);
  ua << 1.0, 2.0;
  ub << 1.0, 3.0;
  CHECK(l1_distance(ma, ua, mb, ub) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(l1_distance(ma, ua, ma, ua) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("thin layers contract onto the transmission limit") {
  LayerProfile prof = flat_profile();
  auto u0_fun = [](double x) { return x < 0 ? 1.1 + 0.3 * x : 0.7 - 0.2 * x; };
  MeshSpec spec;
  spec.cells_left = 100;
  spec.cells_right = 100;
  spec.cells_layer = 24;
  MembraneReport rep =
      edp_check_membrane(prof, {0.1, 0.03}, u0_fun, 0.15, 2e-3, spec);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.a_star == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rep.entries[1].sup_l1_gap < rep.entries[0].sup_l1_gap);
  CHECK(rep.entries[1].sup_l1_gap < 5e-2);
  CHECK(std::abs(rep.edb_limit) < 1e-3);
  for (const auto& e : rep.entries) CHECK(std::abs(e.edb_eps) < 1e-3);
}
