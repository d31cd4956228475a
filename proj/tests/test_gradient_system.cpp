#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ggs/gradient_system.hpp"
#include "ggs/markov.hpp"
#include "ggs/potentials.hpp"
#include "ggs/reaction_network.hpp"

using namespace ggs;

namespace {

GradientSystem two_state_cosh() {
  Eigen::MatrixXd off(2, 2);
  off << 0, 1, 1, 0;
  MarkovGenerator gen = generator_from_offdiag(off);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  return entropic_gs(gen, w, EntropyConvention::plain);
}

GradientSystem two_state_quadratic() {
  std::vector<Reaction> reactions(1);
  reactions[0].alpha = Eigen::Vector2i(1, 0);
  reactions[0].beta = Eigen::Vector2i(0, 1);
  Eigen::VectorXd w(2);
  w << 0.5, 0.5;
  return reaction_gs(reactions, w, quadratic_pair());
}

Eigen::VectorXd two_state(double p) {
  Eigen::VectorXd u(2);
  u << p, 1.0 - p;
  return u;
}

}  // namespace

TEST_CASE("two-state relaxation matches the closed-form solution") {
  for (auto scheme : {Integrator::rk4_adaptive, Integrator::implicit_euler}) {
    EvolveOptions opts;
    opts.scheme = scheme;
    GradientSystem gs = two_state_cosh();
    Trajectory traj = evolve(gs, two_state(0.9), 1.0, 1e-3, opts);
    double sup = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      double exact = 0.5 + 0.4 * std::exp(-2.0 * traj.times[k]);
      sup = std::max(sup, std::abs(traj.states[k][0] - exact));
    }
    // implicit Euler is first order, so it only gets an O(dt) tolerance
    CHECK(sup < (scheme == Integrator::rk4_adaptive ? 1e-6 : 5e-4));
  }
  // frozen midpoint value, independent high-precision reference
  GradientSystem gs = two_state_cosh();
  Trajectory traj = evolve(gs, two_state(0.9), 1.0, 1e-3);
  CHECK(traj.states.back()[0] ==
        doctest::Approx(0.55413411329464508).epsilon(1e-7));
}

TEST_CASE("trajectories conserve mass, decay energy, balance the budget") {
  GradientSystem gs = two_state_cosh();
  Trajectory traj = evolve(gs, two_state(0.85), 2.0, 1e-3);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    CHECK(std::abs(traj.states[k].sum() - 1.0) < 1e-10);
    CHECK(traj.states[k].minCoeff() > 0.0);
    if (k > 0) CHECK(traj.energies[k] <= traj.energies[k - 1] + 1e-12);
  }
  double defect = traj.energies.back() - traj.energies.front() +
                  path_dissipation(gs, traj);
  CHECK(std::abs(defect) < 1e-4);
}

TEST_CASE("energy balance for a four-state reversible chain") {
  MarkovGenerator gen = random_reversible(4, 20260815ull);
  Eigen::VectorXd w = detailed_balance(gen).w;
  GradientSystem gs = entropic_gs(gen, w, EntropyConvention::plain);
  Eigen::VectorXd c0(4);
  c0 << 0.55, 0.25, 0.15, 0.05;
  Trajectory traj = evolve(gs, c0, 2.0, 1e-3);
  double defect = traj.energies.back() - traj.energies.front() +
                  path_dissipation(gs, traj);
  CHECK(std::abs(defect) < 1e-4);
}

TEST_CASE("rate functional vanishes on solutions and only there") {
  GradientSystem gs = two_state_cosh();
  Trajectory traj = evolve(gs, two_state(0.9), 1.5, 2e-3);
  double on_solution = rate_functional(gs, traj);
  CHECK(on_solution >= -1e-8);
  CHECK(on_solution < 1e-4);

  // frozen (constant-in-time) non-equilibrium path must pay a positive rate
  Trajectory frozen = traj;
  for (auto& u : frozen.states) u = two_state(0.9);
  CHECK(rate_functional(gs, frozen) > 1e-3);

  // time-reversed solution as well
  Trajectory rev = traj;
  for (std::size_t k = 0; k < rev.states.size(); ++k)
    rev.states[k] = traj.states[traj.states.size() - 1 - k];
  CHECK(rate_functional(gs, rev) > 1e-3);
}

TEST_CASE("primal potential satisfies the Fenchel system") {
  GradientSystem gs = two_state_cosh();
  for (double p : {0.2, 0.45, 0.8}) {
    Eigen::VectorXd u = two_state(p);
    Eigen::VectorXd xi = -gs.d_energy(u);
    Eigen::VectorXd v = gs.d_r_star(u, xi);
    double gap = primal_r(gs, u, v) + gs.r_star(u, xi) - xi.dot(v);
    CHECK(std::abs(gap) < 1e-6);
    // Young inequality at a non-optimal slope
    Eigen::VectorXd eta(2);
    eta << 0.3, -0.1;
    CHECK(primal_r(gs, u, v) + gs.r_star(u, eta) - eta.dot(v) > -1e-9);
    CHECK(primal_r(gs, u, Eigen::VectorXd::Zero(2)) ==
          doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("finite-difference velocities are exact on quadratic paths") {
  Trajectory traj;
  for (int k = 0; k <= 10; ++k) {
    double t = 0.1 * k;
    traj.times.push_back(t);
    Eigen::VectorXd u(2);
    u << t * t, 1.0 - t * t;
    traj.states.push_back(u);
    traj.energies.push_back(0.0);
    traj.edb_residual.push_back(0.0);
  }
  auto v = path_velocities(traj);
  for (int k = 0; k <= 10; ++k) {
    CHECK(v[k][0] == doctest::Approx(0.2 * k).epsilon(1e-10));
    CHECK(v[k][1] == doctest::Approx(-0.2 * k).epsilon(1e-10));
  }
}

TEST_CASE("reaction network structures generate mass action") {
  GradientSystem quad = two_state_quadratic();
  GradientSystem entropic = two_state_cosh();
  for (double p : {0.1, 0.35, 0.6, 0.95}) {
    Eigen::VectorXd c = two_state(p);
    Eigen::VectorXd f_quad = quad.vector_field(c);
    Eigen::VectorXd f_cosh = entropic.vector_field(c);
    CHECK(std::abs(f_quad[0] - (c[1] - c[0])) < 1e-12);
    CHECK(std::abs(f_quad[1] - (c[0] - c[1])) < 1e-12);
    CHECK((f_quad - f_cosh).lpNorm<Eigen::Infinity>() < 1e-12);
  }
  // dual potential of the single reaction: prefactor times pair potential
  std::vector<Reaction> reactions(1);
  reactions[0].alpha = Eigen::Vector2i(1, 0);
  reactions[0].beta = Eigen::Vector2i(0, 1);
  Eigen::VectorXd w = two_state(0.5);
  GradientSystem cosh_rn = reaction_gs(reactions, w, cosh_pair());
  Eigen::VectorXd c = two_state(0.3);
  Eigen::VectorXd mu(2);
  mu << 0.7, -0.4;
  double expected = std::sqrt(c[0] * c[1]) * cosh_star(mu[0] - mu[1]);
  CHECK(cosh_rn.r_star(c, mu) == doctest::Approx(expected).epsilon(1e-12));
  // stationary at the reference measure
  CHECK(cosh_rn.vector_field(w).lpNorm<Eigen::Infinity>() < 1e-13);
}

TEST_CASE("detailed balance violations are rejected") {
  std::vector<Reaction> reactions(1);
  reactions[0].alpha = Eigen::Vector2i(1, 0);
  reactions[0].beta = Eigen::Vector2i(0, 1);
  reactions[0].k_forward = 2.0;  // equilibrium would be (1/3, 2/3)
  Eigen::VectorXd w = two_state(0.5);
  CHECK_THROWS_AS(reaction_gs(reactions, w, cosh_pair()), std::domain_error);
}
