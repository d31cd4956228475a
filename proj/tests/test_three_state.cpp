#include "doctest.h"

#include <cmath>

#include <Eigen/Dense>

#include "ggs/gradient_system.hpp"
#include "ggs/three_state.hpp"

using namespace ggs;

namespace {

Eigen::Matrix3d exchange_matrix(double eps) {
  Eigen::Matrix3d m;
  m << -1.0, 1.0 / eps, 0.0,
        1.0, -2.0 / eps, 1.0,
        0.0, 1.0 / eps, -1.0;
  return (2.0 + eps) * m;
}

}  // namespace

TEST_CASE("weights and generated field match the exchange matrix") {
  Eigen::Vector3d w = family_weights(0.1);
  CHECK(w[0] == doctest::Approx(1.0 / 2.1).epsilon(1e-14));
  CHECK(w[1] == doctest::Approx(0.1 / 2.1).epsilon(1e-14));
  CHECK(std::abs(w.sum() - 1.0) < 1e-14);

  for (auto kind : {FamilyCase::quadratic, FamilyCase::cosh,
                    FamilyCase::entropic_quadratic}) {
    for (double eps : {0.5, 0.1}) {
      FamilyConfig cfg = make_family(kind, eps);
      GradientSystem gs = family_gs(cfg);
      Eigen::Matrix3d m = exchange_matrix(eps);
      Eigen::Vector3d u(0.5, 0.2, 0.3);
      Eigen::Vector3d v(0.25, 0.05, 0.7);
      for (const Eigen::Vector3d& c : {u, v}) {
        Eigen::VectorXd field = gs.vector_field(c);
        Eigen::Vector3d target = m * c;
        double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
        CHECK((field - target).lpNorm<Eigen::Infinity>() / scale < 1e-9);
      }
      // stationary at the weights
      CHECK(gs.vector_field(family_weights(eps)).lpNorm<Eigen::Infinity>() <
            1e-10);
    }
  }
}

TEST_CASE("edge coefficient is symmetric with the correct diagonal limit") {
  FamilyConfig quad = make_family(FamilyCase::quadratic, 0.1);
  FamilyConfig ch = make_family(FamilyCase::cosh, 0.1);
  CHECK(pair_coefficient(quad, 0.7, 1.9) ==
        doctest::Approx(pair_coefficient(quad, 1.9, 0.7)).epsilon(1e-13));
  // quadratic pair with quadratic density: coefficient is identically 1
  CHECK(pair_coefficient(quad, 0.7, 1.9) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair_coefficient(quad, 0.4, 0.4) == doctest::Approx(1.0).epsilon(1e-12));
  // cosh pair with Boltzmann density: coefficient is sqrt(r_l r_r) -> r on the diagonal
  CHECK(pair_coefficient(ch, 0.5, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair_coefficient(ch, 0.8, 0.8) == doctest::Approx(0.8).epsilon(1e-10));
}

TEST_CASE("primal potential closes the Fenchel identity on the flow") {
  for (auto kind : {FamilyCase::quadratic, FamilyCase::cosh}) {
    FamilyConfig cfg = make_family(kind, 0.2);
    GradientSystem gs = family_gs(cfg);
    Eigen::Vector3d u(0.5, 0.08, 0.42);
    Eigen::VectorXd xi = -gs.d_energy(u);
    Eigen::VectorXd v = gs.d_r_star(u, xi);
    double gap = r_eps_primal(cfg, u, v) + gs.r_star(u, xi) - xi.dot(v);
    CHECK(std::abs(gap) < 1e-8);
    CHECK(r_eps_primal(cfg, u, Eigen::Vector3d::Zero()) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // closed primal agrees with the variational one from the system itself
    CHECK(r_eps_primal(cfg, u, v) ==
          doctest::Approx(primal_r(gs, u, v)).epsilon(1e-6));
  }
}

TEST_CASE("reduced quantities: frozen values and closed forms") {
  CHECK(sigma_closed(FamilyCase::cosh, 0.3) ==
        doctest::Approx(0.166969722017664).epsilon(1e-12));
  CHECK(r_star_closed(FamilyCase::cosh, 0.3, 1.5) ==
        doctest::Approx(0.54016338322794447).epsilon(1e-12));
  CHECK(sigma_closed(FamilyCase::quadratic, 0.3) ==
        doctest::Approx(0.16).epsilon(1e-13));  // (1-2p)^2
  CHECK(r_star_closed(FamilyCase::quadratic, 0.3, 1.5) ==
        doctest::Approx(1.5 * 1.5 / 4.0).epsilon(1e-13));

  for (auto kind : {FamilyCase::quadratic, FamilyCase::cosh}) {
    Reduced red(make_family(kind, 0.1));
    for (double p : {0.15, 0.5, 0.85}) {
      CHECK(std::abs(red.sigma(p) - sigma_closed(kind, p)) < 1e-9);
      for (double eta : {-3.0, 0.5, 2.0}) {
        CHECK(std::abs(red.r_star(p, eta) - r_star_closed(kind, p, eta)) < 1e-7);
      }
    }
  }
}

TEST_CASE("reduced energy and envelope derivative are consistent") {
  Reduced red(make_family(FamilyCase::cosh, 0.1));
  const double h = 1e-6;
  for (double p : {0.25, 0.6}) {
    double fd = (red.energy(p + h) - red.energy(p - h)) / (2 * h);
    CHECK(red.d_energy(p) == doctest::Approx(fd).epsilon(1e-6));
    for (double eta : {-1.0, 1.2}) {
      double fd_eta = (red.r_star(p, eta + h) - red.r_star(p, eta - h)) / (2 * h);
      CHECK(std::abs(red.d_r_star_eta(p, eta) - fd_eta) < 1e-5);
    }
  }
}

TEST_CASE("cell value and reduced primal satisfy duality") {
  Reduced red(make_family(FamilyCase::cosh, 0.1));
  double p = 0.35;
  // at zero velocity the cell minimum is the exchange floor
  CHECK(red.m_value(p, 0.0) == doctest::Approx(red.sigma(p)).epsilon(1e-9));
  CHECK(red.r_primal(p, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  for (double eta : {-1.5, 0.8}) {
    double v = red.d_r_star_eta(p, eta);
    double gap = red.r_primal(p, v) + red.r_star(p, eta) - v * eta;
    CHECK(std::abs(gap) < 1e-5);
    // Young inequality at a mismatched slope
    CHECK(red.r_primal(p, v) + red.r_star(p, eta + 0.7) - v * (eta + 0.7) >
          -1e-8);
  }
  // closed-form m minimiser stays in the admissible band
  double z = red.m_minimizer(p, 0.4);
  CHECK(z > 0.0);
}

TEST_CASE("slow solution and frozen sample") {
  CHECK(slow_solution(0.9, 0.0) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(slow_solution(0.9, 1.0) ==
        doctest::Approx(0.55413411329464508).epsilon(1e-15));
}

TEST_CASE("entropic-quadratic growth is superquadratic") {
  GrowthReport rep = entropic_quadratic_growth(0.5, {10.0, 14.0, 20.0, 28.0, 40.0});
  REQUIRE(rep.rows.size() == 5);
  for (std::size_t k = 1; k < rep.rows.size(); ++k)
    CHECK(rep.rows[k].r_star > rep.rows[k - 1].r_star);
  // doubling eta = 10, 14, 20 multiplies the value by far more than 4
  CHECK(rep.rows[2].r_star >= 7.5 * rep.rows[0].r_star);
  CHECK(rep.rows[4].r_star >= 7.5 * rep.rows[2].r_star);
}

TEST_CASE("family-to-reduced sweep contracts with epsilon") {
  auto entries = edp_sweep(FamilyCase::cosh, {0.3, 0.1}, 0.9, 0.5, 2e-3);
  REQUIRE(entries.size() == 2);
  CHECK(entries[1].sup_state_err < entries[0].sup_state_err);
  CHECK(entries[1].sup_state_err < 0.1);
  for (const auto& e : entries) {
    CHECK(std::abs(e.edb_limit_residual) < 1e-3);
    CHECK(e.d_eps > 0.0);
    CHECK(e.d_limit > 0.0);
  }
  CHECK(std::abs(entries[1].d_eps - entries[1].d_limit) <
        std::abs(entries[0].d_eps - entries[0].d_limit) + 1e-9);
}
