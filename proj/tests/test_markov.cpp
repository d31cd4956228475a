#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "ggs/markov.hpp"
#include "ggs/potentials.hpp"

using namespace ggs;

TEST_CASE("generator construction and validation") {
  Eigen::MatrixXd off(3, 3);
  off << 0, 2, 0, 1, 0, 3, 0.5, 1, 0;
  MarkovGenerator gen = generator_from_offdiag(off);
  CHECK(gen.a.colwise().sum().lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK(gen.a(0, 1) == 2.0);
  validate_generator(gen);

  MarkovGenerator bad = gen;
  bad.a(0, 1) = -0.5;
  CHECK_THROWS_AS(validate_generator(bad), std::domain_error);
  bad = gen;
  bad.a(0, 0) += 0.3;  // breaks the column sum
  CHECK_THROWS_AS(validate_generator(bad), std::domain_error);
}

TEST_CASE("detailed balance of a hand-built two-state chain") {
  Eigen::MatrixXd off(2, 2);
  off << 0, 1, 2, 0;  // rate 0->1 is 2, rate 1->0 is 1
  MarkovGenerator gen = generator_from_offdiag(off);
  DetailedBalance db = detailed_balance(gen);
  CHECK(db.reversible);
  CHECK(db.w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(db.w[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(db.residual < 1e-12);
}

TEST_CASE("random reversible chains are reversible and generate A c") {
  for (int n : {2, 3, 5, 6}) {
    MarkovGenerator gen = random_reversible(n, 1000ull + n);
    validate_generator(gen);
    DetailedBalance db = detailed_balance(gen);
    CHECK(db.reversible);
    CHECK(db.w.minCoeff() > 0.0);

    GradientSystem half = entropic_gs(gen, db.w, EntropyConvention::half);
    GradientSystem plain = entropic_gs(gen, db.w, EntropyConvention::plain);
    unsigned long long state = 17 * n + 3;
    auto next = [&]() {
      state ^= state << 13; state ^= state >> 7; state ^= state << 17;
      return (double)(state % 100000) / 100000.0;
    };
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd rho(n);
      for (int i = 0; i < n; ++i) rho[i] = 0.05 + next();
      rho /= rho.sum();
      Eigen::VectorXd target = gen.a * rho;
      double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
      Eigen::VectorXd tilt(n);
      for (int i = 0; i < n; ++i)
        tilt[i] = -0.5 * std::log(rho[i] / db.w[i]);
      double g1 = (half.vector_field(rho) - target).lpNorm<Eigen::Infinity>();
      double g2 = (plain.vector_field(rho) - target).lpNorm<Eigen::Infinity>();
      double g3 = (field_via_h(gen, db.w, rho, tilt) - target).lpNorm<Eigen::Infinity>();
      CHECK(g1 / scale < 1e-9);
      CHECK(g2 / scale < 1e-9);
      CHECK(g3 / scale < 1e-9);
    }
  }
}

TEST_CASE("generating functional routes agree with the direct structure") {
  MarkovGenerator gen = random_reversible(5, 77ull);
  DetailedBalance db = detailed_balance(gen);
  GradientSystem half = entropic_gs(gen, db.w, EntropyConvention::half);
  GradientSystem plain = entropic_gs(gen, db.w, EntropyConvention::plain);

  Eigen::VectorXd rho(5);
  rho << 0.3, 0.1, 0.25, 0.2, 0.15;
  Eigen::VectorXd xi(5);
  xi << 0.4, -0.2, 0.1, 0.0, -0.3;

  // H at xi = 0 vanishes because columns of the generator sum to zero
  CHECK(std::abs(h_functional(gen, rho, Eigen::VectorXd::Zero(5))) < 1e-14);

  // independent double-loop evaluation of H
  double direct = 0.0;
  for (int i = 0; i < 5; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += gen.a(j, i) * std::exp(xi[j]);
    direct += std::exp(-xi[i]) * acc * rho[i];
  }
  CHECK(h_functional(gen, rho, xi) == doctest::Approx(direct).epsilon(1e-13));

  // recentred H equals the half-normalized dual potential
  CHECK(r_star_via_h(gen, db.w, rho, xi) ==
        doctest::Approx(half.r_star(rho, xi)).epsilon(1e-12));

  // relation between the two conventions: R*_half(rho,xi) = (1/2) R*_plain(rho,2 xi)
  CHECK(half.r_star(rho, xi) ==
        doctest::Approx(0.5 * plain.r_star(rho, 2.0 * xi)).epsilon(1e-12));
}

TEST_CASE("forward solve uses the exact propagator") {
  Eigen::MatrixXd off(2, 2);
  off << 0, 1, 1, 0;
  MarkovGenerator gen = generator_from_offdiag(off);
  Eigen::VectorXd c0(2);
  c0 << 0.9, 0.1;
  DensityPath path = forward_solve(gen, c0, 2.0, 0.01);
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    double exact = 0.5 + 0.4 * std::exp(-2.0 * path.times[k]);
    CHECK(std::abs(path.states[k][0] - exact) < 1e-12);
    CHECK(std::abs(path.states[k].sum() - 1.0) < 1e-12);
  }
}

TEST_CASE("empirical simulation is seed-deterministic and consistent") {
  MarkovGenerator gen = random_reversible(3, 5ull);
  Eigen::VectorXd c0(3);
  c0 << 0.7, 0.2, 0.1;
  DensityPath a = simulate_empirical(gen, c0, 2000, 1.0, 0.05, 99ull);
  DensityPath b = simulate_empirical(gen, c0, 2000, 1.0, 0.05, 99ull);
  REQUIRE(a.states.size() == b.states.size());
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK((a.states[k] - b.states[k]).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK(std::abs(a.states[k].sum() - 1.0) < 1e-12);
  }
  DensityPath c = simulate_empirical(gen, c0, 2000, 1.0, 0.05, 100ull);
  bool differs = false;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    if ((a.states[k] - c.states[k]).lpNorm<Eigen::Infinity>() > 0) differs = true;
  CHECK(differs);

  DensityPath mean = forward_solve(gen, c0, 1.0, 0.05);
  double sup = 0.0;
  for (std::size_t k = 0; k < a.states.size(); ++k)
    sup = std::max(sup, (a.states[k] - mean.states[k]).lpNorm<Eigen::Infinity>());
  CHECK(sup < 0.1);  // ~10 sigma at 2000 particles
}
