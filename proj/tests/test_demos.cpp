#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "ggs/demos.hpp"

using namespace ggs;

namespace {

double triangle_load(double t) {
  double s = std::fmod(t, 4.0);
  return 2.0 - std::abs(2.0 - s);  // rises 0->2 on [0,2], falls back on [2,4]
}

}  // namespace

TEST_CASE("zero yield radius: the viscous solution tracks the load") {
  auto res = demo_wiggly(0.01, 0.0, [](double t) { return t; }, 2.0, 0.0);
  REQUIRE(res.times.size() == res.u.size());
  // play with r = 0 is the load itself
  for (std::size_t k = 0; k < res.play.size(); ++k)
    CHECK(res.play[k] == doctest::Approx(res.load[k]).epsilon(1e-12));
  CHECK(res.sup_gap < 0.02);  // O(eps) relaxation lag
}

TEST_CASE("monotone loading converges to the play operator") {
  auto res = demo_wiggly(1e-3, 0.5, [](double t) { return t; }, 2.0, 0.0);
  // play solution for monotone load from the center of the yield band
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    double expected = std::max(0.0, res.times[k] - 0.5);
    CHECK(std::abs(res.play[k] - expected) < 1e-12);
  }
  CHECK(res.sup_gap < 0.05);
  // reported gap is consistent with the recorded columns
  double sup = 0.0;
  for (std::size_t k = 0; k < res.u.size(); ++k)
    sup = std::max(sup, std::abs(res.u[k] - res.play[k]));
  CHECK(res.sup_gap == doctest::Approx(sup).epsilon(1e-15));
}

TEST_CASE("cyclic loading opens a hysteresis loop of width 2r") {
  auto res = demo_wiggly(1e-3, 0.5, triangle_load, 8.0, 0.0);
  // play spot values at the first peak and valley
  std::size_t peak = 0, valley = 0;
  for (std::size_t k = 0; k < res.times.size(); ++k) {
    if (std::abs(res.times[k] - 2.0) < 1e-12) peak = k;
    if (std::abs(res.times[k] - 4.0) < 1e-12) valley = k;
  }
  REQUIRE(peak > 0);
  REQUIRE(valley > peak);
  CHECK(res.play[peak] == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(res.play[valley] == doctest::Approx(0.5).epsilon(1e-9));

  double width = hysteresis_width(res, 2.0);
  CHECK(width > 0.95);
  CHECK(width < 1.05);
}

TEST_CASE("wiggly demo rejects bad arguments") {
  CHECK_THROWS_AS(demo_wiggly(0.0, 0.5, [](double t) { return t; }, 1.0, 0.0),
                  std::invalid_argument);
  auto res = demo_wiggly(0.05, 0.1, [](double t) { return t; }, 1.0, 0.0, 101);
  CHECK_THROWS_AS(hysteresis_width(res, 5.0), std::invalid_argument);
}

TEST_CASE("oscillatory decay: envelopes and the two incompatible energies") {
  auto a_profile = [](double y) { return 2.0 + std::sin(2 * M_PI * y); };
  TwoStructuresReport rep =
      demo_two_structures(a_profile, {0.1, 0.01});
  CHECK(rep.a_min == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.a_max == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(rep.y_min == doctest::Approx(0.75).epsilon(1e-7));
  CHECK(rep.y_max == doctest::Approx(0.25).epsilon(1e-7));

  REQUIRE(rep.entries.size() == 2);
  const auto& fine = rep.entries.back();
  CHECK(fine.epsilon == 0.01);
  CHECK(std::abs(fine.min_ratio - std::exp(-3.0)) / std::exp(-3.0) < 0.01);
  CHECK(std::abs(fine.max_ratio - std::exp(-1.0)) / std::exp(-1.0) < 0.01);

  // profile prepared for the first structure: first energy attains a_min,
  // second energy stays near 1/a_min, an O(1) gap above 1/a_max
  CHECK(std::abs(rep.energy_along_first - 1.0) < 0.01);
  CHECK(std::abs(rep.hat_energy_along_first - 1.0) < 0.01);
  CHECK(rep.hat_energy_along_first > 1.0 / 3.0 + 0.5);
  // and symmetrically for the second structure
  CHECK(std::abs(rep.energy_along_second - 3.0) < 0.03);
  CHECK(rep.energy_along_second > 1.0 + 1.5);
  CHECK(std::abs(rep.hat_energy_along_second - 1.0 / 3.0) < 0.01);
}

TEST_CASE("constant coefficient collapses both structures") {
  auto rep = demo_two_structures([](double) { return 2.0; }, {0.05});
  CHECK(rep.a_min == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rep.a_max == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(rep.entries[0].min_ratio ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
  CHECK(rep.entries[0].max_ratio ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-6));
  CHECK(rep.energy_along_first == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(rep.hat_energy_along_second == doctest::Approx(0.5).epsilon(1e-9));
}
