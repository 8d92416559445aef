#include <doctest.h>

#include <cmath>
#include <random>

#include "gtppo/orbital/elements.hpp"

using namespace gtppo::orbital;
using gtppo::dynamics::cross;
using gtppo::dynamics::dot;
using gtppo::dynamics::norm;

namespace {
constexpr double kMu = 3.986e14;
}

TEST_CASE("circular equatorial and polar orbits") {
  const double R = 7.0e6;
  const double vc = std::sqrt(kMu / R);
  auto eq = state_to_elements({R, 0, 0}, {0, vc, 0}, kMu);
  REQUIRE(eq.ok());
  CHECK(eq.elements.a == doctest::Approx(R).epsilon(1e-12));
  CHECK(eq.elements.e < 1e-12);
  CHECK(eq.elements.i == 0.0);
  CHECK(eq.elements.raan == 0.0);
  CHECK(eq.elements.argp == 0.0);

  auto polar = state_to_elements({R, 0, 0}, {0, 0, vc}, kMu);
  REQUIRE(polar.ok());
  CHECK(polar.elements.i == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(polar.elements.e < 1e-12);
}

TEST_CASE("hyperbolic and rectilinear states are flagged") {
  const double R = 7.0e6;
  CHECK(state_to_elements({R, 0, 0}, {0, 2 * std::sqrt(kMu / R), 0}, kMu).status == ElementStatus::hyperbolic);
  CHECK(state_to_elements({R, 0, 0}, {100, 0, 0}, kMu).status == ElementStatus::degenerate);
}

TEST_CASE("elements round-trip through Cartesian state") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(6.6e6, 5e7), ue(0.01, 0.95), ui(1 * kDeg, 179 * kDeg),
      uang(0.0, 2 * M_PI);
  double worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    OrbitalElements el{ua(rng), ue(rng), ui(rng), uang(rng), uang(rng)};
    const double nu = uang(rng);
    const auto s = elements_to_state(el, nu, kMu);
    const auto back = state_to_elements(s.r, s.v, kMu);
    REQUIRE(back.ok());
    auto rel = [](double x, double y) { return std::fabs(x - y) / std::max(std::fabs(y), 1.0); };
    worst = std::max({worst, rel(back.elements.a, el.a) , rel(back.elements.e, el.e), rel(back.elements.i, el.i),
                      angle_difference(back.elements.raan, el.raan) / std::max(el.raan, 1.0),
                      angle_difference(back.elements.argp, el.argp) / std::max(el.argp, 1.0),
                      angle_difference(back.true_anomaly, nu) / std::max(nu, 1.0)});
    const double he = std::fabs(dot(back.h, back.e_vec));
    CHECK(he <= 1e-10 * norm(back.h) * norm(back.e_vec));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("element errors") {
  TargetOrbit tgt;
  auto zero = element_errors(tgt, tgt);
  CHECK(zero.a == 0.0);
  CHECK(zero.e == 0.0);
  CHECK(zero.i == 0.0);
  CHECK(zero.raan == 0.0);
  CHECK(zero.argp == 0.0);
  OrbitalElements el = tgt;
  el.a = 1.018 * tgt.a;
  CHECK(element_errors(el, tgt).a == doctest::Approx(0.018).epsilon(1e-12));
  OrbitalElements x{1, 0.1, 0, 359 * kDeg, 0}, y{1, 0.1, 0, 1 * kDeg, 0};
  CHECK(element_errors(x, y).raan == doctest::Approx(2 * kDeg).epsilon(1e-12));
  CHECK(angle_difference(0.0, 2 * M_PI) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("target orbit defaults") {
  TargetOrbit t;
  CHECK(t.a == 24361140.0);
  CHECK(t.e == 0.7308);
  CHECK(t.i == doctest::Approx(28.5 * M_PI / 180));
  CHECK(t.raan == doctest::Approx(269.8 * M_PI / 180));
  CHECK(t.argp == doctest::Approx(130.5 * M_PI / 180));
}
