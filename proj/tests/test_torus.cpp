#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lattice3b/torus.hpp"

using namespace lattice3b;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("wrap reduces to (-pi,pi]") {
  const TorusVec a = wrap(1.5 * kPi, 0.0, 0.0);
  CHECK(a.c1 == doctest::Approx(-0.5 * kPi).epsilon(1e-14));

  const TorusVec b = wrap(kPi, kPi, kPi);
  CHECK(b.c1 == kPi);
  CHECK(b.c2 == kPi);
  CHECK(b.c3 == kPi);

  // the (-pi,pi] convention sends -pi to +pi
  const TorusVec c = wrap(-kPi, 0.0, 0.0);
  CHECK(c.c1 == kPi);

  CHECK_THROWS_AS(wrap(std::nan(""), 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(wrap(std::numeric_limits<double>::infinity(), 0, 0),
                  std::domain_error);
}

TEST_CASE("wrap idempotence and group laws") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-25.0, 25.0);
  for (int it = 0; it < 1000; ++it) {
    const double x = u(rng), y = u(rng), z = u(rng);
    const TorusVec w1 = wrap(x, y, z);
    const TorusVec w2 = wrap(w1.c1, w1.c2, w1.c3);
    CHECK(w1 == w2);

    const TorusVec a = wrap(u(rng), u(rng), u(rng));
    const TorusVec b = wrap(u(rng), u(rng), u(rng));
    const TorusVec direct = wrap(a.c1 + b.c1, a.c2 + b.c2, a.c3 + b.c3);
    const TorusVec grouped = a + b;
    CHECK(direct.c1 == doctest::Approx(grouped.c1).epsilon(1e-13));
    CHECK(direct.c2 == doctest::Approx(grouped.c2).epsilon(1e-13));
    CHECK(direct.c3 == doctest::Approx(grouped.c3).epsilon(1e-13));
  }
}

TEST_CASE("dispersion values and bounds") {
  CHECK(dispersion({}) == 0.0);
  CHECK(dispersion(wrap(kPi, kPi, kPi)) == doctest::Approx(6.0).epsilon(1e-15));

  // quadratic behaviour at small momentum
  const TorusVec p = wrap(6e-4, -8e-4, 0.0);
  const double p2 = p.c1 * p.c1 + p.c2 * p.c2 + p.c3 * p.c3;
  CHECK(dispersion(p) == doctest::Approx(0.5 * p2).epsilon(1e-5));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int it = 0; it < 1000; ++it) {
    const TorusVec q = wrap(u(rng), u(rng), u(rng));
    const double e = dispersion(q);
    CHECK(e >= 0.0);
    CHECK(e <= 6.0);
    CHECK(dispersion(-q) == doctest::Approx(e).epsilon(1e-15));
  }
}

TEST_CASE("hopping coefficients reproduce the dispersion transform") {
  const auto table = hopping_coefficients(2);
  CHECK(table.at({0, 0, 0}) == doctest::Approx(3.0).epsilon(1e-12));
  for (const LatticeSite s : {LatticeSite{1, 0, 0}, LatticeSite{0, -1, 0},
                              LatticeSite{0, 0, 1}})
    CHECK(table.at(s) == doctest::Approx(-0.5).epsilon(1e-12));
  for (const LatticeSite s : {LatticeSite{1, 1, 0}, LatticeSite{2, 0, 0},
                              LatticeSite{1, 1, 1}, LatticeSite{2, 1, 2}})
    CHECK(std::abs(table.at(s)) < 1e-12);
}
