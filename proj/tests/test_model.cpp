#include <cmath>
#include <numbers>

#include "doctest.h"
#include "frontlab/errors.hpp"
#include "frontlab/model.hpp"
#include "oracles.hpp"

using namespace frontlab;

TEST_CASE("threshold amplitude on worked cases") {
  ModelParams p{1, 1.0, 2.0};
  CHECK(a_crit(p, MassData::from_mass(p, 2.0), 0.5) == doctest::Approx(0.5).epsilon(1e-15));

  ModelParams q{2, 1.0, 3.0};
  CHECK(a_crit(q, MassData::from_mass(q, std::numbers::pi), 0.5) ==
        doctest::Approx(std::sqrt(1.5)).epsilon(1e-14));
}

TEST_CASE("threshold amplitude vanishes as r1 approaches R") {
  ModelParams p{1, 1.0, 2.0};
  const auto md = MassData::from_mass(p, 2.0);
  CHECK(a_crit(p, md, 1.0 - 1e-9) < 1e-8);
}

TEST_CASE("threshold coefficient on worked cases") {
  ModelParams p{1, 1.0, 2.0};
  CHECK(c_crit(p, 1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(c_crit(p, 0.0, 0.5) == 0.0);
  const double a = a_crit(p, MassData::from_mass(p, 2.0), 0.5);
  CHECK(tail_to_mass_coefficient(p, a, 0.5, 0.5, TailDirection::Shrink) ==
        doctest::Approx(c_crit(p, 1.0, 0.5)).epsilon(1e-15));
}

TEST_CASE("tail coefficient mapping") {
  ModelParams p{1, 1.0, 2.0};
  CHECK(tail_to_mass_coefficient(p, 1.0, 0.1, 0.5, TailDirection::Shrink) == doctest::Approx(0.5));
  CHECK(tail_to_mass_coefficient(p, 1.0, 0.1, 0.5, TailDirection::Expand) == doctest::Approx(0.5));
  ModelParams q{2, 2.0, 2.0};
  CHECK(tail_to_mass_coefficient(q, 1.0, 1.0, 1.0, TailDirection::Shrink) == doctest::Approx(0.25));
  CHECK(tail_to_mass_coefficient(q, 1.0, 1.0, 1.0, TailDirection::Expand) == doctest::Approx(0.25));
}

TEST_CASE("errors on invalid inputs") {
  ModelParams p{1, 1.0, 2.0};
  const auto md = MassData::from_mass(p, 2.0);
  CHECK_THROWS_AS(a_crit(p, md, 0.0), DomainError);
  CHECK_THROWS_AS(a_crit(p, md, 1.0), DomainError);
  CHECK_THROWS_AS(a_crit(p, MassData::from_mass(p, 0.0), 0.5), DegenerateInputError);
  CHECK_THROWS_AS((ModelParams{0, 1.0, 2.0}.validate()), DomainError);
  CHECK_THROWS_AS((ModelParams{1, 1.0, 1.0}.validate()), DomainError);
}

TEST_CASE("property: thresholds match reference formulas and the identity between them") {
  oracle::Gen g(11);
  for (int k = 0; k < 500; ++k) {
    ModelParams p{g.integer(1, 3), g.real(0.5, 2.0), g.real(1.1, 4.0)};
    const double mass = g.real(0.1, 10.0);
    const double r1 = p.R * g.real(0.05, 0.95);
    const auto md = MassData::from_mass(p, mass);
    CHECK(md.mu == doctest::Approx(mass / (oracle::omega(p.n) * std::pow(p.R, p.n))));
    const double a = a_crit(p, md, r1);
    CHECK(a == doctest::Approx(oracle::a_crit(p.n, p.R, p.m, mass, r1)).epsilon(1e-12));
    const double c = c_crit(p, md.mu, r1);
    CHECK(c == doctest::Approx(oracle::c_crit(p.n, p.R, p.m, md.mu, r1)).epsilon(1e-12));
    const double mapped = tail_to_mass_coefficient(p, a, r1, r1, TailDirection::Shrink);
    CHECK(std::abs(mapped - c) <= 1e-12 * c);

    const double r0 = r1 * g.real(0.2, 0.99);
    const double A = g.real(0.1, 5.0);
    CHECK(tail_to_mass_coefficient(p, A, r0, r1, TailDirection::Shrink) ==
          doctest::Approx(oracle::c_shrink(p.n, p.m, A, r0, r1)).epsilon(1e-12));
    CHECK(tail_to_mass_coefficient(p, A, r0, r1, TailDirection::Expand) ==
          doctest::Approx(oracle::c_expand(p.n, p.m, A, r0, r1)).epsilon(1e-12));
  }
}

TEST_CASE("property: thresholds decrease strictly in r1") {
  oracle::Gen g(12);
  for (int k = 0; k < 200; ++k) {
    ModelParams p{g.integer(1, 3), 1.0, g.real(1.1, 4.0)};
    const auto md = MassData::from_mass(p, g.real(0.5, 5.0));
    const double a = g.real(0.05, 0.9);
    const double b = a + g.real(1e-3, 0.95 - a + 1e-3) * 0.99;
    if (!(b < 1.0)) continue;
    CHECK(a_crit(p, md, a) > a_crit(p, md, b));
    CHECK(c_crit(p, md.mu, a) > c_crit(p, md.mu, b));
  }
}

TEST_CASE("power helper stays finite for m close to 1") {
  CHECK(std::isfinite(detail::pow_inv_m1(3.0, 1.01)));
  CHECK(detail::pow_inv_m1(3.0, 1.01) == doctest::Approx(std::pow(3.0, 100.0)).epsilon(1e-12));
  CHECK(detail::pow_inv_m1(0.0, 1.05) == 0.0);
}
