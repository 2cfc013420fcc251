#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "doctest.h"
#include "frontlab/errors.hpp"
#include "frontlab/profiles.hpp"
#include "oracles.hpp"

using namespace frontlab;

namespace {

// tanh-sinh copes with the endpoint singularities of fractional tails.
double quadrature_mass(int n, const RadialProfile& prof, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate([&](double r) { return n * std::pow(r, n - 1) * prof(r); }, a, b);
}

}  // namespace

TEST_CASE("profile values and mass on the worked example") {
  ModelParams p{1, 1.0, 2.0};
  const auto prof = make_profile(p, 1.0, 0.3, 1.0, 1.0, 0.3, 0.5);
  CHECK(prof(0.4) == doctest::Approx(0.1));
  CHECK(prof(0.6) == 0.0);
  CHECK(mass(p, prof) == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(calibrate_plateau(p, 2.0, 1.0, 1.0, 0.3, 0.3, 0.5) ==
        doctest::Approx((2.0 - 0.04) / 0.6).epsilon(1e-14));
}

TEST_CASE("zero and constant profiles") {
  ModelParams p{2, 1.5, 2.0};
  const auto zero = make_profile(p, 0.0, 0.2, 0.0, 1.0, 0.4, 0.6);
  CHECK(mass(p, zero) == 0.0);
  const auto w = transform_to_w(p, zero, uniform_s_grid(p, 64));
  CHECK(std::all_of(w.values.begin(), w.values.end(), [](double v) { return v == 0.0; }));

  const auto c = constant_profile(p, 0.7);
  CHECK(mass(p, c) == doctest::Approx(0.7 * p.volume()));
  const auto wc = transform_to_w(p, c, uniform_s_grid(p, 64));
  for (std::size_t i = 0; i < wc.size(); ++i)
    CHECK(wc.values[i] == doctest::Approx(0.7 * wc.s[i]).epsilon(1e-14));
}

TEST_CASE("calibration edge cases") {
  ModelParams p{1, 1.0, 2.0};
  // No tail and no ramp: B is the mass over the plateau volume.
  const double B = calibrate_plateau(p, 2.0, 0.0, 1.0, 0.3, 0.3, 0.5);
  CHECK(B == doctest::Approx(2.0 / 0.6));
  const double tail_only = mass(p, make_profile(p, 0.0, 0.3, 1.0, 1.0, 0.3, 0.5));
  CHECK(calibrate_plateau(p, tail_only, 1.0, 1.0, 0.3, 0.3, 0.5) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(calibrate_plateau(p, 0.5 * tail_only, 1.0, 1.0, 0.3, 0.3, 0.5), InfeasibleError);
}

TEST_CASE("transform of a step density") {
  ModelParams p{1, 1.0, 2.0};
  const auto prof = make_profile(p, 1.0, 0.5, 0.0, 1.0, 0.5, 0.5 + 1e-12);
  const auto w = transform_to_w(p, prof, uniform_s_grid(p, 16));
  for (std::size_t i = 0; i < w.size(); ++i)
    CHECK(w.values[i] == doctest::Approx(std::min(w.s[i], 0.5)).epsilon(1e-12));
  const auto u = derivative_to_u(w, 1);
  for (const auto& x : u) CHECK(x.u == doctest::Approx(x.r < 0.5 ? 1.0 : 0.0).epsilon(1e-10));
}

TEST_CASE("difference quotient recovers the density to first order") {
  ModelParams p{1, 1.0, 2.0};
  const auto prof = make_profile(p, 1.0, 0.3, 1.0, 1.0, 0.3, 0.5);
  double prev = 0.0;
  for (std::size_t cells : {256u, 512u, 1024u}) {
    const auto w = transform_to_w(p, prof, uniform_s_grid(p, cells));
    double err = 0.0;
    for (const auto& x : derivative_to_u(w, 1))
      if (std::abs(x.r - 0.3) > 2.0 / cells && std::abs(x.r - 0.5) > 2.0 / cells)
        err = std::max(err, std::abs(x.u - prof(x.r)));
    CHECK(err <= 1.0 / cells);
    if (prev > 0.0) CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("initial bound checks on the exact quadratic tail") {
  // n = 1, m = 2, A = 1, alpha = 1: w0 = mu R - (1/2)(r1 - s)^2 on the tail.
  ModelParams p{1, 1.0, 2.0};
  const auto prof = make_profile(p, 1.0, 0.1, 1.0, 1.0, 0.1, 0.5);
  const auto w = transform_to_w(p, prof, uniform_s_grid(p, 1000));
  CHECK(check_initial_bound(p, w, 0.5, 0.1, 0.5, BoundKind::Lower).pass);
  CHECK(check_initial_bound(p, w, 0.5, 0.1, 0.5, BoundKind::Upper).pass);
  const auto bad = check_initial_bound(p, w, 0.4, 0.1, 0.5, BoundKind::Lower);
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_s < 0.12);

  GridFunction full = w;
  std::fill(full.values.begin() + 1, full.values.end(), full.mu_Rn);
  CHECK(check_initial_bound(p, full, 0.0, 0.1, 0.5, BoundKind::Lower).pass);
  CHECK(check_initial_bound(p, full, 7.0, 0.1, 0.5, BoundKind::Lower).pass);
}

TEST_CASE("steeper tails satisfy the lower bound close to r1") {
  ModelParams p{2, 1.0, 2.0};
  const double r1 = 0.6;
  const auto prof = make_profile(p, 1.0, 0.2, 1.0, 1.5, 0.3, r1);
  const auto w = transform_to_w(p, prof, uniform_s_grid(p, 1 << 16));
  const double r0 = 0.5995;
  const double C = tail_to_mass_coefficient(p, 0.05, r0, r1, TailDirection::Shrink);
  CHECK(check_initial_bound(p, w, C, r0, r1, BoundKind::Lower).pass);
}

TEST_CASE("property: closed-form mass agrees with quadrature and pins the right end") {
  oracle::Gen g(21);
  for (int k = 0; k < 60; ++k) {
    ModelParams p{g.integer(1, 3), g.real(0.8, 1.5), g.real(1.2, 3.5)};
    const double r1 = p.R * g.real(0.3, 0.9);
    const double r0 = r1 * g.real(0.3, 0.95);
    const double rp = r0 * g.real(0.1, 1.0);
    const double A = g.real(0.0, 3.0);
    const double alpha = g.real(0.3, 3.0);
    const double B = g.real(0.0, 5.0);
    const auto prof = make_profile(p, B, rp, A, alpha, r0, r1);
    const double exact = mass(p, prof);
    double quad = 0.0;
    for (auto [a, b] : {std::pair{0.0, rp}, {rp, r0}, {r0, r1}})
      if (b > a) quad += quadrature_mass(p.n, prof, a, b);
    quad *= oracle::omega(p.n);
    CHECK(exact == doctest::Approx(quad).epsilon(1e-10));

    const auto w = transform_to_w(p, prof, uniform_s_grid(p, 257));
    const double mu = exact / p.volume();
    CHECK(w.values.back() == doctest::Approx(mu * p.R_n()).epsilon(1e-10));
    CHECK(w.values.front() == 0.0);
    for (std::size_t i = 1; i < w.size(); ++i) CHECK(w.values[i] >= w.values[i - 1]);

    const double target = exact + g.real(0.0, 3.0);
    const double Bc = calibrate_plateau(p, target, A, alpha, rp, r0, r1);
    CHECK(mass(p, make_profile(p, Bc, rp, A, alpha, r0, r1)) ==
          doctest::Approx(target).epsilon(1e-10));
  }
}

TEST_CASE("property: pure plateau transforms are exact") {
  oracle::Gen g(22);
  for (int k = 0; k < 40; ++k) {
    ModelParams p{g.integer(1, 3), 1.0, 2.0};
    const double c = g.real(0.1, 4.0);
    const auto w = transform_to_w(p, constant_profile(p, c), uniform_s_grid(p, 128));
    for (std::size_t i = 0; i < w.size(); ++i)
      CHECK(std::abs(w.values[i] - c * w.s[i]) <= 4e-16 * c);
  }
}

TEST_CASE("property: exact tails satisfy the mapped bounds in both directions") {
  oracle::Gen g(23);
  for (int k = 0; k < 30; ++k) {
    ModelParams p{g.integer(1, 3), 1.0, g.real(1.5, 4.0)};
    const double r1 = g.real(0.4, 0.9);
    const double r0 = r1 * g.real(0.5, 0.98);
    const double A = g.real(0.5, 3.0);
    const auto prof = make_profile(p, 1.0, 0.5 * r0, A, 1.0 / (p.m - 1.0), r0, r1);
    const auto w = transform_to_w(p, prof, uniform_s_grid(p, 4096));
    const double lo = oracle::c_shrink(p.n, p.m, A, r0, r1);
    const double up = oracle::c_expand(p.n, p.m, A, r0, r1);
    CHECK(check_initial_bound(p, w, lo, r0, r1, BoundKind::Lower).pass);
    CHECK(check_initial_bound(p, w, up, r0, r1, BoundKind::Upper).pass);
  }
}
