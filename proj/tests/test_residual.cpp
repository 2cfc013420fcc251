#include <array>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "frontlab/comparison.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/profiles.hpp"
#include "frontlab/residual.hpp"
#include "oracles.hpp"

using namespace frontlab;

namespace {

struct Derivs {
  double w, w_s, w_ss, w_t;
};

// Derivatives of the two families written out from their definitions.
Derivs family_derivs(const ComparisonFamily& f, double s, double t) {
  const double m = f.p.m;
  const double Rn = std::pow(f.p.R, f.p.n);
  const double r1n = std::pow(f.r1, f.p.n);
  const bool sub = f.kind == FamilyKind::Subsolution;
  const double rho = sub ? r1n - f.theta * t : r1n + f.theta * t;
  const double x = rho - s;
  if (sub) {
    if (s < rho - f.delta) {
      const double ws = f.A_coef * m / (m - 1.0) * std::pow(x, 1.0 / (m - 1.0));
      return {f.mu * Rn - f.eta - f.A_coef * std::pow(x, m / (m - 1.0)) - f.vertical_shift, ws,
              -f.A_coef * m / ((m - 1.0) * (m - 1.0)) * std::pow(x, 1.0 / (m - 1.0) - 1.0),
              f.theta * ws};
    }
    const double ek = f.eps * f.kappa;
    return {f.mu * Rn - ek * (Rn - f.theta * t - s) - f.vertical_shift, ek, 0.0, ek * f.theta};
  }
  if (s < rho - f.delta) {
    const double ws = f.A_coef * m / (m - 1.0) * std::pow(x, 1.0 / (m - 1.0)) - f.eps;
    return {f.mu * Rn - f.A_coef * std::pow(x, m / (m - 1.0)) + f.eps * x, ws,
            -f.A_coef * m / ((m - 1.0) * (m - 1.0)) * std::pow(x, 1.0 / (m - 1.0) - 1.0),
            -f.theta * ws};
  }
  return {f.mu * Rn + f.delta * f.eps / m, 0.0, 0.0, 0.0};
}

GridFunction linear_grid(const ModelParams& p, double mu, std::size_t cells) {
  GridFunction g;
  g.s = uniform_s_grid(p, cells);
  g.mu_Rn = mu * p.R_n();
  for (double s : g.s) g.values.push_back(mu * s);
  g.values.back() = g.mu_Rn;
  return g;
}

}  // namespace

TEST_CASE("pointwise residual on worked states") {
  const OperatorInput in{0.1, ModelParams{1, 1.0, 2.0}, 1.0};
  CHECK(p_eps_pointwise(in, 0.2, 1.0, -2.0, 0.0, 0.25) == doctest::Approx(2.25).epsilon(1e-15));
  CHECK(p_eps_pointwise(in, 0.7, 0.0, 0.0, 0.0, 0.4) == 0.0);
  CHECK(p_eps_pointwise(in, 0.4, 1.0, 0.0, 0.0, 0.4) == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS_AS(p_eps_pointwise(in, 0.2, -0.1, 0.0, 0.0, 0.3), DomainError);
  CHECK_THROWS_AS(p_eps_pointwise(in, 0.2, -0.2, 0.0, 0.0, 0.3), DomainError);
}

TEST_CASE("operator input validation") {
  CHECK_THROWS_AS((OperatorInput{0.0, ModelParams{1, 1.0, 2.0}, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((OperatorInput{1.0, ModelParams{1, 1.0, 2.0}, 1.0}.validate()), DomainError);
  CHECK_NOTHROW((OperatorInput{0.5, ModelParams{2, 1.0, 3.0}, 1.0}.validate()));
}

TEST_CASE("residual of the linear extension") {
  ModelParams p{2, 1.0, 2.0};
  const double mu = 1.0;
  const auto sel = select_subsolution_params(p, mu, 0.5, 0.5 * c_crit(p, mu, 0.5));
  const double eps = 0.5 * sel.eps0;
  const auto f = build_subsolution(sel, eps, sel.r_min, sel.theta);
  const OperatorInput in{eps, p, mu};
  const double ek = eps * f.kappa;
  for (double s : {0.5, 0.7, 0.95})
    for (double t : {0.0, 0.01, 0.05}) {
      const double expect = ek * (f.theta - (mu - ek) * (1.0 - s) - ek * f.theta * t);
      CHECK(p_eps_analytic(in, f, s, t) == doctest::Approx(expect).epsilon(1e-12).scale(ek));
    }
  const auto sup = build_supersolution(select_supersolution_params(p, mu, 0.5, 2.0 * c_crit(p, mu, 0.5)),
                                       1e-4, 0.45);
  CHECK(p_eps_analytic(OperatorInput{1e-4, p, mu}, sup, 0.9, 0.001) == 0.0);
}

TEST_CASE("property: residual sign near r1 follows the threshold") {
  oracle::Gen g(41);
  for (int k = 0; k < 200; ++k) {
    const int n = g.integer(1, 3);
    const double m = g.real(1.2, 3.5);
    const double mu = g.real(0.3, 2.0);
    const double r1 = g.real(0.2, 0.8);
    const double cc = oracle::c_crit(n, 1.0, m, mu, r1);
    const double C = cc * (g.integer(0, 1) ? g.real(0.2, 0.8) : g.real(1.25, 4.0));
    const double r1n = std::pow(r1, n);
    const double x = 1e-6;
    const double s = r1n - x;
    const double ws = C * m / (m - 1.0) * std::pow(x, 1.0 / (m - 1.0));
    const double wss = -C * m / ((m - 1.0) * (m - 1.0)) * std::pow(x, 1.0 / (m - 1.0) - 1.0);
    const double w = mu - C * std::pow(x, m / (m - 1.0));
    // eps far below the slope so that the limit sign is visible.
    const OperatorInput in{1e-9 * ws, ModelParams{n, 1.0, m}, mu};
    const double res = p_eps_pointwise(in, w, ws, wss, 0.0, s);
    const double sign_term =
        n * n * std::pow(r1, 2.0 * n - 2.0) * std::pow(C * m, m - 1.0) / std::pow(m - 1.0, m) -
        mu * (1.0 - r1n);
    CHECK((res > 0.0) == (sign_term > 0.0));
  }
}

TEST_CASE("property: analytic residual equals pointwise residual of hand derivatives") {
  oracle::Gen g(42);
  int checked = 0;
  while (checked < 10000) {
    ModelParams p{g.integer(1, 3), g.real(0.8, 1.3), g.real(1.2, 3.5)};
    const double mu = g.real(0.3, 2.0);
    const double r1 = p.R * g.real(0.3, 0.8);
    const double cc = c_crit(p, mu, r1);
    const bool sub = g.integer(0, 1);
    ComparisonFamily f;
    double eps;
    if (sub) {
      const auto sel = select_subsolution_params(p, mu, r1, cc * g.real(0.05, 0.95));
      eps = sel.eps0 * g.real(0.01, 0.99);
      f = build_subsolution(sel, eps, sel.r_min, sel.theta * g.real(0.0, 1.0),
                            g.real(0.0, 0.1) * eps);
    } else {
      const auto sel = select_supersolution_params(p, mu, r1, cc * g.real(1.05, 4.0));
      eps = sel.eps0 * g.real(0.01, 0.99);
      f = build_supersolution(sel, eps, sel.r_min);
    }
    const OperatorInput in{eps, p, mu};
    for (int j = 0; j < 50; ++j) {
      const double t = g.real(0.0, std::min(1.0, f.horizon));
      const double s = g.real(f.s_lo, f.s_hi);
      if (std::abs(s - f.kink(t)) < 1e-9) continue;
      const auto d = family_derivs(f, s, t);
      const double want = oracle::residual(p.n, p.m, mu, eps, s, d.w, d.w_s, d.w_ss, d.w_t);
      const double got = p_eps_analytic(in, f, s, t);
      const double scale = std::abs(d.w_t) + std::abs(d.w * d.w_s) + std::abs(mu * s * d.w_s) +
                           std::abs(p.n * p.n * std::pow(s, 2.0 - 2.0 / p.n) *
                                    std::pow(d.w_s + eps, p.m - 1.0) * d.w_ss);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(scale, 1e-300));
      ++checked;
    }
  }
}

TEST_CASE("certification of the families") {
  ModelParams p{1, 1.0, 2.0};
  const double mu = 1.0;
  const auto sup_sel = select_supersolution_params(p, mu, 0.5, 0.5);
  const double eps = 0.5 * sup_sel.eps0;
  const auto sup = build_supersolution(sup_sel, eps, sup_sel.r_min);
  const OperatorInput in{eps, p, mu};
  const Region all{sup.s_lo, 1.0, 0.0, sup_sel.T_bar};
  CHECK(certify_sign(in, sup, all, {SignBound::Kind::AtLeast, 0.0}).pass);

  // Subsolution shape with a coefficient above the threshold.
  const auto bad = make_subsolution(p, mu, 0.5, 1.0, 0.0, 0.5, 1e-4, 0.3);
  const OperatorInput in_bad{1e-4, p, mu};
  const auto rep = certify_sign(in_bad, bad, {0.09, 1.0, 0.0, 0.1}, {SignBound::Kind::AtMost, 0.0});
  CHECK_FALSE(rep.pass);
  CHECK(rep.witness_s > 0.09);
  CHECK(rep.witness_s < 0.5);
  CHECK(p_eps_analytic(in_bad, bad, rep.witness_s, rep.witness_t) > 0.0);

  const auto empty = certify_sign(in_bad, bad, {0.3, 0.3, 0.0, 0.1}, {SignBound::Kind::AtMost, 0.0});
  CHECK(empty.pass);
}

TEST_CASE("discrete residual stencils") {
  ModelParams p{1, 1.0, 2.0};
  const OperatorInput in{0.1, p, 1.0};
  const auto g = linear_grid(p, 1.0, 16);
  for (double r : p_eps_discrete(in, g, g, 0.01)) CHECK(std::abs(r) <= 1e-14);
  for (double r : p_eps_discrete(in, g, g, 0.01, Stencil::Scheme)) CHECK(std::abs(r) <= 1e-14);

  auto bumped = g;
  bumped.values[8] += 1e-3;
  const auto res = p_eps_discrete(in, bumped, bumped, 0.01);
  for (std::size_t i = 0; i < res.size(); ++i) {
    const std::size_t node = i + 1;
    if (node < 7 || node > 9) CHECK(std::abs(res[i]) <= 1e-14);
    else CHECK(std::abs(res[i]) > 1e-6);
  }
  CHECK_THROWS_AS(p_eps_discrete(in, g, g, 0.0), DomainError);
  CHECK_THROWS_AS(p_eps_discrete(in, g, linear_grid(p, 1.0, 8), 0.01), DomainError);
}

TEST_CASE("discrete residual of a manufactured solution converges") {
  // w = mu s + (t + t^2) g(s) with a smooth bump g supported in (0.2, 0.8).
  ModelParams p{1, 1.0, 2.0};
  const double mu = 1.0;
  const OperatorInput in{0.1, p, mu};
  const auto bump = [](double s) {
    if (s <= 0.2 || s >= 0.8) return std::array<double, 3>{0.0, 0.0, 0.0};
    const double a = 0.05;
    const double x = std::numbers::pi * (s - 0.2) / 0.6;
    const double k = std::numbers::pi / 0.6;
    const double sn = std::sin(x);
    // a sin^4: smooth enough for second differences.
    return std::array<double, 3>{a * std::pow(sn, 4), 4.0 * a * k * std::pow(sn, 3) * std::cos(x),
                                 a * k * k * (12.0 * sn * sn * std::cos(x) * std::cos(x) - 4.0 * std::pow(sn, 4))};
  };
  const double t0 = 0.3;
  double prev = 0.0;
  for (std::size_t cells : {64u, 128u, 256u, 512u}) {
    const double dt = 1.0 / cells;
    GridFunction a, b;
    a.s = b.s = uniform_s_grid(p, cells);
    a.mu_Rn = b.mu_Rn = mu;
    for (double s : a.s) {
      a.values.push_back(mu * s + (t0 + t0 * t0) * bump(s)[0]);
      b.values.push_back(mu * s + (t0 + dt + (t0 + dt) * (t0 + dt)) * bump(s)[0]);
    }
    const auto res = p_eps_discrete(in, a, b, dt);
    double err = 0.0;
    for (std::size_t i = 1; i < cells; ++i) {
      const double s = a.s[i];
      const auto gb = bump(s);
      const double c = t0 + t0 * t0;
      const double exact = oracle::residual(1, 2.0, mu, 0.1, s, mu * s + c * gb[0],
                                            mu + c * gb[1], c * gb[2], (1.0 + 2.0 * t0) * gb[0]);
      err = std::max(err, std::abs(res[i - 1] - exact));
    }
    // Between first order (time) and second order (space).
    if (prev > 0.0) {
      CHECK(prev / err > 1.9);
      CHECK(prev / err < 4.5);
    }
    prev = err;
  }
}
