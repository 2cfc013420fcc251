#include <cmath>

#include "doctest.h"
#include "frontlab/comparison.hpp"
#include "frontlab/errors.hpp"
#include "oracles.hpp"

using namespace frontlab;

namespace {

// Admissibility conditions of the subsolution construction, restated from the
// closed forms. All must hold for the selection to be usable.
bool sub_conditions_hold(const SubsolutionSelection& s) {
  const int n = s.p.n;
  const double m = s.p.m;
  const double Rn = std::pow(s.p.R, n);
  const double r1n = std::pow(s.r1, n);
  const double span = Rn - r1n;
  const double cc = oracle::c_crit(n, s.p.R, m, s.mu, s.r1);
  bool ok = s.A_sub > 0.0 && s.A_sub < cc && s.kappa > 0.0 && s.lambda > 0.0 && s.lambda < 1.0;
  ok = ok && s.eps0 > 0.0 && s.eps0 < 1.0 && s.r_min > 0.0 && s.r_min < s.r1;
  const double rhs = (m - 1.0) * s.kappa / (m * (s.kappa + 1.0)) *
                     std::pow((1.0 - s.lambda) * s.mu * span * (m - 1.0) /
                                  (std::pow(s.r1, 2.0 * n - 2.0) * n * n),
                              1.0 / (m - 1.0));
  ok = ok && s.A_sub <= rhs;
  ok = ok && 2.0 * s.eps0 * s.kappa < s.lambda * s.mu;
  const double inner = s.lambda * s.mu / 2.0 * span - s.theta_max - s.eps0 * s.kappa * span;
  ok = ok && inner > 0.0;
  ok = ok && r1n - std::pow(s.r_min, n) <= std::pow(inner / s.A_sub, (m - 1.0) / m);
  // eta over a fine eps ladder up to eps0.
  for (int k = 1; k <= 200; ++k) {
    const double e = s.eps0 * k / 200.0;
    const double delta = std::pow(e * s.kappa * (m - 1.0) / (s.A_sub * m), m - 1.0);
    const double eta = -s.A_sub * std::pow(delta, m / (m - 1.0)) + e * s.kappa * (span + delta);
    ok = ok && eta >= 0.0 && eta <= s.lambda * s.mu / 2.0 * span;
  }
  const double r2n = std::pow(s.r2, n);
  ok = ok && s.r2 > s.r1 && s.r2 <= s.p.R && r2n == doctest::Approx((r1n + Rn) / 2.0);
  ok = ok && s.theta > 0.0 && s.theta <= s.theta_max &&
       s.theta <= (s.mu - 2.0 * s.eps0 * s.kappa) * (Rn - r2n);
  return ok;
}

bool super_conditions_hold(const SupersolutionSelection& s) {
  const int n = s.p.n;
  const double m = s.p.m;
  const double Rn = std::pow(s.p.R, n);
  const double cc = oracle::c_crit(n, s.p.R, m, s.mu, s.r1);
  bool ok = s.A_sup > cc && s.theta > 0.0 && s.r_min > 0.0 && s.r_min < s.r1;
  // The coefficient floor must hold for every r0 in [r_min, r1); sample it.
  for (int k = 0; k < 100; ++k) {
    const double r0 = s.r_min + (s.r1 - s.r_min) * k / 100.0;
    const double floor = (m - 1.0) / m *
                         std::pow((s.mu * Rn - s.mu * std::pow(r0, n) + 2.0 * s.theta) * (m - 1.0) /
                                      (std::pow(r0, 2.0 * n - 2.0) * n * n),
                                  1.0 / (m - 1.0));
    ok = ok && s.A_sup >= floor;
  }
  ok = ok && s.eps0 == doctest::Approx(std::min(0.5, s.theta / Rn));
  ok = ok && s.T_bar == doctest::Approx((Rn - std::pow(s.r1, n)) / s.theta);
  return ok;
}

// Central finite differences of the family's value, for comparing with its jet.
FamilyJet numeric_jet(const ComparisonFamily& f, double s, double t, double h) {
  FamilyJet j;
  j.w = f.value(s, t);
  j.w_s = (f.value(s + h, t) - f.value(s - h, t)) / (2.0 * h);
  j.w_ss = (f.value(s + h, t) - 2.0 * j.w + f.value(s - h, t)) / (h * h);
  j.w_t = (f.value(s, t + h) - f.value(s, std::max(0.0, t - h))) / (t > h ? 2.0 * h : h + t);
  return j;
}

}  // namespace

TEST_CASE("subsolution selection on the worked case") {
  ModelParams p{1, 1.0, 2.0};
  const auto sel = select_subsolution_params(p, 1.0, 0.5, 0.125);
  CHECK(sel.lambda == doctest::Approx(1.0 - std::sqrt(0.5)));
  CHECK(sel.kappa == doctest::Approx(2.0 * std::sqrt(0.5) / (1.0 - std::sqrt(0.5))));
  CHECK(sub_conditions_hold(sel));
  for (const auto& pr : subsolution_predicates(sel)) CHECK_MESSAGE(pr.holds, pr.name);
  CHECK_THROWS_AS(select_subsolution_params(p, 1.0, 0.5, 0.25), ThresholdError);
  CHECK_THROWS_AS(select_subsolution_params(p, 1.0, 0.5, 0.3), ThresholdError);
}

TEST_CASE("subsolution selection for a vanishing coefficient uses the kappa floor") {
  ModelParams p{1, 1.0, 2.0};
  const auto sel = select_subsolution_params(p, 1.0, 0.5, 1e-9);
  CHECK(sel.kappa >= 1e-3);
  CHECK(sub_conditions_hold(sel));
}

TEST_CASE("supersolution selection on the worked case") {
  ModelParams p{1, 1.0, 2.0};
  const auto sel = select_supersolution_params(p, 1.0, 0.5, 0.5);
  CHECK(0.5 >= 0.5 * (1.0 - sel.r_min + 2.0 * sel.theta));
  CHECK(super_conditions_hold(sel));
  CHECK(sel.theta * sel.T_bar == doctest::Approx(0.5).epsilon(1e-15));
  for (const auto& pr : supersolution_predicates(sel)) CHECK_MESSAGE(pr.holds, pr.name);
  CHECK_THROWS_AS(select_supersolution_params(p, 1.0, 0.5, 0.25), ThresholdError);
}

TEST_CASE("family values at distinguished points") {
  ModelParams p{1, 1.0, 2.0};
  const auto sub = select_subsolution_params(p, 1.0, 0.5, 0.125);
  const double eps = 0.5 * sub.eps0;
  const auto stat = build_subsolution(sub, eps, sub.r_min, 0.0);
  CHECK(stat.value(1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(stat.value(0.9, 0.0) == doctest::Approx(1.0 - eps * stat.kappa * 0.1));

  const auto sup_sel = select_supersolution_params(p, 1.0, 0.5, 0.5);
  const auto sup = build_supersolution(sup_sel, 0.5 * sup_sel.eps0, sup_sel.r_min);
  const double out = 1.0 + sup.delta * sup.eps / 2.0;
  CHECK(sup.value(0.99, 0.0) == doctest::Approx(out).epsilon(1e-15));
  CHECK(sup.value(0.99, 0.0) > 1.0);
  const auto mid = sup.mid_piece(sup.kink(0.1), 0.1);
  CHECK(std::abs(mid.w_s) <= 1e-12);
  CHECK_THROWS_AS(sup.jet(sup.kink(0.1), 0.1), KinkError);
}

TEST_CASE("families converge to the prototype as eps vanishes") {
  ModelParams p{2, 1.0, 2.5};
  const double mu = 1.3;
  const double r1 = 0.5;
  const double cc = c_crit(p, mu, r1);
  const auto sub = select_subsolution_params(p, mu, r1, 0.5 * cc);
  const auto sup = select_supersolution_params(p, mu, r1, 2.0 * cc);
  const double t = 0.01;
  for (double s : {0.2, 0.23}) {
    const double base = mu - sub.A_sub * std::pow(0.25 - sub.theta * t - s, p.m / (p.m - 1.0));
    const double up = mu - sup.A_sup * std::pow(0.25 + sup.theta * t - s, p.m / (p.m - 1.0));
    double prev_lo = 1.0;
    double prev_up = 1.0;
    for (double f : {1e-2, 1e-4, 1e-6}) {
      const double lo_gap = std::abs(build_subsolution(sub, f * sub.eps0, sub.r_min, sub.theta).value(s, t) - base);
      const double up_gap = std::abs(build_supersolution(sup, f * sup.eps0, sup.r_min).value(s, t) - up);
      CHECK(lo_gap < prev_lo);
      CHECK(up_gap < prev_up);
      prev_lo = lo_gap;
      prev_up = up_gap;
    }
    CHECK(prev_lo < 1e-5);
    CHECK(prev_up < 1e-5);
  }
}

TEST_CASE("limit envelope") {
  EnvelopeParams env{TailDirection::Shrink, 1.0, 0.25, 0.25, 0.1, 2.0};
  CHECK(limit_envelope(env, 1.0, 0.05) == doctest::Approx(0.9975));
  CHECK(limit_envelope(env, 1.0, 0.2) == 1.0);
  env.theta = 0.0;
  CHECK(limit_envelope(env, 3.0, 0.25) == 1.0);
  EnvelopeParams up{TailDirection::Expand, 1.0, 0.25, 0.25, 0.1, 2.0};
  CHECK(limit_envelope(up, 1.0, 0.05) == doctest::Approx(1.0 - 0.25 * 0.3 * 0.3));
}

TEST_CASE("property: selections satisfy the restated conditions") {
  oracle::Gen g(31);
  for (int k = 0; k < 200; ++k) {
    ModelParams p{g.integer(1, 3), g.real(0.7, 1.5), g.real(1.1, 4.0)};
    const double mu = g.real(0.2, 3.0);
    const double r1 = p.R * g.real(0.2, 0.9);
    const double cc = c_crit(p, mu, r1);
    const auto sub = select_subsolution_params(p, mu, r1, cc * g.real(0.01, 0.99));
    CHECK(sub_conditions_hold(sub));
    const auto sup = select_supersolution_params(p, mu, r1, cc * g.real(1.01, 5.0));
    CHECK(super_conditions_hold(sup));
  }
}

TEST_CASE("property: jets agree with finite differences and pieces match at the kink") {
  oracle::Gen g(32);
  for (int k = 0; k < 100; ++k) {
    ModelParams p{g.integer(1, 3), 1.0, g.real(1.3, 3.0)};
    const double mu = g.real(0.5, 2.0);
    const double r1 = g.real(0.3, 0.7);
    const double cc = c_crit(p, mu, r1);
    const auto sub_sel = select_subsolution_params(p, mu, r1, cc * g.real(0.1, 0.9));
    const auto sup_sel = select_supersolution_params(p, mu, r1, cc * g.real(1.2, 3.0));
    const auto sub = build_subsolution(sub_sel, sub_sel.eps0 * g.real(0.1, 0.9), sub_sel.r_min,
                                       sub_sel.theta);
    const auto sup = build_supersolution(sup_sel, sup_sel.eps0 * g.real(0.1, 0.9), sup_sel.r_min);
    for (const ComparisonFamily* f : {&sub, &sup}) {
      const double t = g.real(0.0, 0.2) * std::min(1.0, f->horizon);
      const double kink = f->kink(t);
      const auto a = f->mid_piece(kink, t);
      const auto b = f->out_piece(kink, t);
      CHECK(a.w == doctest::Approx(b.w).epsilon(1e-12));
      CHECK(std::abs(a.w_s - b.w_s) <= 1e-12 * std::max(1.0, std::abs(a.w_s)));

      // Large eps can push the kink left of the domain; nothing curved is left then.
      if (kink <= f->s_lo) continue;
      const double s = f->s_lo + (kink - f->s_lo) * g.real(0.1, 0.9);
      const double h = 1e-3 * (kink - f->s_lo);
      const auto an = f->jet(s, t);
      const auto num = numeric_jet(*f, s, std::max(t, 2.0 * h), h);
      const auto an2 = f->jet(s, std::max(t, 2.0 * h));
      CHECK(an2.w_s == doctest::Approx(num.w_s).epsilon(1e-6));
      CHECK(an2.w_ss == doctest::Approx(num.w_ss).epsilon(1e-3));
      CHECK(an2.w_t == doctest::Approx(num.w_t).epsilon(1e-5).scale(an2.w_s));
      CHECK(an.w_s > 0.0);
    }
  }
}

TEST_CASE("shrink and expand procedures") {
  ModelParams p{1, 1.0, 2.0};
  const auto sh = plan_shrink(p, 1.0, 0.5, 0.125, 0.1);
  CHECK(sh.factor * sh.C < 0.25);
  CHECK(sh.factor > 1.0);
  CHECK(sh.r_star >= sh.sel.r_min);
  CHECK(sh.T_cap > 0.0);
  CHECK(sh.eps1 <= sh.sel.eps0);
  CHECK(sh.left_boundary_bound() ==
        doctest::Approx(1.0 - 0.5 * (sh.factor + 1.0) * 0.125 * std::pow(0.5 - sh.r_star, 2.0)));
  const auto env = sh.envelope();
  CHECK(env.coef == doctest::Approx(sh.factor * 0.125));
  CHECK_THROWS_AS(plan_shrink(p, 1.0, 0.5, 0.3, 0.1), ThresholdError);

  const auto ex = plan_expand(p, 1.0, 0.5, 0.5, 0.1);
  CHECK(ex.sel.A_sup > 0.25);
  CHECK(ex.sel.A_sup < 0.5);
  CHECK(ex.T_cap <= ex.sel.T_bar);
  CHECK_THROWS_AS(plan_expand(p, 1.0, 0.5, 0.2, 0.1), ThresholdError);
}
