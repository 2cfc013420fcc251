#include "frontlab/comparison.hpp"

#include <algorithm>
#include <cmath>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

constexpr double kKinkExclusion = 1e-12;
constexpr double kKappaFloor = 1e-3;

double pow_n(const ModelParams& p, double r) { return std::pow(r, p.n); }

double root_n(const ModelParams& p, double s) { return p.n == 1 ? s : std::pow(s, 1.0 / p.n); }

std::string describe_failures(const std::vector<Predicate>& preds) {
  std::string out;
  for (const auto& pr : preds)
    if (!pr.holds) out += " " + pr.name;
  return out;
}

}  // namespace

double ComparisonFamily::rho(double t) const {
  const double r1n = pow_n(p, r1);
  return kind == FamilyKind::Subsolution ? r1n - theta * t : r1n + theta * t;
}

FamilyJet ComparisonFamily::mid_piece(double s, double t) const {
  const double m = p.m;
  const double d = rho(t) - s;
  const double slope = A_coef * m / (m - 1.0) * std::pow(d, 1.0 / (m - 1.0));
  const double curv = -A_coef * m / ((m - 1.0) * (m - 1.0)) * std::pow(d, 1.0 / (m - 1.0) - 1.0);
  const double top = mu * p.R_n();
  FamilyJet j;
  if (kind == FamilyKind::Subsolution) {
    j.w = top - eta - A_coef * std::pow(d, m / (m - 1.0)) - vertical_shift;
    j.w_s = slope;
    j.w_ss = curv;
    j.w_t = theta * slope;
  } else {
    j.w = top - A_coef * std::pow(d, m / (m - 1.0)) + eps * d;
    j.w_s = slope - eps;
    j.w_ss = curv;
    j.w_t = -theta * j.w_s;
  }
  return j;
}

FamilyJet ComparisonFamily::out_piece(double s, double t) const {
  const double top = mu * p.R_n();
  FamilyJet j;
  if (kind == FamilyKind::Subsolution) {
    j.w = top - eps * kappa * (p.R_n() - theta * t - s) - vertical_shift;
    j.w_s = eps * kappa;
    j.w_ss = 0.0;
    j.w_t = eps * kappa * theta;
  } else {
    j.w = top + delta * eps / p.m;
  }
  return j;
}

double ComparisonFamily::value(double s, double t) const {
  return s < kink(t) ? mid_piece(s, t).w : out_piece(s, t).w;
}

FamilyJet ComparisonFamily::jet(double s, double t) const {
  const double k = kink(t);
  if (std::abs(s - k) < kKinkExclusion) throw KinkError("comparison family evaluated at its kink");
  return s < k ? mid_piece(s, t) : out_piece(s, t);
}

double subsolution_delta(const ModelParams& p, double A_sub, double kappa, double eps) {
  return std::pow(eps * kappa * (p.m - 1.0) / (A_sub * p.m), p.m - 1.0);
}

double subsolution_eta(const ModelParams& p, double A_sub, double kappa, double eps, double r1) {
  const double delta = subsolution_delta(p, A_sub, kappa, eps);
  return -A_sub * std::pow(delta, p.m / (p.m - 1.0)) +
         eps * kappa * (p.R_n() - pow_n(p, r1) + delta);
}

double supersolution_delta(const ModelParams& p, double A_sup, double eps) {
  return std::pow(eps * (p.m - 1.0) / (A_sup * p.m), p.m - 1.0);
}

ComparisonFamily make_subsolution(const ModelParams& p, double mu, double A_sub, double kappa,
                                  double theta, double r1, double eps, double r0,
                                  double vertical_shift) {
  ComparisonFamily f;
  f.kind = FamilyKind::Subsolution;
  f.p = p;
  f.mu = mu;
  f.A_coef = A_sub;
  f.theta = theta;
  f.r1 = r1;
  f.eps = eps;
  f.kappa = kappa;
  f.delta = subsolution_delta(p, A_sub, kappa, eps);
  f.eta = subsolution_eta(p, A_sub, kappa, eps, r1);
  f.vertical_shift = vertical_shift;
  f.s_lo = pow_n(p, r0);
  f.s_hi = p.R_n();
  return f;
}

ComparisonFamily make_supersolution(const ModelParams& p, double mu, double A_sup, double theta,
                                    double r1, double eps, double r0) {
  ComparisonFamily f;
  f.kind = FamilyKind::Supersolution;
  f.p = p;
  f.mu = mu;
  f.A_coef = A_sup;
  f.theta = theta;
  f.r1 = r1;
  f.eps = eps;
  f.delta = supersolution_delta(p, A_sup, eps);
  f.s_lo = pow_n(p, r0);
  f.s_hi = p.R_n();
  f.horizon = theta > 0.0 ? (p.R_n() - pow_n(p, r1)) / theta : std::numeric_limits<double>::infinity();
  return f;
}

std::vector<Predicate> subsolution_predicates(const SubsolutionSelection& sel) {
  const auto& p = sel.p;
  const double m = p.m;
  const double n = p.n;
  const double span = p.R_n() - pow_n(p, sel.r1);
  const double mu = sel.mu;
  std::vector<Predicate> out;
  const auto add = [&](std::string name, bool holds, double lhs, double rhs) {
    out.push_back({std::move(name), holds, lhs, rhs});
  };

  add("kappa>0", sel.kappa > 0.0, sel.kappa, 0.0);
  add("lambda in (0,1)", sel.lambda > 0.0 && sel.lambda < 1.0, sel.lambda, 1.0);
  add("eps0 in (0,1)", sel.eps0 > 0.0 && sel.eps0 < 1.0, sel.eps0, 1.0);
  add("r_min in (0,r1)", sel.r_min > 0.0 && sel.r_min < sel.r1, sel.r_min, sel.r1);
  add("A_sub in (0,C_crit)", sel.A_sub > 0.0 && sel.A_sub < sel.c_crit, sel.A_sub, sel.c_crit);

  const double coef_rhs =
      (m - 1.0) * sel.kappa / (m * (sel.kappa + 1.0)) *
      detail::pow_inv_m1((1.0 - sel.lambda) * mu * span * (m - 1.0) /
                             (std::pow(sel.r1, 2.0 * n - 2.0) * n * n),
                         m);
  add("coefficient condition", sel.A_sub <= coef_rhs, sel.A_sub, coef_rhs);

  add("2 eps0 kappa < lambda mu", 2.0 * sel.eps0 * sel.kappa < sel.lambda * mu,
      2.0 * sel.eps0 * sel.kappa, sel.lambda * mu);
  add("lambda mu < mu", sel.lambda * mu < mu, sel.lambda * mu, mu);

  const double bracket =
      sel.lambda * mu / 2.0 * span - sel.theta_max - sel.eps0 * sel.kappa * span;
  add("radius bracket > 0", bracket > 0.0, bracket, 0.0);
  const double gap = pow_n(p, sel.r1) - pow_n(p, sel.r_min);
  const double gap_cap = bracket > 0.0 ? std::pow(bracket / sel.A_sub, (m - 1.0) / m) : 0.0;
  add("radius condition at r_min", gap <= gap_cap, gap, gap_cap);

  // eta is increasing in eps, so the supremum over (0, eps0) sits at eps0.
  const double eta0 = subsolution_eta(p, sel.A_sub, sel.kappa, sel.eps0, sel.r1);
  add("eta(eps0) <= lambda mu span / 2", eta0 <= sel.lambda * mu / 2.0 * span, eta0,
      sel.lambda * mu / 2.0 * span);
  add("eta(eps0) >= 0", eta0 >= 0.0, eta0, 0.0);

  add("theta in (0, theta_max]", sel.theta > 0.0 && sel.theta <= sel.theta_max, sel.theta,
      sel.theta_max);
  const double speed_cap = (mu - 2.0 * sel.eps0 * sel.kappa) * (p.R_n() - pow_n(p, sel.r2));
  add("theta speed condition at r2", sel.theta <= speed_cap, sel.theta, speed_cap);
  add("r2 in (r1,R]", sel.r2 > sel.r1 && sel.r2 <= p.R, sel.r2, p.R);
  return out;
}

double supersolution_coefficient_floor(const ModelParams& p, double mu, double theta, double r0) {
  const double m = p.m;
  const double n = p.n;
  const double x = (mu * p.R_n() - mu * pow_n(p, r0) + 2.0 * theta) * (m - 1.0) /
                   (std::pow(r0, 2.0 * n - 2.0) * n * n);
  return (m - 1.0) / m * detail::pow_inv_m1(x, m);
}

std::vector<Predicate> supersolution_predicates(const SupersolutionSelection& sel) {
  const auto& p = sel.p;
  const double span = p.R_n() - pow_n(p, sel.r1);
  std::vector<Predicate> out;
  const auto add = [&](std::string name, bool holds, double lhs, double rhs) {
    out.push_back({std::move(name), holds, lhs, rhs});
  };
  add("A_sup > C_crit", sel.A_sup > sel.c_crit, sel.A_sup, sel.c_crit);
  add("theta > 0", sel.theta > 0.0, sel.theta, 0.0);
  add("r_min in (0,r1)", sel.r_min > 0.0 && sel.r_min < sel.r1, sel.r_min, sel.r1);
  // The floor decreases in r0, so r_min is the binding radius.
  const double floor = supersolution_coefficient_floor(p, sel.mu, sel.theta, sel.r_min);
  add("coefficient condition at r_min", sel.A_sup >= floor, sel.A_sup, floor);
  const double eps0 = std::min(0.5, sel.theta / p.R_n());
  add("eps0 = min(1/2, theta/R^n)", sel.eps0 == eps0, sel.eps0, eps0);
  add("theta T_bar = R^n - r1^n", std::abs(sel.theta * sel.T_bar - span) <= 4e-16 * span,
      sel.theta * sel.T_bar, span);
  return out;
}

SubsolutionSelection select_subsolution_params(const ModelParams& p, double mu, double r1,
                                               double A_sub) {
  p.validate();
  const double cc = c_crit(p, mu, r1);
  if (!(A_sub > 0.0 && A_sub < cc))
    throw ThresholdError("select_subsolution_params: need 0 < A_sub < C_crit(r1)");

  SubsolutionSelection sel;
  sel.p = p;
  sel.mu = mu;
  sel.r1 = r1;
  sel.A_sub = A_sub;
  sel.c_crit = cc;

  const double m = p.m;
  const double q = A_sub / cc;
  const double sq = std::sqrt(q);
  // (1 - lambda)^(1/(m-1)) = sqrt(q) and kappa/(kappa+1) = 2 sqrt(q)/(1 + sqrt(q)).
  sel.lambda = std::min(1.0 - std::pow(q, (m - 1.0) / 2.0), 1.0 - 1e-9);
  sel.kappa = std::max(2.0 * sq / (1.0 - sq), kKappaFloor);

  const double span = p.R_n() - pow_n(p, r1);
  sel.theta_max = sel.lambda * mu * span / 8.0;

  const double cap_order = sel.lambda * mu / (2.0 * sel.kappa);
  const double cap_bracket = (sel.lambda * mu * span / 2.0 - sel.theta_max) / (sel.kappa * span);
  const double eta_target = sel.lambda * mu * span / 2.0;
  double cap_eta = 1.0;
  if (subsolution_eta(p, A_sub, sel.kappa, 1.0, r1) > eta_target) {
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (subsolution_eta(p, A_sub, sel.kappa, mid, r1) <= eta_target ? lo : hi) = mid;
    }
    cap_eta = lo;
  }
  sel.eps0 = 0.5 * std::min({cap_order, cap_bracket, cap_eta, 1.0});

  const double bracket = sel.lambda * mu * span / 2.0 - sel.theta_max - sel.eps0 * sel.kappa * span;
  const double r1n = pow_n(p, r1);
  const double gap = std::min(std::pow(bracket / A_sub, (m - 1.0) / m), r1n);
  sel.r_min = root_n(p, r1n - 0.5 * gap);

  sel.r2 = root_n(p, 0.5 * (r1n + p.R_n()));
  const double speed_cap = (mu - 2.0 * sel.eps0 * sel.kappa) * (p.R_n() - pow_n(p, sel.r2));
  sel.theta = 0.5 * std::min(sel.theta_max, speed_cap);

  const auto preds = subsolution_predicates(sel);
  const std::string failed = describe_failures(preds);
  if (!failed.empty()) throw InternalError("select_subsolution_params: predicates failed:" + failed);
  return sel;
}

SupersolutionSelection select_supersolution_params(const ModelParams& p, double mu, double r1,
                                                   double A_sup) {
  p.validate();
  const double cc = c_crit(p, mu, r1);
  if (!(A_sup > cc)) throw ThresholdError("select_supersolution_params: need A_sup > C_crit(r1)");

  SupersolutionSelection sel;
  sel.p = p;
  sel.mu = mu;
  sel.r1 = r1;
  sel.A_sup = A_sup;
  sel.c_crit = cc;

  const double span = p.R_n() - pow_n(p, r1);
  // Ask for 10% slack, or less when A_sup is within 10% of the threshold.
  const double slack = std::min(1.1, 0.5 * (1.0 + A_sup / cc));
  double theta = mu * span / 4.0;
  double r_gap = 0.5 * r1;
  bool found = false;
  for (int k = 0; k < 400; ++k) {
    const double r_min = r1 - r_gap;
    if (A_sup >= slack * supersolution_coefficient_floor(p, mu, theta, r_min)) {
      sel.theta = theta;
      sel.r_min = r_min;
      found = true;
      break;
    }
    theta *= 0.5;
    r_gap *= 0.5;
  }
  if (!found) throw InternalError("select_supersolution_params: no admissible (theta, r_min)");
  sel.eps0 = std::min(0.5, sel.theta / p.R_n());
  sel.T_bar = span / sel.theta;

  const auto preds = supersolution_predicates(sel);
  const std::string failed = describe_failures(preds);
  if (!failed.empty())
    throw InternalError("select_supersolution_params: predicates failed:" + failed);
  return sel;
}

ComparisonFamily build_subsolution(const SubsolutionSelection& sel, double eps, double r0,
                                   double theta, double vertical_shift) {
  if (!(eps > 0.0 && eps < sel.eps0)) throw DomainError("build_subsolution: eps outside (0, eps0)");
  if (!(r0 >= sel.r_min && r0 < sel.r1)) throw DomainError("build_subsolution: r0 outside [r_min, r1)");
  if (!(theta >= 0.0 && theta <= sel.theta_max))
    throw DomainError("build_subsolution: theta outside [0, theta_max]");
  if (theta > 0.0 &&
      theta > (sel.mu - 2.0 * sel.eps0 * sel.kappa) * (sel.p.R_n() - pow_n(sel.p, sel.r2)))
    throw DomainError("build_subsolution: theta violates the speed condition at r2");
  return make_subsolution(sel.p, sel.mu, sel.A_sub, sel.kappa, theta, sel.r1, eps, r0,
                          vertical_shift);
}

ComparisonFamily build_supersolution(const SupersolutionSelection& sel, double eps, double r0) {
  if (!(eps > 0.0 && eps < sel.eps0))
    throw DomainError("build_supersolution: eps outside (0, eps0)");
  if (!(r0 >= sel.r_min && r0 < sel.r1))
    throw DomainError("build_supersolution: r0 outside [r_min, r1)");
  return make_supersolution(sel.p, sel.mu, sel.A_sup, sel.theta, sel.r1, eps, r0);
}

double limit_envelope(const EnvelopeParams& env, double t, double s) {
  const double front =
      env.direction == TailDirection::Shrink ? env.r1n - env.theta * t : env.r1n + env.theta * t;
  const double x = front - s;
  if (x <= 0.0) return env.mu_Rn;
  return env.mu_Rn - env.coef * std::pow(x, env.m / (env.m - 1.0));
}

ComparisonFamily ShrinkProcedure::stationary_family(double eps) const {
  if (!(eps > 0.0 && eps < eps1)) throw DomainError("shrink procedure: eps outside (0, eps1)");
  return build_subsolution(sel, eps, r_star, 0.0, 0.0);
}

ComparisonFamily ShrinkProcedure::shrink_family(double eps) const {
  if (!(eps > 0.0 && eps < eps1)) throw DomainError("shrink procedure: eps outside (0, eps1)");
  auto f = build_subsolution(sel, eps, r_star, sel.theta,
                             eps * sel.kappa * (sel.p.R_n() - pow_n(sel.p, sel.r2)));
  f.s_hi = pow_n(sel.p, sel.r2);
  f.horizon = T_cap;
  return f;
}

double ShrinkProcedure::left_boundary_bound() const {
  const auto& p = sel.p;
  const double gap = pow_n(p, sel.r1) - pow_n(p, r_star);
  return sel.mu * p.R_n() - 0.5 * (factor + 1.0) * C * std::pow(gap, p.m / (p.m - 1.0));
}

EnvelopeParams ShrinkProcedure::envelope() const {
  return {TailDirection::Shrink, sel.mu * sel.p.R_n(), factor * C, pow_n(sel.p, sel.r1),
          sel.theta, sel.p.m};
}

ShrinkProcedure plan_shrink(const ModelParams& p, double mu, double r1, double C, double r0) {
  const double cc = c_crit(p, mu, r1);
  if (!(C > 0.0 && C < cc)) throw ThresholdError("plan_shrink: need 0 < C < C_crit(r1)");
  if (!(r0 > 0.0 && r0 < r1)) throw DomainError("plan_shrink: r0 must lie in (0, r1)");
  ShrinkProcedure proc;
  proc.C = C;
  proc.factor = 0.5 * (1.0 + cc / C);
  proc.sel = select_subsolution_params(p, mu, r1, proc.factor * C);
  proc.r_star = std::max(proc.sel.r_min, r0);

  const double m = p.m;
  const double gap = pow_n(p, r1) - pow_n(p, proc.r_star);
  const double span = p.R_n() - pow_n(p, r1);
  const double lam = proc.factor;
  const double tm = proc.sel.theta_max;
  // The three caps are all used later on, so their minimum is enforced.
  proc.T_cap = std::min({gap / tm * (1.0 - std::pow(2.0 * lam / (lam + 1.0), -(m - 1.0) / m)),
                         gap / (2.0 * tm), span / (2.0 * tm)});
  const double eps_delta =
      std::pow(0.5 * gap, 1.0 / (m - 1.0)) * proc.sel.A_sub * m / (proc.sel.kappa * (m - 1.0));
  proc.eps1 = std::min(proc.sel.eps0, eps_delta);
  return proc;
}

ComparisonFamily ExpandProcedure::family(double eps) const {
  if (!(eps > 0.0 && eps < eps1)) throw DomainError("expand procedure: eps outside (0, eps1)");
  auto f = build_supersolution(sel, eps, r_star);
  f.horizon = T_cap;
  return f;
}

double ExpandProcedure::left_boundary_bound() const {
  const auto& p = sel.p;
  const double gap = pow_n(p, sel.r1) - pow_n(p, r_star);
  return sel.mu * p.R_n() - 2.0 * C / (factor + 1.0) * std::pow(gap, p.m / (p.m - 1.0));
}

EnvelopeParams ExpandProcedure::envelope() const {
  return {TailDirection::Expand, sel.mu * sel.p.R_n(), C / factor, pow_n(sel.p, sel.r1),
          sel.theta, sel.p.m};
}

ExpandProcedure plan_expand(const ModelParams& p, double mu, double r1, double C, double r0) {
  const double cc = c_crit(p, mu, r1);
  if (!(C > cc)) throw ThresholdError("plan_expand: need C > C_crit(r1)");
  if (!(r0 > 0.0 && r0 < r1)) throw DomainError("plan_expand: r0 must lie in (0, r1)");
  ExpandProcedure proc;
  proc.C = C;
  proc.factor = 0.5 * (1.0 + C / cc);
  proc.sel = select_supersolution_params(p, mu, r1, C / proc.factor);
  proc.r_star = std::max(proc.sel.r_min, r0);

  const double m = p.m;
  const double gap = pow_n(p, r1) - pow_n(p, proc.r_star);
  const double lam = proc.factor;
  proc.T_cap = std::min(proc.sel.T_bar,
                        gap / proc.sel.theta *
                            (std::pow(2.0 * lam / (lam + 1.0), (m - 1.0) / m) - 1.0));
  const double eps_delta = std::pow(gap, 1.0 / (m - 1.0)) * proc.sel.A_sup * m / (m - 1.0);
  proc.eps1 = std::min(proc.sel.eps0, eps_delta);
  return proc;
}

}  // namespace frontlab
