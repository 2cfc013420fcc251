#include "frontlab/residual.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/sobol.hpp>

#include "frontlab/errors.hpp"
#include "frontlab/solver.hpp"

namespace frontlab {

void OperatorInput::validate() const {
  p.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0, 1)");
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("mu must be finite and >= 0");
}

double p_eps_pointwise(const OperatorInput& in, double w, double w_s, double w_ss, double w_t,
                       double s) {
  const double base = w_s + in.eps;
  if (!(base > 0.0)) throw DomainError("p_eps_pointwise: w_s + eps must be positive");
  const int n = in.p.n;
  const double weight = n == 1 ? 1.0 : static_cast<double>(n) * n * std::pow(s, 2.0 - 2.0 / n);
  return w_t - weight * std::pow(base, in.p.m - 1.0) * w_ss - w * w_s + in.mu * s * w_s;
}

double p_eps_analytic(const OperatorInput& in, const ComparisonFamily& fam, double s, double t) {
  const FamilyJet j = fam.jet(s, t);
  return p_eps_pointwise(in, j.w, j.w_s, j.w_ss, j.w_t, s);
}

CertificationReport certify_sign(const OperatorInput& in, const ComparisonFamily& fam,
                                 const Region& region, const SignBound& bound,
                                 const CertifyOptions& opts) {
  CertificationReport rep;
  if (!(region.s_b > region.s_a) || region.t_b < region.t_a) return rep;

  struct Raw {
    double s, t, residual, target;
  };
  std::vector<Raw> raw;
  raw.reserve(opts.grid_s * opts.grid_t + opts.quasi_random);

  const auto visit = [&](double s, double t) {
    if (std::abs(s - fam.kink(t)) < 1e-12) {
      ++rep.skipped_at_kink;
      return;
    }
    const FamilyJet j = fam.jet(s, t);
    const double r = p_eps_pointwise(in, j.w, j.w_s, j.w_ss, j.w_t, s);
    raw.push_back({s, t, r, bound.slope_margin * j.w_s});
  };

  const double ds = region.s_b - region.s_a;
  const double dt = region.t_b - region.t_a;
  const std::size_t gs = std::max<std::size_t>(opts.grid_s, 2);
  const std::size_t gt = dt > 0.0 ? std::max<std::size_t>(opts.grid_t, 2) : 1;
  for (std::size_t a = 0; a < gs; ++a) {
    const double s = region.s_a + ds * static_cast<double>(a) / static_cast<double>(gs - 1);
    for (std::size_t b = 0; b < gt; ++b) {
      const double t =
          gt == 1 ? region.t_a
                  : region.t_a + dt * static_cast<double>(b) / static_cast<double>(gt - 1);
      visit(s, t);
    }
  }
  boost::random::sobol qrng(2);
  const double span = static_cast<double>(qrng.max()) + 1.0;
  for (std::size_t k = 0; k < opts.quasi_random; ++k) {
    const double x = static_cast<double>(qrng()) / span;
    const double y = static_cast<double>(qrng()) / span;
    visit(region.s_a + ds * x, region.t_a + dt * y);
  }

  for (const auto& r : raw) rep.scale = std::max(rep.scale, std::abs(r.residual));
  const double tol = opts.rel_tol * rep.scale;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  for (const auto& r : raw) {
    const double slack = bound.kind == SignBound::Kind::AtMost ? -r.target - r.residual
                                                                : r.residual - r.target;
    if (slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.witness_s = r.s;
      rep.witness_t = r.t;
    }
    if (opts.keep_rows) rep.rows.push_back({r.s, r.t, r.residual, slack});
  }
  rep.samples = raw.size();
  if (raw.empty()) rep.worst_slack = 0.0;
  rep.pass = rep.worst_slack >= -tol;
  return rep;
}

std::vector<double> p_eps_discrete(const OperatorInput& in, const GridFunction& w_prev,
                                   const GridFunction& w_next, double dt, Stencil stencil,
                                   bool taxis) {
  if (!(dt > 0.0)) throw DomainError("p_eps_discrete: dt must be positive");
  w_prev.validate_shape();
  w_next.validate_shape();
  if (w_prev.s != w_next.s) throw DomainError("p_eps_discrete: grids do not match");
  const std::size_t N = w_prev.size() - 1;
  if (N < 2) throw DomainError("p_eps_discrete: need at least two cells");
  std::vector<double> out(N - 1);
  const auto& a = w_prev.values;
  const auto& b = w_next.values;

  if (stencil == Stencil::Scheme) {
    const auto rhs = scheme_rhs(in, w_prev, taxis);
    for (std::size_t i = 1; i < N; ++i) out[i - 1] = (b[i] - a[i]) / dt - rhs[i];
    return out;
  }
  for (std::size_t i = 1; i < N; ++i) {
    const double h_l = w_prev.s[i] - w_prev.s[i - 1];
    const double h_r = w_prev.s[i + 1] - w_prev.s[i];
    const double w_s = (a[i + 1] - a[i - 1]) / (h_l + h_r);
    const double w_ss =
        2.0 * ((a[i + 1] - a[i]) / h_r - (a[i] - a[i - 1]) / h_l) / (h_l + h_r);
    const double w_t = (b[i] - a[i]) / dt;
    const double base = w_s + in.eps;
    const int n = in.p.n;
    const double s = w_prev.s[i];
    const double weight =
        n == 1 ? 1.0 : static_cast<double>(n) * n * std::pow(s, 2.0 - 2.0 / n);
    const double diffusion = weight * std::pow(std::max(base, 0.0), in.p.m - 1.0) * w_ss;
    const double transport = taxis ? (a[i] - in.mu * s) * w_s : 0.0;
    out[i - 1] = w_t - diffusion - transport;
  }
  return out;
}

}  // namespace frontlab
