#include "frontlab/profiles.hpp"

#include <algorithm>
#include <cmath>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

double binomial(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

}  // namespace

double Segment::value(double r) const {
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Plateau:
      return a;
    case Kind::Linear:
      if (r_b == r_a) return a;
      return a + (b - a) * (r - r_a) / (r_b - r_a);
    case Kind::PowerTail:
      return edge > r ? a * std::pow(edge - r, b) : 0.0;
  }
  return 0.0;
}

double Segment::partial_mass(int n, double r) const {
  r = std::clamp(r, r_a, r_b);
  const double nn = n;
  switch (kind) {
    case Kind::Zero:
      return 0.0;
    case Kind::Plateau:
      return a * (std::pow(r, nn) - std::pow(r_a, nn));
    case Kind::Linear: {
      if (r_b == r_a) return 0.0;
      // u = c0 + c1 rho
      const double c1 = (b - a) / (r_b - r_a);
      const double c0 = a - c1 * r_a;
      const auto prim = [&](double x) {
        return c0 * std::pow(x, nn) + c1 * nn / (nn + 1.0) * std::pow(x, nn + 1.0);
      };
      return prim(r) - prim(r_a);
    }
    case Kind::PowerTail: {
      if (a == 0.0) return 0.0;
      // rho^(n-1) = (edge - x)^(n-1) expanded in x = edge - rho.
      const double xa = edge - r_a;
      const double xr = edge - r;
      double sum = 0.0;
      for (int k = 0; k <= n - 1; ++k) {
        const double e = b + k + 1.0;
        const double coef = binomial(n - 1, k) * std::pow(edge, n - 1 - k) * ((k % 2) ? -1.0 : 1.0);
        sum += coef * (std::pow(xa, e) - std::pow(xr, e)) / e;
      }
      return nn * a * sum;
    }
  }
  return 0.0;
}

double RadialProfile::operator()(double r) const {
  if (r < 0.0 || r > R) return 0.0;
  for (const auto& seg : pieces)
    if (r >= seg.r_a && r <= seg.r_b) return seg.value(r);
  return 0.0;
}

double RadialProfile::accumulated(int n, double r) const {
  double acc = 0.0;
  for (const auto& seg : pieces) {
    if (r <= seg.r_a) break;
    acc += seg.partial_mass(n, r);
  }
  return acc;
}

void RadialProfile::validate() const {
  if (pieces.empty()) throw DomainError("profile: no segments");
  double cursor = 0.0;
  for (const auto& seg : pieces) {
    if (seg.r_a != cursor || seg.r_b < seg.r_a)
      throw DomainError("profile: segments must partition [0, R] in order");
    cursor = seg.r_b;
    switch (seg.kind) {
      case Segment::Kind::Zero:
        break;
      case Segment::Kind::Plateau:
        if (!(seg.a >= 0.0)) throw DomainError("profile: negative plateau");
        break;
      case Segment::Kind::Linear:
        if (!(seg.a >= 0.0 && seg.b >= 0.0)) throw DomainError("profile: negative ramp");
        break;
      case Segment::Kind::PowerTail:
        if (!(seg.a >= 0.0 && seg.b > 0.0)) throw DomainError("profile: invalid tail");
        if (seg.r_b > seg.edge) throw DomainError("profile: tail extends past its edge");
        break;
    }
    if (seg.r_a >= r1 && seg.kind != Segment::Kind::Zero && seg.value(seg.r_a) != 0.0)
      throw DomainError("profile: nonzero beyond r1");
  }
  if (cursor != R) throw DomainError("profile: segments must end at R");
}

std::vector<std::pair<double, double>> RadialProfile::tabulate(std::size_t count) const {
  std::vector<std::pair<double, double>> out;
  if (count == 0) return out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = count == 1 ? 0.0 : R * static_cast<double>(i) / static_cast<double>(count - 1);
    out.emplace_back(r, (*this)(r));
  }
  return out;
}

void GridFunction::validate_shape() const {
  if (s.size() < 2 || values.size() != s.size())
    throw DomainError("grid: need at least two nodes with matching values");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw DomainError("grid: nodes must be strictly increasing");
}

std::vector<double> uniform_s_grid(const ModelParams& p, std::size_t cells) {
  if (cells < 1) throw DomainError("grid: need at least one cell");
  const double Rn = p.R_n();
  std::vector<double> s(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    s[i] = Rn * static_cast<double>(i) / static_cast<double>(cells);
  s.back() = Rn;
  return s;
}

RadialProfile make_profile(const ModelParams& p, double B, double r_plateau, double A,
                           double alpha, double r0, double r1) {
  p.validate();
  if (!(0.0 < r_plateau && r_plateau <= r0 && r0 < r1 && r1 < p.R))
    throw DomainError("make_profile: need 0 < r_plateau <= r0 < r1 < R");
  if (!(B >= 0.0) || !(A >= 0.0)) throw DomainError("make_profile: negative coefficient");
  if (!(alpha > 0.0)) throw DomainError("make_profile: alpha must be positive");

  RadialProfile prof;
  prof.r1 = r1;
  prof.R = p.R;
  prof.pieces.push_back({Segment::Kind::Plateau, 0.0, r_plateau, B, 0.0, 0.0});
  const double tail_start = A * std::pow(r1 - r0, alpha);
  if (r_plateau < r0) prof.pieces.push_back({Segment::Kind::Linear, r_plateau, r0, B, tail_start, 0.0});
  prof.pieces.push_back({Segment::Kind::PowerTail, r0, r1, A, alpha, r1});
  prof.pieces.push_back({Segment::Kind::Zero, r1, p.R, 0.0, 0.0, 0.0});
  return prof;
}

RadialProfile constant_profile(const ModelParams& p, double c) {
  p.validate();
  if (!(c >= 0.0)) throw DomainError("constant_profile: negative density");
  RadialProfile prof;
  prof.r1 = p.R;
  prof.R = p.R;
  prof.pieces.push_back({Segment::Kind::Plateau, 0.0, p.R, c, 0.0, 0.0});
  return prof;
}

double mass(const ModelParams& p, const RadialProfile& profile) {
  profile.validate();
  return p.omega_n() * profile.accumulated(p.n, p.R);
}

double calibrate_plateau(const ModelParams& p, double target_mass, double A, double alpha,
                         double r_plateau, double r0, double r1) {
  // Mass is affine in B.
  const double m0 = mass(p, make_profile(p, 0.0, r_plateau, A, alpha, r0, r1));
  const double m1 = mass(p, make_profile(p, 1.0, r_plateau, A, alpha, r0, r1)) - m0;
  const double gap = target_mass - m0;
  if (gap < -1e-14 * std::max(1.0, m0))
    throw InfeasibleError("calibrate_plateau: target mass below the tail mass");
  return std::max(gap, 0.0) / m1;
}

GridFunction transform_to_w(const ModelParams& p, const RadialProfile& profile,
                            std::span<const double> s_grid) {
  profile.validate();
  GridFunction g;
  g.s.assign(s_grid.begin(), s_grid.end());
  g.values.resize(g.s.size());
  const double inv_n = 1.0 / p.n;
  for (std::size_t i = 0; i < g.s.size(); ++i) {
    const double r = p.n == 1 ? g.s[i] : std::pow(g.s[i], inv_n);
    g.values[i] = profile.accumulated(p.n, r);
  }
  g.mu_Rn = profile.accumulated(p.n, p.R);
  if (!g.s.empty() && g.s.front() == 0.0) g.values.front() = 0.0;
  if (!g.s.empty() && g.s.back() == p.R_n()) g.values.back() = g.mu_Rn;
  return g;
}

std::vector<RadialSample> derivative_to_u(const GridFunction& w, int n) {
  std::vector<RadialSample> out;
  if (w.size() < 2) return out;
  out.reserve(w.size() - 1);
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double mid = 0.5 * (w.s[i] + w.s[i + 1]);
    const double u = (w.values[i + 1] - w.values[i]) / (w.s[i + 1] - w.s[i]);
    out.push_back({n == 1 ? mid : std::pow(mid, 1.0 / n), u});
  }
  return out;
}

BoundReport check_initial_bound(const ModelParams& p, const GridFunction& w0, double C,
                                double r0, double r1, BoundKind kind) {
  const double lo = std::pow(r0, p.n);
  const double hi = std::pow(r1, p.n);
  const double power = p.m / (p.m - 1.0);
  const double tol = 1e-12 * w0.mu_Rn;
  BoundReport rep;
  bool first = true;
  for (std::size_t i = 0; i < w0.size(); ++i) {
    const double s = w0.s[i];
    if (!(s > lo && s < hi)) continue;
    const double bound = w0.mu_Rn - C * std::pow(hi - s, power);
    const double slack = kind == BoundKind::Lower ? w0.values[i] - bound : bound - w0.values[i];
    ++rep.nodes_checked;
    if (first || slack < rep.worst_slack) {
      rep.worst_slack = slack;
      rep.worst_s = s;
      first = false;
    }
  }
  rep.pass = rep.worst_slack >= -tol;
  return rep;
}

}  // namespace frontlab
