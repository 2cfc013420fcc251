#include "frontlab/front.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontlab/errors.hpp"

namespace frontlab {

double front_position(const GridFunction& w, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw DomainError("front_position: tau must lie in (0, 1)");
  const double target = (1.0 - tau) * w.mu_Rn;
  const auto& v = w.values;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < target) continue;
    if (i == 0) return w.s[0];
    const double frac = (target - v[i - 1]) / (v[i] - v[i - 1]);
    return w.s[i - 1] + frac * (w.s[i] - w.s[i - 1]);
  }
  return w.s.back();
}

FrontTrace front_trace(const Trajectory& traj, double tau, int n, std::string run_id) {
  FrontTrace tr;
  tr.tau = tau;
  tr.n = n;
  tr.run_id = std::move(run_id);
  if (!traj.snapshots.empty()) {
    const auto& s = traj.snapshots.front().grid.s;
    tr.ds = s.size() > 1 ? s[1] - s[0] : 0.0;
  }
  for (const auto& snap : traj.snapshots) {
    const double sf = front_position(snap.grid, tau);
    tr.entries.push_back({snap.t, sf, n == 1 ? sf : std::pow(sf, 1.0 / n)});
  }
  return tr;
}

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Shrinking: return "Shrinking";
    case Classification::Expanding: return "Expanding";
    case Classification::Inconclusive: return "Inconclusive";
  }
  return "?";
}

FrontVerdict estimate_speed(const FrontTrace& trace, double t_a, double t_b, double min_cells) {
  std::vector<const FrontEntry*> sel;
  for (const auto& e : trace.entries)
    if (e.t >= t_a && e.t <= t_b) sel.push_back(&e);
  if (sel.size() < 4) throw WindowError("estimate_speed: fewer than four entries in window");

  FrontVerdict v;
  v.t_a = t_a;
  v.t_b = t_b;
  v.entries = sel.size();
  const double k = static_cast<double>(sel.size());
  double mt = 0.0, mr = 0.0;
  for (const auto* e : sel) {
    mt += e->t;
    mr += e->r_front;
  }
  mt /= k;
  mr /= k;
  double stt = 0.0, str = 0.0;
  for (const auto* e : sel) {
    stt += (e->t - mt) * (e->t - mt);
    str += (e->t - mt) * (e->r_front - mr);
  }
  v.slope = stt > 0.0 ? str / stt : 0.0;
  double ss = 0.0;
  for (const auto* e : sel) {
    const double d = e->r_front - (mr + v.slope * (e->t - mt));
    ss += d * d;
  }
  v.fit_residual = std::sqrt(ss / k);
  v.displacement_cells =
      trace.ds > 0.0 ? (sel.back()->s_front - sel.front()->s_front) / trace.ds : 0.0;

  if (v.slope < 0.0 && v.displacement_cells <= -min_cells)
    v.classification = Classification::Shrinking;
  else if (v.slope > 0.0 && v.displacement_cells >= min_cells)
    v.classification = Classification::Expanding;
  v.zeta = v.classification == Classification::Inconclusive ? 0.0 : std::abs(v.slope);
  return v;
}

EnvelopeReport envelope_check(const Trajectory& traj, const EnvelopeParams& env,
                              BoundKind direction, const EnvelopeWindow& window) {
  EnvelopeReport rep;
  rep.worst_excess = -std::numeric_limits<double>::infinity();
  for (const auto& snap : traj.snapshots) {
    if (snap.t < window.t_lo || snap.t > window.t_hi) continue;
    const auto& s = snap.grid.s;
    const auto& w = snap.grid.values;
    double max_slope = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      if (s[i + 1] >= window.s_lo && s[i] <= window.s_hi)
        max_slope = std::max(max_slope, (w[i + 1] - w[i]) / (s[i + 1] - s[i]));
    const double ds = s.size() > 1 ? s[1] - s[0] : 0.0;
    const double tol = 3.0 * ds * max_slope;
    ++rep.snapshots_checked;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < window.s_lo || s[i] > window.s_hi) continue;
      const double e = limit_envelope(env, snap.t, s[i]);
      const double gap = direction == BoundKind::Lower ? e - w[i] : w[i] - e;
      ++rep.nodes_checked;
      if (gap - tol > rep.worst_excess) {
        rep.worst_excess = gap - tol;
        rep.worst_gap = gap;
        rep.tolerance_at_worst = tol;
        rep.witness_t = snap.t;
        rep.witness_s = s[i];
      }
    }
  }
  if (rep.nodes_checked == 0) rep.worst_excess = 0.0;
  rep.pass = rep.worst_excess <= 0.0;
  return rep;
}

}  // namespace frontlab
