#pragma once

// Free-boundary tracking: first saturation point of w, speed fits, and
// ordering checks against the limit envelopes of the comparison module.

#include <cstddef>
#include <string>
#include <vector>

#include "frontlab/comparison.hpp"
#include "frontlab/solver.hpp"

namespace frontlab {

struct FrontEntry {
  double t;
  double s_front;
  double r_front;
};

struct FrontTrace {
  std::vector<FrontEntry> entries;
  double tau = 0.0;
  int n = 1;
  /// Grid spacing in s, used for the displacement gate.
  double ds = 0.0;
  std::string run_id;
};

/// First s with mu R^n - w(s) <= tau mu R^n, linearly interpolated between
/// the bracketing nodes. Throws DomainError unless tau is in (0, 1).
double front_position(const GridFunction& w, double tau);

FrontTrace front_trace(const Trajectory& traj, double tau, int n, std::string run_id = {});

enum class Classification { Shrinking, Expanding, Inconclusive };

const char* to_string(Classification c);

struct FrontVerdict {
  Classification classification = Classification::Inconclusive;
  /// |slope| of r_front when classified, else 0.
  double zeta = 0.0;
  double slope = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  /// Root-mean-square deviation of the fit.
  double fit_residual = 0.0;
  /// (s_front(t_b) - s_front(t_a)) / ds over the window entries.
  double displacement_cells = 0.0;
  std::size_t entries = 0;
};

/// Least-squares line through r_front on [t_a, t_b]. Throws WindowError with
/// fewer than four entries in the window.
FrontVerdict estimate_speed(const FrontTrace& trace, double t_a, double t_b,
                            double min_cells = 3.0);

struct EnvelopeReport {
  bool pass = true;
  std::size_t nodes_checked = 0;
  std::size_t snapshots_checked = 0;
  /// Largest violation beyond tolerance (<= 0 when passing).
  double worst_excess = 0.0;
  double worst_gap = 0.0;
  double tolerance_at_worst = 0.0;
  double witness_t = 0.0;
  double witness_s = 0.0;
};

struct EnvelopeWindow {
  double s_lo = 0.0;
  double s_hi = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

/// Compares snapshots with the envelope on the window: Lower requires
/// w >= envelope, Upper w <= envelope, each up to 3 ds times the largest
/// cell slope of the snapshot inside the window.
EnvelopeReport envelope_check(const Trajectory& traj, const EnvelopeParams& env,
                              BoundKind direction, const EnvelopeWindow& window);

}  // namespace frontlab
