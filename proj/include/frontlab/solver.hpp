#pragma once

// Explicit finite-difference integrator for the regularized
// mass-accumulation equation on [0, R^n] with w(0) = 0, w(R^n) = mu R^n.
//
// Diffusion is written in flux form on half nodes,
//   a_i (Phi(u_{i+1/2}) - Phi(u_{i-1/2})) / ds,  Phi(u) = (u + eps)^m / m,
// with u_{i+1/2} the cell slope and a_i = n^2 s_i^(2-2/n). For m = 2 this is
// the central second difference with coefficient frozen at the central slope.
// The transport term (w - mu s) w_s is upwinded on the sign of w_i - mu s_i.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "frontlab/profiles.hpp"
#include "frontlab/residual.hpp"

namespace frontlab {

struct SolverOptions {
  /// Fraction of the stability limit used per step; in (0, 1].
  double safety = 0.45;
  /// false drops the transport term (porous medium baseline).
  bool taxis = true;
  std::size_t max_steps = 10'000'000;
};

struct SolverStats {
  std::size_t steps = 0;
  double last_dt = 0.0;
  /// Largest dt / stability limit seen.
  double max_cfl_ratio = 0.0;
  /// Nodes lowered by the monotonicity clamp, and the summed amount.
  std::size_t repair_events = 0;
  double repair_total = 0.0;
  /// Largest amount removed by the clamp within a single step.
  double repair_max_step = 0.0;
};

struct SolverState {
  OperatorInput op;
  GridFunction grid;
  double t = 0.0;
  SolverStats stats;
};

/// Validates the grid (uniform, pinned, monotone) and wraps it.
SolverState make_state(const OperatorInput& op, GridFunction w0, double t0 = 0.0);

/// safety * min over interior nodes of
///   ds^2 / (2 a_i (max(u_left, u_right) + eps)^(m-1))  and  ds / |w_i - mu s_i|.
/// The transport cap is skipped when taxis is off.
double cfl_dt(const SolverState& state, double safety, bool taxis = true);

/// One explicit step in place. Throws StepRejected if dt exceeds
/// cfl_dt(state, 1) and NumericalFailure on non-finite values.
void step(SolverState& state, double dt, bool taxis = true);

/// Spatial operator of the scheme: d w_i / dt at interior nodes, zero at
/// the two ends. Shared with the discrete residual.
std::vector<double> scheme_rhs(const OperatorInput& op, const GridFunction& w, bool taxis);

struct Snapshot {
  double t = 0.0;
  GridFunction grid;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  SolverStats stats;
  /// Resolved run parameters as key/value text.
  std::vector<std::pair<std::string, std::string>> echo;
};

/// Integrates to the last output time. Steps are shortened to land exactly on
/// each output time, so snapshots carry no interpolation error.
Trajectory integrate(const OperatorInput& op, const GridFunction& w0, double horizon,
                     const std::vector<double>& output_times, const SolverOptions& opts = {});

/// Same scheme with the transport term removed.
Trajectory integrate_pme_baseline(const OperatorInput& op, const GridFunction& w0,
                                  double horizon, const std::vector<double>& output_times,
                                  SolverOptions opts = {});

/// n_out + 1 equally spaced times on [0, horizon].
std::vector<double> uniform_output_times(double horizon, std::size_t n_out);

}  // namespace frontlab
