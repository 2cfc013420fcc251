#pragma once

// Run orchestration shared by the command-line tool and the acceptance
// suite: profile preparation, single runs with front extraction and envelope
// checks, worker-pool execution, and artifact writing.

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/comparison.hpp"
#include "frontlab/config.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/front.hpp"
#include "frontlab/io.hpp"
#include "frontlab/profiles.hpp"
#include "frontlab/solver.hpp"

namespace frontlab {

struct PreparedProfile {
  RadialProfile profile;
  GridFunction w0;
  MassData mass;
  double A = 0.0;
  double alpha = 0.0;
  double B = 0.0;
  double A_crit = 0.0;
  double C_crit = 0.0;
};

/// Builds the initial data for tail amplitude A and exponent alpha (ignored
/// for constant profiles). Throws InfeasibleError if calibration fails.
PreparedProfile prepare_profile(const RunConfig& cfg, double A, double alpha);

struct RunSpec {
  std::string id;
  /// A / A_crit; informational for explicit-A runs.
  double ratio = 0.0;
  double A = 0.0;
  double alpha = 1.0;
  double eps = 1e-3;
  bool taxis = true;
};

struct BandVerdict {
  double tau = 0.0;
  FrontTrace trace;
  std::optional<FrontVerdict> verdict;
  std::string error;
};

struct EnvelopeOutcome {
  BoundKind direction = BoundKind::Lower;
  EnvelopeParams env;
  EnvelopeWindow window;
  /// Boundary value the comparison needs at s = window.s_lo, and the last
  /// output time up to which the trajectory respects it. The window ends there.
  double left_bound = 0.0;
  double left_hold_t = 0.0;
  EnvelopeReport report;
  Metadata params;
};

struct RunResult {
  RunSpec spec;
  PreparedProfile prep;
  Trajectory traj;
  /// Primary band first, then the ladder.
  std::vector<BandVerdict> bands;
  std::optional<EnvelopeOutcome> envelope;
  /// Non-empty when the run could not be completed.
  std::string error;
  std::exception_ptr failure;

  const BandVerdict* primary() const { return bands.empty() ? nullptr : &bands.front(); }
};

/// Comparison procedure for the run's tail, if the tail is on either side
/// of the threshold and the run uses the full equation.
/// Last output time up to which w at s stays on the required side of bound
/// (linear interpolation between nodes); 0 if the first snapshot already fails.
double left_boundary_hold(const Trajectory& traj, double s, double bound, BoundKind kind);

std::optional<EnvelopeOutcome> plan_envelope(const RunConfig& cfg, const RunSpec& spec,
                                             const PreparedProfile& prep);

/// Integrates one run and post-processes it. Numerical failures propagate.
RunResult execute_run(const RunConfig& cfg, const RunSpec& spec);

/// Runs every spec on `jobs` worker threads. Per-run exceptions are stored
/// in the result (error text plus exception_ptr); results keep input order.
std::vector<RunResult> execute_runs(const RunConfig& cfg, const std::vector<RunSpec>& specs,
                                    unsigned jobs);

/// Run specs for simulate (every eps), sweep (ratios x eps) and baseline.
std::vector<RunSpec> simulate_specs(const RunConfig& cfg);
std::vector<RunSpec> sweep_specs(const RunConfig& cfg);
std::vector<RunSpec> baseline_specs(const RunConfig& cfg);

std::string run_id(double ratio, double eps, bool taxis, double alpha);

struct SignBracket {
  double eps = 0.0;
  /// Largest ratio with a negative fitted slope below the first positive one.
  std::optional<double> lo;
  /// Smallest ratio with a positive fitted slope.
  std::optional<double> hi;
  bool contains_one() const { return lo && hi && *lo < 1.0 && 1.0 < *hi; }
};

/// Sign-change brackets of the fitted slope across ratios, one per eps.
std::vector<SignBracket> sign_brackets(const std::vector<RunResult>& results);

/// Metadata describing a run (config echo plus derived and selected values).
Metadata run_metadata(const RunConfig& cfg, const RunResult& r);

/// Writes snapshot, front-trace and envelope CSVs under dir/<run id>/ and
/// returns the paths written.
std::vector<std::filesystem::path> write_run_artifacts(const RunConfig& cfg, const RunResult& r,
                                                       const std::filesystem::path& dir);

CsvTable verdict_table(const RunConfig& cfg, const std::vector<RunResult>& results);
CsvTable bracket_table(const RunConfig& cfg, const std::vector<SignBracket>& brackets);

/// Writes the failing state as CSV and returns its path.
std::filesystem::path dump_failure(const RunConfig& cfg, const NumericalFailure& f,
                                   const std::string& id, const std::filesystem::path& dir);

/// gnuplot scripts for the emitted CSVs. Throws std::runtime_error listing any
/// referenced file that does not exist.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir,
                                              const std::vector<RunResult>& results,
                                              bool sweep);

}  // namespace frontlab
