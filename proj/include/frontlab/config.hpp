#pragma once

// Run configuration: INI text with [model], [profile], [numerics],
// [experiment] and [output] sections. Lists are comma separated.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "frontlab/io.hpp"
#include "frontlab/model.hpp"

namespace frontlab {

enum class Mode { Simulate, Sweep, Verify, Baseline };

const char* to_string(Mode m);

enum class ProfileShape { Tail, Constant };

struct ProfileConfig {
  ProfileShape shape = ProfileShape::Tail;
  double target_mass = 2.0;
  double r1 = 0.5;
  double r0 = 0.1;
  double r_plateau = 0.05;
  double alpha = 1.0;
  /// Exactly one of A and A_ratio is set for tail profiles.
  std::optional<double> A;
  std::optional<double> A_ratio;
  /// Explicit plateau height; calibrated from target_mass when absent.
  std::optional<double> B;
};

struct NumericsConfig {
  std::size_t cells = 2048;
  std::vector<double> eps{1e-2, 1e-3, 1e-4};
  double safety = 0.45;
  double horizon = 0.013;
  std::size_t outputs = 52;
  /// Band used for verdicts.
  double tau = 1e-6;
  /// Additional bands reported alongside.
  std::vector<double> tau_ladder{1e-5, 1e-6, 1e-7};
  std::size_t max_steps = 10'000'000;
};

struct ExperimentConfig {
  Mode mode = Mode::Simulate;
  /// True when the file sets `mode` itself.
  bool mode_explicit = false;
  std::vector<double> ratios{0.25, 0.5, 0.75, 1.5, 2.0, 4.0};
  /// Fit window as fractions of the horizon.
  double fit_start = 0.1;
  double fit_end = 0.6;
  double min_cells = 3.0;
  bool taxis = true;
  bool envelope = true;
  /// Second baseline profile exponent, between 1/(m-1) and 2/(m-1).
  double baseline_alpha = 1.5;
  /// Amplitude of that profile relative to A_crit; defaults to the main profile's.
  std::optional<double> baseline_ratio;
  std::uint64_t seed = 20240521;
  /// Verify mode: cells of the grid used for the initial-bound suite.
  std::size_t verify_cells = 65536;
};

struct OutputConfig {
  std::filesystem::path dir = "frontlab-out";
  bool gnuplot = true;
  /// Write a snapshot CSV every `snapshot_stride` outputs (0 disables).
  std::size_t snapshot_stride = 4;
};

struct RunConfig {
  ModelParams model;
  ProfileConfig profile;
  NumericsConfig numerics;
  ExperimentConfig experiment;
  OutputConfig output;
  /// Source text for reference in artifacts.
  std::string source;
};

/// Throws ConfigError on unknown sections/keys, malformed values or violated
/// preconditions. A given `mode` replaces the file's default mode; a file that
/// names a different mode is rejected.
RunConfig parse_config(const std::string& text, std::optional<Mode> mode = {});
RunConfig load_config(const std::filesystem::path& path, std::optional<Mode> mode = {});

/// Checks cross-field constraints, including that every band in use sits
/// below eps_min * kappa * (R^n - r1^n) / (mu R^n).
void validate(const RunConfig& cfg);

/// Resolved configuration as metadata lines (inputs plus derived thresholds).
Metadata echo(const RunConfig& cfg);

}  // namespace frontlab
