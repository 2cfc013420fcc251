#pragma once

// Randomized invariant suites behind `frontlab verify` and the acceptance
// binary. Each suite reports pass/fail plus a CSV of its individual checks.

#include <cstdint>
#include <string>
#include <vector>

#include "frontlab/io.hpp"

namespace frontlab {

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::string detail;
  CsvTable table;
};

/// tail_to_mass_coefficient(a_crit, r0 = r1) against c_crit over random
/// (n, m, r1, mass); relative deviation <= 1e-12.
SuiteResult suite_threshold_identity(std::uint64_t seed, int draws = 100);

/// n=1, R=1, m=2, mass 2: A_crit = 0.5, C_crit(0.5) = 0.25 to 1e-15.
SuiteResult suite_worked_values();

/// Initial bounds from exact tails hold in both directions, and fail after
/// moving C by 5% toward the wrong side.
SuiteResult suite_initial_bounds(std::uint64_t seed, int draws = 50, std::size_t cells = 65536);

/// Sign certificates of the comparison families and C^1 matching at the kink.
SuiteResult suite_certification(std::uint64_t seed, int per_kind = 20);

/// Boundary-ordering arithmetic of the two comparison procedures.
SuiteResult suite_boundary_ordering(std::uint64_t seed, int draws = 20);

/// The subsolution selector must refuse a coefficient above the threshold.
SuiteResult suite_injected_fault();

/// w = mu s is a fixed point of the explicit step.
SuiteResult suite_steady_state(std::size_t steps = 10000);

std::vector<SuiteResult> run_verify_suites(std::uint64_t seed, std::size_t bound_cells = 65536);

}  // namespace frontlab
