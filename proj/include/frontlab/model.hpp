#pragma once

// Problem constants and the critical thresholds that separate initial support
// shrinking from expansion for the radial degenerate Keller-Segel system.

namespace frontlab {

/// Fixed problem constants: spatial dimension n, ball radius R, diffusion
/// exponent m > 1.
struct ModelParams {
  int n = 1;
  double R = 1.0;
  double m = 2.0;

  /// Throws DomainError unless n >= 1, R > 0, m > 1.
  void validate() const;

  /// Volume of the n-dimensional unit ball, pi^(n/2) / Gamma(n/2 + 1).
  double omega_n() const;
  /// R^n, the right end of the mass-accumulation coordinate.
  double R_n() const;
  /// |Omega| = omega_n R^n.
  double volume() const;
};

/// Total mass of the initial density and the induced mean density mu.
struct MassData {
  double total_mass = 0.0;
  double mu = 0.0;

  static MassData from_mass(const ModelParams& p, double total_mass);
  static MassData from_mu(const ModelParams& p, double mu);
};

enum class TailDirection { Shrink, Expand };

/// Critical tail coefficient A_crit for u0 ~ A (r1 - r)^(1/(m-1)).
/// Throws DomainError if r1 is not in (0, R) and DegenerateInputError for zero mass.
double a_crit(const ModelParams& p, const MassData& md, double r1);

/// Critical coefficient C_crit(r1) of (r1^n - s)^(m/(m-1)) in the
/// mass-accumulation variable.
double c_crit(const ModelParams& p, double mu, double r1);

/// Maps a density tail coefficient A on (r0, r1) to the coefficient C of the
/// induced bound on w0: a lower bound for Shrink, an upper bound for Expand.
/// r0 == r1 is admitted as the limit where both directions coincide.
double tail_to_mass_coefficient(const ModelParams& p, double A, double r0, double r1,
                                TailDirection direction);

namespace detail {
/// x^(1/(m-1)) for x >= 0, evaluated in the log domain when m-1 < 0.1 so
/// that large intermediate powers do not overflow.
double pow_inv_m1(double x, double m);
}  // namespace detail

}  // namespace frontlab
