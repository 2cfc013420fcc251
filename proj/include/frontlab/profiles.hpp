#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "frontlab/model.hpp"

namespace frontlab {

/// One analytic piece of a radial density on [r_a, r_b].
struct Segment {
  enum class Kind { Zero, Plateau, Linear, PowerTail };

  Kind kind = Kind::Zero;
  double r_a = 0.0;
  double r_b = 0.0;
  /// Plateau: height. Linear: value at r_a. PowerTail: coefficient A.
  double a = 0.0;
  /// Linear: value at r_b. PowerTail: exponent alpha.
  double b = 0.0;
  /// PowerTail: the support edge r1 in A (r1 - r)^alpha.
  double edge = 0.0;

  double value(double r) const;
  /// n * integral_{r_a}^{r} rho^(n-1) u(rho) d rho for r in [r_a, r_b].
  double partial_mass(int n, double r) const;
};

/// Radially symmetric initial density, piecewise analytic on [0, R].
struct RadialProfile {
  std::vector<Segment> pieces;
  double r1 = 0.0;
  double R = 1.0;

  /// u0(r); zero outside [0, R].
  double operator()(double r) const;
  /// n * integral_0^r rho^(n-1) u0(rho) d rho, segment-exact.
  double accumulated(int n, double r) const;
  /// Throws DomainError unless the pieces partition [0, R] and are nonnegative.
  void validate() const;
  /// Sampled (r, u0(r)) table on `count` uniform radii in [0, R].
  std::vector<std::pair<double, double>> tabulate(std::size_t count) const;
};

/// Monotone discretization of the mass-accumulation function w(., t).
struct GridFunction {
  std::vector<double> s;
  std::vector<double> values;
  /// Pinned right boundary value mu R^n.
  double mu_Rn = 0.0;

  std::size_t size() const { return s.size(); }
  /// Throws DomainError unless s is strictly increasing with matching values.
  void validate_shape() const;
};

/// s_i = i * R^n / cells, i = 0..cells.
std::vector<double> uniform_s_grid(const ModelParams& p, std::size_t cells);

/// Plateau B on [0, r_plateau], linear ramp to the tail on [r_plateau, r0],
/// tail A (r1 - r)^alpha on [r0, r1], zero on [r1, R].
RadialProfile make_profile(const ModelParams& p, double B, double r_plateau, double A,
                           double alpha, double r0, double r1);

/// Constant density c on [0, R].
RadialProfile constant_profile(const ModelParams& p, double c);

/// Total mass of u0 over the ball.
double mass(const ModelParams& p, const RadialProfile& profile);

/// Plateau height B that gives make_profile(...) the requested total mass.
/// Throws InfeasibleError when the tail alone already exceeds the target.
double calibrate_plateau(const ModelParams& p, double target_mass, double A, double alpha,
                         double r_plateau, double r0, double r1);

GridFunction transform_to_w(const ModelParams& p, const RadialProfile& profile,
                            std::span<const double> s_grid);

struct RadialSample {
  double r;
  double u;
};

/// Cellwise difference quotient of w placed at r = (cell midpoint)^(1/n).
std::vector<RadialSample> derivative_to_u(const GridFunction& w, int n);

enum class BoundKind { Lower, Upper };

struct BoundReport {
  bool pass = true;
  std::size_t nodes_checked = 0;
  /// Most negative slack (w0 - bound for Lower, bound - w0 for Upper).
  double worst_slack = 0.0;
  double worst_s = 0.0;
};

/// Checks w0(s) >= mu R^n - C (r1^n - s)^(m/(m-1)) (Lower) or the reverse
/// (Upper) at every node strictly inside (r0^n, r1^n), with tolerance
/// 1e-12 mu R^n.
BoundReport check_initial_bound(const ModelParams& p, const GridFunction& w0, double C,
                                double r0, double r1, BoundKind kind);

}  // namespace frontlab
