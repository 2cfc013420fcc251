#pragma once

// Explicit sub- and supersolution families for the regularized
// mass-accumulation equation, the parameter selections that make them
// comparison functions, and the procedures that turn them into bounds on the
// free boundary.

#include <limits>
#include <string>
#include <vector>

#include "frontlab/model.hpp"

namespace frontlab {

enum class FamilyKind { Subsolution, Supersolution };

/// Value and derivatives of a family at one point.
struct FamilyJet {
  double w = 0.0;
  double w_s = 0.0;
  double w_ss = 0.0;
  double w_t = 0.0;
};

/// Piecewise power law with a linear (sub) or constant (super) extension
/// right of the kink rho(t) - delta.
struct ComparisonFamily {
  FamilyKind kind = FamilyKind::Subsolution;
  ModelParams p;
  double mu = 0.0;
  double A_coef = 0.0;
  double theta = 0.0;
  double r1 = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  /// Subsolution only.
  double eta = 0.0;
  double kappa = 0.0;
  /// Constant subtracted from the whole family.
  double vertical_shift = 0.0;
  double s_lo = 0.0;
  double s_hi = 0.0;
  double horizon = std::numeric_limits<double>::infinity();

  /// Moving reference point: r1^n - theta t (sub) or r1^n + theta t (super).
  double rho(double t) const;
  double kink(double t) const { return rho(t) - delta; }
  /// Continuous value; defined at the kink as well.
  double value(double s, double t) const;
  /// Throws KinkError within 1e-12 of the kink.
  FamilyJet jet(double s, double t) const;
  /// Closed forms of the two pieces, usable on either side of the kink.
  FamilyJet mid_piece(double s, double t) const;
  FamilyJet out_piece(double s, double t) const;
};

/// Kink offset of the subsolution, (eps kappa (m-1) / (A m))^(m-1).
double subsolution_delta(const ModelParams& p, double A_sub, double kappa, double eps);
/// Vertical offset eta(eps) = -A delta^(m/(m-1)) + eps kappa (R^n - r1^n + delta).
double subsolution_eta(const ModelParams& p, double A_sub, double kappa, double eps, double r1);
/// Kink offset of the supersolution, (eps (m-1) / (A m))^(m-1).
double supersolution_delta(const ModelParams& p, double A_sup, double eps);

/// Unvalidated constructors; the build_* functions below check admissibility.
ComparisonFamily make_subsolution(const ModelParams& p, double mu, double A_sub, double kappa,
                                  double theta, double r1, double eps, double r0,
                                  double vertical_shift = 0.0);
ComparisonFamily make_supersolution(const ModelParams& p, double mu, double A_sup, double theta,
                                    double r1, double eps, double r0);

struct SubsolutionSelection {
  ModelParams p;
  double mu = 0.0;
  double r1 = 0.0;
  double A_sub = 0.0;
  double c_crit = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double eps0 = 0.0;
  double theta_max = 0.0;
  /// Speed used for the moving family; satisfies the r2 speed condition.
  double theta = 0.0;
  double r_min = 0.0;
  double r2 = 0.0;
};

struct SupersolutionSelection {
  ModelParams p;
  double mu = 0.0;
  double r1 = 0.0;
  double A_sup = 0.0;
  double c_crit = 0.0;
  double r_min = 0.0;
  double theta = 0.0;
  double eps0 = 0.0;
  double T_bar = 0.0;
};

struct Predicate {
  std::string name;
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

std::vector<Predicate> subsolution_predicates(const SubsolutionSelection& sel);
std::vector<Predicate> supersolution_predicates(const SupersolutionSelection& sel);

/// Right-hand side of the supersolution coefficient condition at inner radius r0.
double supersolution_coefficient_floor(const ModelParams& p, double mu, double theta, double r0);

/// Requires 0 < A_sub < C_crit(r1); throws ThresholdError otherwise.
SubsolutionSelection select_subsolution_params(const ModelParams& p, double mu, double r1,
                                               double A_sub);
/// Requires A_sup > C_crit(r1); throws ThresholdError otherwise.
SupersolutionSelection select_supersolution_params(const ModelParams& p, double mu, double r1,
                                                   double A_sup);

ComparisonFamily build_subsolution(const SubsolutionSelection& sel, double eps, double r0,
                                   double theta, double vertical_shift = 0.0);
ComparisonFamily build_supersolution(const SupersolutionSelection& sel, double eps, double r0);

/// Epsilon -> 0 envelope mu R^n - coef (r1^n -+ theta t - s)_+^(m/(m-1)).
struct EnvelopeParams {
  TailDirection direction = TailDirection::Shrink;
  double mu_Rn = 0.0;
  double coef = 0.0;
  double r1n = 0.0;
  double theta = 0.0;
  double m = 2.0;
};

double limit_envelope(const EnvelopeParams& env, double t, double s);

/// Two-stage lower comparison for a mass-tail coefficient C < C_crit(r1).
struct ShrinkProcedure {
  double C = 0.0;
  /// Factor > 1 with A_sub = factor * C < C_crit.
  double factor = 0.0;
  SubsolutionSelection sel;
  double r_star = 0.0;
  /// Strict upper bound on the comparison horizon (minimum of the three caps).
  double T_cap = 0.0;
  /// Largest eps admitted (eps0 and the kink-offset cap).
  double eps1 = 0.0;

  /// First stage: theta = 0 on [r_star^n, R^n].
  ComparisonFamily stationary_family(double eps) const;
  /// Second stage: moving family shifted down by eps kappa (R^n - r2^n), on [r_star^n, r2^n].
  ComparisonFamily shrink_family(double eps) const;
  /// mu R^n - ((factor+1)/2) C (r1^n - r_star^n)^(m/(m-1)).
  double left_boundary_bound() const;
  EnvelopeParams envelope() const;
};

ShrinkProcedure plan_shrink(const ModelParams& p, double mu, double r1, double C, double r0);

/// Single-stage upper comparison for C > C_crit(r1).
struct ExpandProcedure {
  double C = 0.0;
  /// Factor > 1 with A_sup = C / factor > C_crit.
  double factor = 0.0;
  SupersolutionSelection sel;
  double r_star = 0.0;
  double T_cap = 0.0;
  double eps1 = 0.0;

  ComparisonFamily family(double eps) const;
  double left_boundary_bound() const;
  EnvelopeParams envelope() const;
};

ExpandProcedure plan_expand(const ModelParams& p, double mu, double r1, double C, double r0);

}  // namespace frontlab
