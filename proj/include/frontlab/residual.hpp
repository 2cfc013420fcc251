#pragma once

// The regularized operator
//   P w = w_t - n^2 s^(2-2/n) (w_s + eps)^(m-1) w_ss - w w_s + mu s w_s
// evaluated on closed-form comparison families and on grid functions.

#include <cstddef>
#include <vector>

#include "frontlab/comparison.hpp"
#include "frontlab/model.hpp"
#include "frontlab/profiles.hpp"

namespace frontlab {

struct OperatorInput {
  double eps = 0.1;
  ModelParams p;
  double mu = 1.0;

  /// Throws DomainError unless 0 < eps < 1 and p is valid.
  void validate() const;
};

/// Throws DomainError if w_s + eps <= 0.
double p_eps_pointwise(const OperatorInput& in, double w, double w_s, double w_ss, double w_t,
                       double s);

/// Residual of a family at (s, t); throws KinkError at the kink.
double p_eps_analytic(const OperatorInput& in, const ComparisonFamily& fam, double s, double t);

/// Required inequality for certify_sign. With g = slope_margin * w_s:
///   AtMost:  P w <= -g
///   AtLeast: P w >= g
struct SignBound {
  enum class Kind { AtMost, AtLeast };
  Kind kind = Kind::AtLeast;
  double slope_margin = 0.0;
};

struct Region {
  double s_a = 0.0;
  double s_b = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
};

struct CertSample {
  double s;
  double t;
  double residual;
  /// Signed distance to the required bound; negative means violated.
  double slack;
};

struct CertificationReport {
  bool pass = true;
  std::size_t samples = 0;
  std::size_t skipped_at_kink = 0;
  /// max |residual| over the samples.
  double scale = 0.0;
  double worst_slack = 0.0;
  double witness_s = 0.0;
  double witness_t = 0.0;
  /// Filled only when requested.
  std::vector<CertSample> rows;
};

struct CertifyOptions {
  std::size_t grid_s = 512;
  std::size_t grid_t = 64;
  std::size_t quasi_random = 10000;
  /// Slack admitted relative to the residual scale.
  double rel_tol = 1e-10;
  bool keep_rows = false;
};

/// Dense sampling of the residual on a tensor grid plus a Sobol sequence.
/// Points within 1e-12 of the kink are skipped. Empty regions pass.
CertificationReport certify_sign(const OperatorInput& in, const ComparisonFamily& fam,
                                 const Region& region, const SignBound& bound,
                                 const CertifyOptions& opts = {});

enum class Stencil {
  /// Central differences in s, forward in t, spatial terms at w_prev.
  Central,
  /// The explicit solver's own spatial operator.
  Scheme,
};

/// Residuals at interior nodes (index 0 corresponds to node 1).
/// Throws DomainError on grid mismatch or dt <= 0.
std::vector<double> p_eps_discrete(const OperatorInput& in, const GridFunction& w_prev,
                                   const GridFunction& w_next, double dt,
                                   Stencil stencil = Stencil::Central, bool taxis = true);

}  // namespace frontlab
