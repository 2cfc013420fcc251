#include "frontlab/model.hpp"

#include <cmath>
#include <numbers>

#include "frontlab/errors.hpp"

namespace frontlab {

void ModelParams::validate() const {
  if (n < 1) throw DomainError("model: n must be >= 1");
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("model: R must be positive");
  if (!(m > 1.0) || !std::isfinite(m)) throw DomainError("model: m must exceed 1");
}

double ModelParams::omega_n() const {
  // Exact for the two cases that appear most often.
  if (n == 1) return 2.0;
  if (n == 2) return std::numbers::pi;
  const double half = 0.5 * n;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

double ModelParams::R_n() const { return std::pow(R, n); }

double ModelParams::volume() const { return omega_n() * R_n(); }

MassData MassData::from_mass(const ModelParams& p, double total_mass) {
  if (!(total_mass >= 0.0)) throw DomainError("mass: total mass must be nonnegative");
  return {total_mass, total_mass / p.volume()};
}

MassData MassData::from_mu(const ModelParams& p, double mu) {
  if (!(mu >= 0.0)) throw DomainError("mass: mu must be nonnegative");
  return {mu * p.volume(), mu};
}

namespace detail {

double pow_inv_m1(double x, double m) {
  if (x == 0.0) return 0.0;
  if (m - 1.0 < 0.1) return std::exp(std::log(x) / (m - 1.0));
  return std::pow(x, 1.0 / (m - 1.0));
}

}  // namespace detail

namespace {

double from_log(double log_x, double m) { return std::exp(log_x / (m - 1.0)); }

void check_r1(const ModelParams& p, double r1) {
  if (!(r1 > 0.0 && r1 < p.R)) throw DomainError("threshold: r1 must lie in (0, R)");
}

}  // namespace

double a_crit(const ModelParams& p, const MassData& md, double r1) {
  p.validate();
  check_r1(p, r1);
  if (!(md.total_mass > 0.0)) throw DegenerateInputError("a_crit: total mass must be positive");
  const double n = p.n;
  const double m = p.m;
  const double edge = 1.0 - std::pow(r1 / p.R, n);
  if (m - 1.0 < 0.1) {
    const double log_x = std::log(md.total_mass) + std::log(edge) + std::log(m - 1.0) -
                         std::log(p.omega_n()) - (n - 1.0) * std::log(r1) - std::log(n);
    return from_log(log_x, m);
  }
  const double x = md.total_mass * edge * (m - 1.0) / (p.omega_n() * std::pow(r1, n - 1.0) * n);
  return std::pow(x, 1.0 / (m - 1.0));
}

double c_crit(const ModelParams& p, double mu, double r1) {
  p.validate();
  check_r1(p, r1);
  if (!(mu >= 0.0)) throw DomainError("c_crit: mu must be nonnegative");
  if (mu == 0.0) return 0.0;
  const double n = p.n;
  const double m = p.m;
  const double span = p.R_n() - std::pow(r1, n);
  if (m - 1.0 < 0.1) {
    const double log_x = std::log(mu) + std::log(span) + std::log(m - 1.0) -
                         (2.0 * n - 2.0) * std::log(r1) - 2.0 * std::log(n);
    return (m - 1.0) / m * from_log(log_x, m);
  }
  const double x = mu * span * (m - 1.0) / (std::pow(r1, 2.0 * n - 2.0) * n * n);
  return (m - 1.0) / m * std::pow(x, 1.0 / (m - 1.0));
}

double tail_to_mass_coefficient(const ModelParams& p, double A, double r0, double r1,
                                TailDirection direction) {
  p.validate();
  if (!(r0 > 0.0 && r0 <= r1 && r1 < p.R))
    throw DomainError("tail_to_mass_coefficient: need 0 < r0 <= r1 < R");
  if (!(A >= 0.0)) throw DomainError("tail_to_mass_coefficient: A must be nonnegative");
  if (A == 0.0) return 0.0;
  const double n = p.n;
  const double m = p.m;
  // Shrink uses the inner radius in the negative power, expand the outer one.
  const double r_neg = direction == TailDirection::Shrink ? r0 : r1;
  const double r_pos = direction == TailDirection::Shrink ? r1 : r0;
  const double log_c = std::log(A) - std::log(n) / (m - 1.0) -
                       (n - 1.0) * m / (m - 1.0) * std::log(r_neg) +
                       (n - 1.0) * std::log(r_pos);
  return std::exp(log_c) * (m - 1.0) / m;
}

}  // namespace frontlab
