#include "frontlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "frontlab/errors.hpp"
#include "frontlab/format.hpp"

namespace frontlab {

namespace {

// Scratch buffers and precomputed weights for one grid. prepare() evaluates
// the half-node slopes and fluxes of the current state and returns the
// stability limit; apply() then advances in place.
class Stepper {
 public:
  Stepper(const OperatorInput& op, const GridFunction& w, bool taxis)
      : taxis_(taxis), eps_(op.eps), m_(op.p.m) {
    const std::size_t N = w.size() - 1;
    ds_ = w.s[N] / static_cast<double>(N);
    weight_.resize(N + 1);
    drift_.resize(N + 1);
    const double expo = 2.0 - 2.0 / op.p.n;
    const double n2 = static_cast<double>(op.p.n) * op.p.n;
    for (std::size_t i = 0; i <= N; ++i) {
      weight_[i] = op.p.n == 1 ? 1.0 : n2 * std::pow(w.s[i], expo);
      drift_[i] = op.mu * w.s[i];
    }
    slope_.resize(N);
    phi_.resize(N);
    dphi_.resize(N);
    const double k = m_ - 1.0;
    int_power_ = (k == std::floor(k) && k <= 8.0) ? static_cast<int>(k) : 0;
  }

  double prepare(const std::vector<double>& w) {
    const std::size_t N = slope_.size();
    const double inv_ds = 1.0 / ds_;
    const double inv_m = 1.0 / m_;
    for (std::size_t j = 0; j < N; ++j) {
      const double u = (w[j + 1] - w[j]) * inv_ds;
      const double x = u + eps_;
      double d;
      if (int_power_ == 1) {
        d = x;
      } else if (int_power_ > 1) {
        d = x;
        for (int q = 1; q < int_power_; ++q) d *= x;
      } else {
        d = std::pow(x, m_ - 1.0);
      }
      slope_[j] = u;
      dphi_[j] = d;
      phi_[j] = d * x * inv_m;
    }
    double diff_cap = std::numeric_limits<double>::infinity();
    double adv_cap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < N; ++i) {
      const double coef = weight_[i] * std::max(dphi_[i - 1], dphi_[i]);
      diff_cap = std::min(diff_cap, ds_ * ds_ / (2.0 * coef));
      if (taxis_) adv_cap = std::min(adv_cap, ds_ / (std::abs(w[i] - drift_[i]) + 1e-300));
    }
    return std::min(diff_cap, adv_cap);
  }

  double rate(const std::vector<double>& w, std::size_t i) const {
    double r = weight_[i] * (phi_[i] - phi_[i - 1]) / ds_;
    if (taxis_) {
      const double c = w[i] - drift_[i];
      r += c * (c > 0.0 ? slope_[i] : slope_[i - 1]);
    }
    return r;
  }

  // Returns false if a non-finite value appeared.
  bool apply(std::vector<double>& w, double dt) const {
    const std::size_t N = slope_.size();
    bool finite = true;
    for (std::size_t i = 1; i < N; ++i) {
      w[i] += dt * rate(w, i);
      finite = finite && std::isfinite(w[i]);
    }
    return finite;
  }

 private:
  bool taxis_;
  double eps_;
  double m_;
  double ds_ = 0.0;
  int int_power_ = 0;
  std::vector<double> weight_;
  std::vector<double> drift_;
  std::vector<double> slope_;
  std::vector<double> phi_;
  std::vector<double> dphi_;
};

void pin_and_repair(SolverState& state) {
  auto& w = state.grid.values;
  const std::size_t N = w.size() - 1;
  w[0] = 0.0;
  w[N] = state.grid.mu_Rn;
  double removed = 0.0;
  for (std::size_t i = N; i-- > 0;) {
    if (w[i] > w[i + 1]) {
      removed += w[i] - w[i + 1];
      w[i] = w[i + 1];
      ++state.stats.repair_events;
    }
  }
  state.stats.repair_total += removed;
  state.stats.repair_max_step = std::max(state.stats.repair_max_step, removed);
}

void advance(SolverState& state, Stepper& stepper, double dt, double limit) {
  if (!stepper.apply(state.grid.values, dt))
    throw NumericalFailure("non-finite value after step", state.t + dt, state.grid.s,
                           state.grid.values);
  pin_and_repair(state);
  state.t += dt;
  ++state.stats.steps;
  state.stats.last_dt = dt;
  state.stats.max_cfl_ratio = std::max(state.stats.max_cfl_ratio, dt / limit);
}

}  // namespace

SolverState make_state(const OperatorInput& op, GridFunction w0, double t0) {
  op.validate();
  w0.validate_shape();
  const std::size_t N = w0.size() - 1;
  if (N < 2) throw DomainError("make_state: need at least two cells");
  const double Rn = op.p.R_n();
  const double ds = Rn / static_cast<double>(N);
  for (std::size_t i = 0; i <= N; ++i)
    if (std::abs(w0.s[i] - ds * static_cast<double>(i)) > 1e-9 * Rn)
      throw DomainError("make_state: s-grid must be uniform on [0, R^n]");
  const double top = op.mu * Rn;
  if (std::abs(w0.mu_Rn - top) > 1e-10 * std::max(top, 1.0))
    throw DomainError("make_state: pinned right value does not match mu R^n");
  const double tol = 1e-12 * std::max(top, 1.0);
  if (std::abs(w0.values[0]) > tol || std::abs(w0.values[N] - w0.mu_Rn) > tol)
    throw DomainError("make_state: endpoints are not pinned at 0 and mu R^n");
  for (std::size_t i = 0; i < N; ++i)
    if (w0.values[i + 1] < w0.values[i] - tol)
      throw DomainError("make_state: w0 is not nondecreasing");
  SolverState st;
  st.op = op;
  st.grid = std::move(w0);
  st.grid.values[0] = 0.0;
  st.grid.values[N] = st.grid.mu_Rn;
  st.t = t0;
  return st;
}

double cfl_dt(const SolverState& state, double safety, bool taxis) {
  if (!(safety > 0.0 && safety <= 1.0)) throw DomainError("cfl_dt: safety must lie in (0, 1]");
  Stepper stepper(state.op, state.grid, taxis);
  return safety * stepper.prepare(state.grid.values);
}

void step(SolverState& state, double dt, bool taxis) {
  if (!(dt > 0.0)) throw DomainError("step: dt must be positive");
  Stepper stepper(state.op, state.grid, taxis);
  const double limit = stepper.prepare(state.grid.values);
  if (dt > limit * (1.0 + 1e-12)) throw StepRejected("step: dt exceeds the stability limit");
  advance(state, stepper, dt, limit);
}

std::vector<double> scheme_rhs(const OperatorInput& op, const GridFunction& w, bool taxis) {
  Stepper stepper(op, w, taxis);
  stepper.prepare(w.values);
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t i = 1; i + 1 < w.size(); ++i) out[i] = stepper.rate(w.values, i);
  return out;
}

Trajectory integrate(const OperatorInput& op, const GridFunction& w0, double horizon,
                     const std::vector<double>& output_times, const SolverOptions& opts) {
  if (!(horizon > 0.0)) throw DomainError("integrate: horizon must be positive");
  if (!(opts.safety > 0.0 && opts.safety <= 1.0))
    throw DomainError("integrate: safety must lie in (0, 1]");
  for (std::size_t k = 0; k < output_times.size(); ++k) {
    if (output_times[k] < 0.0 || output_times[k] > horizon)
      throw DomainError("integrate: output time outside [0, horizon]");
    if (k > 0 && output_times[k] <= output_times[k - 1])
      throw DomainError("integrate: output times must be strictly increasing");
  }

  SolverState state = make_state(op, w0);
  Stepper stepper(op, state.grid, opts.taxis);
  Trajectory traj;
  traj.echo = {{"n", fmt_int(op.p.n)},
               {"R", fmt_double(op.p.R)},
               {"m", fmt_double(op.p.m)},
               {"eps", fmt_double(op.eps)},
               {"mu", fmt_double(op.mu)},
               {"cells", fmt_int(static_cast<long long>(state.grid.size() - 1))},
               {"safety", fmt_double(opts.safety)},
               {"taxis", opts.taxis ? "on" : "off"},
               {"horizon", fmt_double(horizon)}};

  std::vector<double> stops = output_times;
  if (stops.empty() || stops.back() < horizon) stops.push_back(horizon);
  const std::size_t n_requested = output_times.size();

  for (std::size_t k = 0; k < stops.size(); ++k) {
    const double target = stops[k];
    while (state.t < target) {
      if (state.stats.steps >= opts.max_steps)
        throw BudgetError("integrate: step budget exhausted");
      const double limit = stepper.prepare(state.grid.values);
      double dt = opts.safety * limit;
      const bool lands = state.t + dt >= target;
      if (lands) dt = target - state.t;
      advance(state, stepper, dt, limit);
      if (lands) state.t = target;
    }
    if (k < n_requested) traj.snapshots.push_back({state.t, state.grid});
  }
  traj.stats = state.stats;
  return traj;
}

Trajectory integrate_pme_baseline(const OperatorInput& op, const GridFunction& w0,
                                  double horizon, const std::vector<double>& output_times,
                                  SolverOptions opts) {
  opts.taxis = false;
  return integrate(op, w0, horizon, output_times, opts);
}

std::vector<double> uniform_output_times(double horizon, std::size_t n_out) {
  std::vector<double> out(n_out + 1);
  for (std::size_t k = 0; k <= n_out; ++k)
    out[k] = k == n_out ? horizon : horizon * static_cast<double>(k) / static_cast<double>(n_out);
  return out;
}

}  // namespace frontlab
