#include "frontlab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <thread>

#include "frontlab/errors.hpp"
#include "frontlab/format.hpp"

namespace frontlab {

namespace {

std::string tau_tag(double tau) { return "tau" + fmt_double(tau); }

std::vector<std::size_t> snapshot_indices(const RunResult& r, std::size_t stride) {
  std::vector<std::size_t> out;
  const std::size_t count = r.traj.snapshots.size();
  if (stride == 0 || count == 0) return out;
  for (std::size_t k = 0; k < count; k += stride) out.push_back(k);
  if (out.back() != count - 1) out.push_back(count - 1);
  return out;
}

std::string snapshot_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "snapshot_%04zu.csv", k);
  return buf;
}

std::string front_name(double tau) { return "front_" + tau_tag(tau) + ".csv"; }

}  // namespace

PreparedProfile prepare_profile(const RunConfig& cfg, double A, double alpha) {
  const auto& p = cfg.model;
  const auto& pr = cfg.profile;
  PreparedProfile out;
  out.A = A;
  out.alpha = alpha;
  if (pr.shape == ProfileShape::Constant) {
    out.profile = constant_profile(p, pr.target_mass / p.volume());
    out.B = pr.target_mass / p.volume();
  } else {
    out.B = pr.B ? *pr.B : calibrate_plateau(p, pr.target_mass, A, alpha, pr.r_plateau, pr.r0, pr.r1);
    out.profile = make_profile(p, out.B, pr.r_plateau, A, alpha, pr.r0, pr.r1);
  }
  out.mass = MassData::from_mass(p, mass(p, out.profile));
  out.w0 = transform_to_w(p, out.profile, uniform_s_grid(p, cfg.numerics.cells));
  if (pr.shape == ProfileShape::Tail) {
    out.A_crit = a_crit(p, out.mass, pr.r1);
    out.C_crit = c_crit(p, out.mass.mu, pr.r1);
  }
  return out;
}

std::optional<EnvelopeOutcome> plan_envelope(const RunConfig& cfg, const RunSpec& spec,
                                             const PreparedProfile& prep) {
  const auto& p = cfg.model;
  const auto& pr = cfg.profile;
  if (!cfg.experiment.envelope || !spec.taxis || pr.shape != ProfileShape::Tail) return {};
  if (std::abs(spec.alpha - 1.0 / (p.m - 1.0)) > 1e-12) return {};

  const double mu = prep.mass.mu;
  const double r1n = std::pow(pr.r1, p.n);
  const double horizon = cfg.numerics.horizon;
  EnvelopeOutcome out;
  const double c_shrink = tail_to_mass_coefficient(p, spec.A, pr.r0, pr.r1, TailDirection::Shrink);
  const double c_expand = tail_to_mass_coefficient(p, spec.A, pr.r0, pr.r1, TailDirection::Expand);
  if (c_shrink < prep.C_crit) {
    const auto proc = plan_shrink(p, mu, pr.r1, c_shrink, pr.r0);
    out.direction = BoundKind::Lower;
    out.env = proc.envelope();
    out.window = {std::pow(proc.r_star, p.n), r1n, 0.0, std::min(horizon, 0.99 * proc.T_cap)};
    out.left_bound = proc.left_boundary_bound();
    const auto& s = proc.sel;
    out.params = {{"envelope.kind", "lower"},
                  {"envelope.C", fmt_double(proc.C)},
                  {"envelope.factor", fmt_double(proc.factor)},
                  {"envelope.coef", fmt_double(out.env.coef)},
                  {"envelope.theta", fmt_double(s.theta)},
                  {"selection.A_sub", fmt_double(s.A_sub)},
                  {"selection.kappa", fmt_double(s.kappa)},
                  {"selection.lambda", fmt_double(s.lambda)},
                  {"selection.eps0", fmt_double(s.eps0)},
                  {"selection.theta_max", fmt_double(s.theta_max)},
                  {"selection.r_min", fmt_double(s.r_min)},
                  {"selection.r2", fmt_double(s.r2)},
                  {"procedure.r_star", fmt_double(proc.r_star)},
                  {"procedure.T_cap", fmt_double(proc.T_cap)},
                  {"procedure.eps1", fmt_double(proc.eps1)}};
  } else if (c_expand > prep.C_crit) {
    const auto proc = plan_expand(p, mu, pr.r1, c_expand, pr.r0);
    out.direction = BoundKind::Upper;
    out.env = proc.envelope();
    out.window = {std::pow(proc.r_star, p.n), r1n, 0.0, std::min(horizon, 0.99 * proc.T_cap)};
    out.left_bound = proc.left_boundary_bound();
    const auto& s = proc.sel;
    out.params = {{"envelope.kind", "upper"},
                  {"envelope.C", fmt_double(proc.C)},
                  {"envelope.factor", fmt_double(proc.factor)},
                  {"envelope.coef", fmt_double(out.env.coef)},
                  {"envelope.theta", fmt_double(s.theta)},
                  {"selection.A_sup", fmt_double(s.A_sup)},
                  {"selection.eps0", fmt_double(s.eps0)},
                  {"selection.r_min", fmt_double(s.r_min)},
                  {"selection.T_bar", fmt_double(s.T_bar)},
                  {"procedure.r_star", fmt_double(proc.r_star)},
                  {"procedure.T_cap", fmt_double(proc.T_cap)},
                  {"procedure.eps1", fmt_double(proc.eps1)}};
  } else {
    return {};
  }
  return out;
}

double left_boundary_hold(const Trajectory& traj, double s, double bound, BoundKind kind) {
  double held = 0.0;
  for (const auto& snap : traj.snapshots) {
    const auto& g = snap.grid;
    const auto it = std::upper_bound(g.s.begin(), g.s.end(), s);
    const std::size_t j = std::clamp<std::size_t>(it - g.s.begin(), 1, g.s.size() - 1);
    const double th = (s - g.s[j - 1]) / (g.s[j] - g.s[j - 1]);
    const double w = (1.0 - th) * g.values[j - 1] + th * g.values[j];
    const double tol = 1e-12 * g.mu_Rn;
    if (kind == BoundKind::Lower ? w < bound - tol : w > bound + tol) break;
    held = snap.t;
  }
  return held;
}

RunResult execute_run(const RunConfig& cfg, const RunSpec& spec) {
  RunResult r;
  r.spec = spec;
  r.prep = prepare_profile(cfg, spec.A, spec.alpha);
  const auto& nu = cfg.numerics;
  const OperatorInput op{spec.eps, cfg.model, r.prep.mass.mu};
  SolverOptions opts;
  opts.safety = nu.safety;
  opts.taxis = spec.taxis;
  opts.max_steps = nu.max_steps;
  r.traj = integrate(op, r.prep.w0, nu.horizon, uniform_output_times(nu.horizon, nu.outputs), opts);

  std::vector<double> taus{nu.tau};
  for (double t : nu.tau_ladder)
    if (std::find(taus.begin(), taus.end(), t) == taus.end()) taus.push_back(t);
  const auto& ex = cfg.experiment;
  for (double tau : taus) {
    BandVerdict b;
    b.tau = tau;
    b.trace = front_trace(r.traj, tau, cfg.model.n, spec.id);
    try {
      b.verdict = estimate_speed(b.trace, ex.fit_start * nu.horizon, ex.fit_end * nu.horizon,
                                 ex.min_cells);
    } catch (const WindowError& e) {
      b.error = e.what();
    }
    r.bands.push_back(std::move(b));
  }

  r.envelope = plan_envelope(cfg, spec, r.prep);
  if (r.envelope) {
    auto& e = *r.envelope;
    e.left_hold_t = left_boundary_hold(r.traj, e.window.s_lo, e.left_bound, e.direction);
    e.window.t_hi = std::min(e.window.t_hi, e.left_hold_t);
    e.params.push_back({"procedure.left_bound", fmt_double(e.left_bound)});
    e.params.push_back({"procedure.left_hold_t", fmt_double(e.left_hold_t)});
    e.report = envelope_check(r.traj, e.env, e.direction, e.window);
  }
  return r;
}

std::vector<RunResult> execute_runs(const RunConfig& cfg, const std::vector<RunSpec>& specs,
                                    unsigned jobs) {
  std::vector<RunResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < specs.size(); k = next++) {
      try {
        results[k] = execute_run(cfg, specs[k]);
      } catch (const std::exception& e) {
        results[k].spec = specs[k];
        results[k].error = e.what();
        results[k].failure = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(specs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return results;
}

std::string run_id(double ratio, double eps, bool taxis, double alpha) {
  return "r" + fmt_double(ratio) + "_e" + fmt_double(eps) + (taxis ? "_ks" : "_pme") + "_a" +
         fmt_double(alpha);
}

namespace {

double crit_amplitude(const RunConfig& cfg) {
  const auto massd = MassData::from_mass(cfg.model, cfg.profile.target_mass);
  return a_crit(cfg.model, massd, cfg.profile.r1);
}

RunSpec make_spec(const RunConfig& cfg, double A, double alpha, double eps, bool taxis) {
  RunSpec s;
  const double ac = crit_amplitude(cfg);
  s.A = A;
  s.ratio = A / ac;
  s.alpha = alpha;
  s.eps = eps;
  s.taxis = taxis;
  s.id = run_id(s.ratio, eps, taxis, alpha);
  return s;
}

double configured_amplitude(const RunConfig& cfg) {
  const auto& pr = cfg.profile;
  return pr.A ? *pr.A : *pr.A_ratio * crit_amplitude(cfg);
}

}  // namespace

std::vector<RunSpec> simulate_specs(const RunConfig& cfg) {
  std::vector<RunSpec> out;
  const bool tail = cfg.profile.shape == ProfileShape::Tail;
  for (double eps : cfg.numerics.eps) {
    if (tail) {
      out.push_back(make_spec(cfg, configured_amplitude(cfg), cfg.profile.alpha, eps,
                              cfg.experiment.taxis));
    } else {
      RunSpec s;
      s.eps = eps;
      s.taxis = cfg.experiment.taxis;
      s.alpha = 0.0;
      s.id = "constant_e" + fmt_double(eps) + (s.taxis ? "_ks" : "_pme");
      out.push_back(s);
    }
  }
  return out;
}

std::vector<RunSpec> sweep_specs(const RunConfig& cfg) {
  std::vector<RunSpec> out;
  const double ac = crit_amplitude(cfg);
  for (double ratio : cfg.experiment.ratios)
    for (double eps : cfg.numerics.eps) {
      auto s = make_spec(cfg, ratio * ac, cfg.profile.alpha, eps, true);
      s.ratio = ratio;
      s.id = run_id(ratio, eps, true, cfg.profile.alpha);
      out.push_back(s);
    }
  return out;
}

std::vector<RunSpec> baseline_specs(const RunConfig& cfg) {
  std::vector<RunSpec> out;
  const double A = configured_amplitude(cfg);
  const auto& ex = cfg.experiment;
  const double A_steep = ex.baseline_ratio ? *ex.baseline_ratio * crit_amplitude(cfg) : A;
  for (double eps : cfg.numerics.eps) {
    out.push_back(make_spec(cfg, A, cfg.profile.alpha, eps, true));
    out.push_back(make_spec(cfg, A, cfg.profile.alpha, eps, false));
    out.push_back(make_spec(cfg, A_steep, ex.baseline_alpha, eps, false));
  }
  return out;
}

std::vector<SignBracket> sign_brackets(const std::vector<RunResult>& results) {
  std::vector<double> eps_order;
  std::map<double, std::vector<std::pair<double, double>>> by_eps;
  for (const auto& r : results) {
    if (!r.error.empty() || !r.spec.taxis) continue;
    const auto* b = r.primary();
    if (!b || !b->verdict) continue;
    if (!by_eps.count(r.spec.eps)) eps_order.push_back(r.spec.eps);
    by_eps[r.spec.eps].push_back({r.spec.ratio, b->verdict->slope});
  }
  std::vector<SignBracket> out;
  for (double eps : eps_order) {
    auto rows = by_eps[eps];
    std::sort(rows.begin(), rows.end());
    SignBracket br;
    br.eps = eps;
    for (const auto& [ratio, slope] : rows)
      if (slope > 0.0) {
        br.hi = ratio;
        break;
      }
    for (const auto& [ratio, slope] : rows)
      if (slope < 0.0 && (!br.hi || ratio < *br.hi)) br.lo = ratio;
    out.push_back(br);
  }
  return out;
}

Metadata run_metadata(const RunConfig& cfg, const RunResult& r) {
  Metadata md = echo(cfg);
  const auto& s = r.spec;
  md.insert(md.end(), {{"run.id", s.id},
                       {"run.ratio", fmt_double(s.ratio)},
                       {"run.A", fmt_double(s.A)},
                       {"run.alpha", fmt_double(s.alpha)},
                       {"run.eps", fmt_double(s.eps)},
                       {"run.taxis", s.taxis ? "yes" : "no"},
                       {"run.B", fmt_double(r.prep.B)},
                       {"run.mass", fmt_double(r.prep.mass.total_mass)},
                       {"run.mu", fmt_double(r.prep.mass.mu)},
                       {"run.A_crit", fmt_double(r.prep.A_crit)},
                       {"run.C_crit", fmt_double(r.prep.C_crit)}});
  for (const auto& [k, v] : r.traj.echo) md.push_back({"solver." + k, v});
  md.push_back({"solver.steps", fmt_int(static_cast<long long>(r.traj.stats.steps))});
  md.push_back({"solver.max_cfl_ratio", fmt_double(r.traj.stats.max_cfl_ratio)});
  md.push_back({"solver.repair_events", fmt_int(static_cast<long long>(r.traj.stats.repair_events))});
  md.push_back({"solver.repair_total", fmt_double(r.traj.stats.repair_total)});
  if (r.envelope) md.insert(md.end(), r.envelope->params.begin(), r.envelope->params.end());
  return md;
}

std::vector<std::filesystem::path> write_run_artifacts(const RunConfig& cfg, const RunResult& r,
                                                       const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const auto base = dir / r.spec.id;
  const Metadata md = run_metadata(cfg, r);

  for (std::size_t k : snapshot_indices(r, cfg.output.snapshot_stride)) {
    const auto& snap = r.traj.snapshots[k];
    CsvTable t;
    t.meta = md;
    t.meta.push_back({"snapshot.index", fmt_int(static_cast<long long>(k))});
    t.meta.push_back({"snapshot.t", fmt_double(snap.t)});
    t.columns = {"s", "w"};
    for (std::size_t i = 0; i < snap.grid.size(); ++i)
      t.add_numeric_row({snap.grid.s[i], snap.grid.values[i]});
    written.push_back(base / snapshot_name(k));
    write_csv(written.back(), t);
  }

  for (const auto& b : r.bands) {
    CsvTable t;
    t.meta = md;
    t.meta.push_back({"front.tau", fmt_double(b.tau)});
    if (b.verdict) {
      t.meta.push_back({"front.classification", to_string(b.verdict->classification)});
      t.meta.push_back({"front.slope", fmt_double(b.verdict->slope)});
      t.meta.push_back({"front.displacement_cells", fmt_double(b.verdict->displacement_cells)});
    } else {
      t.meta.push_back({"front.error", b.error});
    }
    t.columns = {"t", "s_front", "r_front"};
    for (const auto& e : b.trace.entries) t.add_numeric_row({e.t, e.s_front, e.r_front});
    written.push_back(base / front_name(b.tau));
    write_csv(written.back(), t);
  }

  if (r.envelope) {
    const auto& e = *r.envelope;
    CsvTable t;
    t.meta = md;
    t.meta.push_back({"window.s_lo", fmt_double(e.window.s_lo)});
    t.meta.push_back({"window.s_hi", fmt_double(e.window.s_hi)});
    t.meta.push_back({"window.t_lo", fmt_double(e.window.t_lo)});
    t.meta.push_back({"window.t_hi", fmt_double(e.window.t_hi)});
    t.columns = {"direction", "pass", "snapshots", "nodes", "worst_excess", "worst_gap",
                 "tolerance", "witness_t", "witness_s"};
    const auto& rep = e.report;
    t.add_row({e.direction == BoundKind::Lower ? "lower" : "upper", rep.pass ? "pass" : "fail",
               fmt_int(static_cast<long long>(rep.snapshots_checked)),
               fmt_int(static_cast<long long>(rep.nodes_checked)), fmt_double(rep.worst_excess),
               fmt_double(rep.worst_gap), fmt_double(rep.tolerance_at_worst),
               fmt_double(rep.witness_t), fmt_double(rep.witness_s)});
    written.push_back(base / "envelope.csv");
    write_csv(written.back(), t);
  }
  return written;
}

CsvTable verdict_table(const RunConfig& cfg, const std::vector<RunResult>& results) {
  CsvTable t;
  t.meta = echo(cfg);
  t.columns = {"run_id", "ratio", "A", "alpha", "eps", "taxis", "tau", "classification", "zeta",
               "slope", "fit_residual", "displacement_cells", "entries", "steps",
               "repair_total", "envelope", "error"};
  for (const auto& r : results) {
    const auto& s = r.spec;
    const std::string env =
        r.envelope ? (r.envelope->report.pass ? "pass" : "fail") : std::string("n/a");
    if (!r.error.empty() || r.bands.empty()) {
      t.add_row({s.id, fmt_double(s.ratio), fmt_double(s.A), fmt_double(s.alpha),
                 fmt_double(s.eps), s.taxis ? "yes" : "no", "", "", "", "", "", "", "", "", "",
                 env, r.error});
      continue;
    }
    for (const auto& b : r.bands) {
      std::vector<std::string> row{s.id, fmt_double(s.ratio), fmt_double(s.A), fmt_double(s.alpha),
                                   fmt_double(s.eps), s.taxis ? "yes" : "no", fmt_double(b.tau)};
      if (b.verdict) {
        const auto& v = *b.verdict;
        row.insert(row.end(), {to_string(v.classification), fmt_double(v.zeta), fmt_double(v.slope),
                               fmt_double(v.fit_residual), fmt_double(v.displacement_cells),
                               fmt_int(static_cast<long long>(v.entries))});
      } else {
        row.insert(row.end(), {"", "", "", "", "", ""});
      }
      row.insert(row.end(), {fmt_int(static_cast<long long>(r.traj.stats.steps)),
                             fmt_double(r.traj.stats.repair_total), env, b.error});
      t.add_row(std::move(row));
    }
  }
  return t;
}

CsvTable bracket_table(const RunConfig& cfg, const std::vector<SignBracket>& brackets) {
  CsvTable t;
  t.meta = echo(cfg);
  t.columns = {"eps", "lo", "hi", "half_width", "contains_one"};
  for (const auto& b : brackets) {
    const std::string half = b.lo && b.hi ? fmt_double(0.5 * (*b.hi - *b.lo)) : "";
    t.add_row({fmt_double(b.eps), b.lo ? fmt_double(*b.lo) : "", b.hi ? fmt_double(*b.hi) : "",
               half, b.contains_one() ? "yes" : "no"});
  }
  return t;
}

std::filesystem::path dump_failure(const RunConfig& cfg, const NumericalFailure& f,
                                   const std::string& id, const std::filesystem::path& dir) {
  CsvTable t;
  t.meta = echo(cfg);
  t.meta.push_back({"failure.run", id});
  t.meta.push_back({"failure.what", f.what()});
  t.meta.push_back({"failure.t", fmt_double(f.time)});
  t.columns = {"s", "w"};
  for (std::size_t i = 0; i < f.s_grid.size() && i < f.values.size(); ++i)
    t.add_numeric_row({f.s_grid[i], f.values[i]});
  const auto path = dir / id / "failure_state.csv";
  write_csv(path, t);
  return path;
}

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& dir,
                                              const std::vector<RunResult>& results,
                                              bool sweep) {
  namespace fs = std::filesystem;
  std::vector<std::string> missing;
  const auto need = [&](const fs::path& rel) {
    if (!fs::exists(dir / rel)) missing.push_back((dir / rel).string());
    return rel.generic_string();
  };
  const std::string head =
      "set datafile separator ','\nset datafile commentschars '#'\n"
      "set key autotitle columnhead\nset terminal pngcairo size 900,600\n";

  std::vector<std::pair<fs::path, std::string>> scripts;
  for (const auto& r : results) {
    if (!r.error.empty()) continue;
    const fs::path base = r.spec.id;
    std::string prof = head + "set output '" + r.spec.id + "_profiles.png'\n" +
                       "set xlabel 's'\nset ylabel 'w'\nplot \\\n";
    // Snapshot files are whatever was written; list them from disk order.
    std::vector<std::string> snaps;
    if (fs::exists(dir / base))
      for (const auto& e : fs::directory_iterator(dir / base))
        if (e.path().filename().string().rfind("snapshot_", 0) == 0)
          snaps.push_back(e.path().filename().string());
    std::sort(snaps.begin(), snaps.end());
    if (snaps.empty()) missing.push_back((dir / base / "snapshot_*.csv").string());
    for (std::size_t i = 0; i < snaps.size(); ++i)
      prof += "  '" + need(base / snaps[i]) + "' using 1:2 with lines title '" + snaps[i] + "'" +
              (i + 1 < snaps.size() ? ", \\\n" : "\n");
    scripts.push_back({fs::path("plots") / (r.spec.id + "_profiles.gp"), prof});

    std::string front = head + "set output '" + r.spec.id + "_front.png'\n" +
                        "set xlabel 't'\nset ylabel 'r_front'\nplot \\\n";
    for (std::size_t i = 0; i < r.bands.size(); ++i)
      front += "  '" + need(base / front_name(r.bands[i].tau)) + "' using 1:3 with linespoints title '" +
               tau_tag(r.bands[i].tau) + "'" + (i + 1 < r.bands.size() ? ", \\\n" : "\n");
    scripts.push_back({fs::path("plots") / (r.spec.id + "_front.gp"), front});
  }
  if (sweep) {
    std::string s = head + "set output 'sweep.png'\nset logscale y\n"
                    "set xlabel 'A / A_crit'\nset ylabel 'eps'\n"
                    "plot '" + need("verdicts.csv") +
                    "' using 2:5:($10 > 0 ? 1 : ($10 < 0 ? -1 : 0)) with points pt 7 palette title 'slope sign'\n";
    scripts.push_back({fs::path("plots") / "sweep.gp", s});
  }
  if (!missing.empty()) {
    std::string msg = "emit_plots: missing artifacts:";
    for (const auto& m : missing) msg += " " + m;
    throw std::runtime_error(msg);
  }
  std::vector<fs::path> out;
  for (const auto& [rel, text] : scripts) {
    // Paths are relative to the output root; run gnuplot from there.
    write_text(dir / rel, text);
    out.push_back(dir / rel);
  }
  return out;
}

}  // namespace frontlab
