// Batch front-end: frontlab simulate|sweep|verify|baseline --config <path>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "frontlab/config.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/experiment.hpp"
#include "frontlab/format.hpp"
#include "frontlab/verify.hpp"

namespace fs = std::filesystem;
using namespace frontlab;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
};

void write_sidecar(const fs::path& dir, const std::string& command, const Options& o,
                   std::chrono::steady_clock::time_point start) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_text(dir / "run_meta.txt", "command = " + command + "\nconfig = " + o.config +
                                       "\nfinished_utc = " + stamp + "\nelapsed_seconds = " +
                                       fmt_double(secs) + "\njobs = " + std::to_string(o.jobs) + "\n");
}

void print_run(const RunResult& r) {
  std::cout << r.spec.id << ": ";
  if (!r.error.empty()) {
    std::cout << "error: " << r.error << "\n";
    return;
  }
  const auto* b = r.primary();
  if (b && b->verdict) {
    const auto& v = *b->verdict;
    std::cout << to_string(v.classification) << " slope=" << fmt_double(v.slope)
              << " displacement_cells=" << fmt_double(v.displacement_cells);
  } else if (b) {
    std::cout << "no verdict (" << b->error << ")";
  }
  if (r.envelope)
    std::cout << " envelope=" << (r.envelope->report.pass ? "pass" : "fail");
  std::cout << " steps=" << r.traj.stats.steps << "\n";
}

// Writes artifacts for every run; returns the exit code implied by failures.
int persist_runs(const RunConfig& cfg, const std::vector<RunResult>& results, const fs::path& dir,
                 bool sweep) {
  int code = kOk;
  for (const auto& r : results) {
    print_run(r);
    if (r.error.empty()) {
      write_run_artifacts(cfg, r, dir);
      continue;
    }
    try {
      std::rethrow_exception(r.failure);
    } catch (const NumericalFailure& f) {
      const auto path = dump_failure(cfg, f, r.spec.id, dir);
      std::cerr << "numerical failure in " << r.spec.id << ", state written to " << path << "\n";
      code = kNumericalFailure;
    } catch (const InfeasibleError&) {
      if (!sweep) throw;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      if (!sweep) throw;
    }
  }
  write_csv(dir / "verdicts.csv", verdict_table(cfg, results));
  if (cfg.output.gnuplot) emit_plots(dir, results, sweep);
  return code;
}

int cmd_simulate(const RunConfig& cfg, const fs::path& dir, const Options& o) {
  const auto results = execute_runs(cfg, simulate_specs(cfg), o.jobs);
  return persist_runs(cfg, results, dir, false);
}

int cmd_sweep(const RunConfig& cfg, const fs::path& dir, const Options& o) {
  const auto results = execute_runs(cfg, sweep_specs(cfg), o.jobs);
  const int code = persist_runs(cfg, results, dir, true);
  const auto brackets = sign_brackets(results);
  write_csv(dir / "brackets.csv", bracket_table(cfg, brackets));
  for (const auto& b : brackets) {
    std::cout << "eps=" << fmt_double(b.eps) << " sign change in ("
              << (b.lo ? fmt_double(*b.lo) : "?") << ", " << (b.hi ? fmt_double(*b.hi) : "?")
              << ")" << (b.contains_one() ? " contains 1" : " does not contain 1") << "\n";
  }
  return code;
}

int cmd_baseline(const RunConfig& cfg, const fs::path& dir, const Options& o) {
  const auto results = execute_runs(cfg, baseline_specs(cfg), o.jobs);
  const int code = persist_runs(cfg, results, dir, false);
  CsvTable t;
  t.meta = echo(cfg);
  t.columns = {"run_id", "eps", "taxis", "alpha", "classification", "displacement_cells",
               "displacement_sign"};
  for (const auto& r : results) {
    const auto* b = r.primary();
    if (!r.error.empty() || !b || !b->verdict) continue;
    const double d = b->verdict->displacement_cells;
    t.add_row({r.spec.id, fmt_double(r.spec.eps), r.spec.taxis ? "yes" : "no",
               fmt_double(r.spec.alpha), to_string(b->verdict->classification), fmt_double(d),
               d > 0 ? "+" : (d < 0 ? "-" : "0")});
  }
  write_csv(dir / "contrast.csv", t);
  return code;
}

int cmd_verify(const RunConfig& cfg, const fs::path& dir) {
  const auto suites = run_verify_suites(cfg.experiment.seed, cfg.experiment.verify_cells);
  CsvTable summary;
  summary.meta = echo(cfg);
  summary.columns = {"suite", "status", "detail", "report"};
  bool all = true;
  for (const auto& s : suites) {
    CsvTable t = s.table;
    t.meta = echo(cfg);
    t.meta.push_back({"suite", s.name});
    const auto path = dir / "verify" / (s.name + ".csv");
    write_csv(path, t);
    summary.add_row({s.name, s.pass ? "pass" : "fail", s.detail, path.generic_string()});
    std::cout << (s.pass ? "PASS " : "FAIL ") << s.name << ": " << s.detail;
    if (!s.pass) std::cout << " (see " << path.generic_string() << ")";
    std::cout << "\n";
    all = all && s.pass;
  }
  write_csv(dir / "verify" / "summary.csv", summary);
  return all ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for initial free-boundary motion in radial degenerate Keller-Segel"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "INI run configuration")->required();
    sub->add_option("--out", o.out, "Output directory (overrides [output] dir)");
    sub->add_option("--seed", seed, "Seed for randomized suites")->each([&](const std::string&) {
      o.seed = seed;
    });
    sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* simulate = app.add_subcommand("simulate", "Integrate one profile and classify its front");
  auto* sweep = app.add_subcommand("sweep", "Sweep A / A_crit ratios at fixed mass");
  auto* verify = app.add_subcommand("verify", "Run the randomized invariant suites");
  auto* baseline = app.add_subcommand("baseline", "Contrast with the taxis-free porous medium flow");
  for (auto* s : {simulate, sweep, verify, baseline}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  Mode mode = Mode::Simulate;
  if (*sweep) mode = Mode::Sweep;
  if (*verify) mode = Mode::Verify;
  if (*baseline) mode = Mode::Baseline;

  const auto start = std::chrono::steady_clock::now();
  RunConfig cfg;
  try {
    cfg = load_config(o.config, mode);
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  if (o.seed) cfg.experiment.seed = *o.seed;
  const fs::path dir = o.out.empty() ? cfg.output.dir : fs::path(o.out);

  int code = kOk;
  try {
    switch (mode) {
      case Mode::Simulate: code = cmd_simulate(cfg, dir, o); break;
      case Mode::Sweep: code = cmd_sweep(cfg, dir, o); break;
      case Mode::Verify: code = cmd_verify(cfg, dir); break;
      case Mode::Baseline: code = cmd_baseline(cfg, dir, o); break;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InfeasibleError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& f) {
    std::cerr << "numerical failure: " << f.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  write_sidecar(dir, to_string(mode), o, start);
  return code;
}
