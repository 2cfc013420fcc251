#include "frontlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "frontlab/comparison.hpp"
#include "frontlab/errors.hpp"
#include "frontlab/format.hpp"

namespace frontlab {

namespace pt = boost::property_tree;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Sweep: return "sweep";
    case Mode::Verify: return "verify";
    case Mode::Baseline: return "baseline";
  }
  return "?";
}

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"n", "R", "m"}},
      {"profile",
       {"shape", "target_mass", "r1", "r0", "r_plateau", "alpha", "A", "A_ratio", "B"}},
      {"numerics",
       {"cells", "eps", "safety", "horizon", "outputs", "tau", "tau_ladder", "max_steps"}},
      {"experiment",
       {"mode", "ratios", "fit_start", "fit_end", "min_cells", "taxis", "envelope",
        "baseline_alpha", "baseline_ratio", "seed", "verify_cells"}},
      {"output", {"dir", "gnuplot", "snapshot_stride"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double to_double(const std::string& section, const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(where(section, key) + ": expected a number, got '" + text + "'");
}

std::uint64_t to_uint(const std::string& section, const std::string& key,
                      const std::string& text) {
  const std::string t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(where(section, key) + ": expected a nonnegative integer, got '" + text +
                      "'");
  try {
    return std::stoull(t);
  } catch (const std::exception&) {
    throw ConfigError(where(section, key) + ": integer out of range");
  }
}

bool to_bool(const std::string& section, const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "yes" || t == "true" || t == "on" || t == "1") return true;
  if (t == "no" || t == "false" || t == "off" || t == "0") return false;
  throw ConfigError(where(section, key) + ": expected yes/no, got '" + text + "'");
}

std::vector<double> to_list(const std::string& section, const std::string& key,
                            const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(section, key, trim(item)));
  if (out.empty()) throw ConfigError(where(section, key) + ": empty list");
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt_double(v[i]);
  return out;
}

double kappa_for_band(const RunConfig& cfg, double A, double mu) {
  const auto& pr = cfg.profile;
  if (A >= a_crit(cfg.model, MassData::from_mu(cfg.model, mu), pr.r1)) return 1.0;
  const double C = tail_to_mass_coefficient(cfg.model, A, pr.r0, pr.r1, TailDirection::Shrink);
  if (!(C > 0.0 && C < c_crit(cfg.model, mu, pr.r1))) return 1.0;
  return plan_shrink(cfg.model, mu, pr.r1, C, pr.r0).sel.kappa;
}

}  // namespace

RunConfig parse_config(const std::string& text, std::optional<Mode> mode) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  RunConfig cfg;
  cfg.source = text;
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) {
      if (body.empty() && !body.data().empty())
        throw ConfigError("key '" + section + "' outside any section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + where(section, key));
      const std::string v = trim(node.data());
      if (section == "model") {
        if (key == "n") cfg.model.n = static_cast<int>(to_uint(section, key, v));
        if (key == "R") cfg.model.R = to_double(section, key, v);
        if (key == "m") cfg.model.m = to_double(section, key, v);
      } else if (section == "profile") {
        auto& p = cfg.profile;
        if (key == "shape") {
          if (v == "tail") p.shape = ProfileShape::Tail;
          else if (v == "constant") p.shape = ProfileShape::Constant;
          else throw ConfigError(where(section, key) + ": expected tail or constant");
        }
        if (key == "target_mass") p.target_mass = to_double(section, key, v);
        if (key == "r1") p.r1 = to_double(section, key, v);
        if (key == "r0") p.r0 = to_double(section, key, v);
        if (key == "r_plateau") p.r_plateau = to_double(section, key, v);
        if (key == "alpha") p.alpha = to_double(section, key, v);
        if (key == "A") p.A = to_double(section, key, v);
        if (key == "A_ratio") p.A_ratio = to_double(section, key, v);
        if (key == "B") p.B = to_double(section, key, v);
      } else if (section == "numerics") {
        auto& nu = cfg.numerics;
        if (key == "cells") nu.cells = to_uint(section, key, v);
        if (key == "eps") nu.eps = to_list(section, key, v);
        if (key == "safety") nu.safety = to_double(section, key, v);
        if (key == "horizon") nu.horizon = to_double(section, key, v);
        if (key == "outputs") nu.outputs = to_uint(section, key, v);
        if (key == "tau") nu.tau = to_double(section, key, v);
        if (key == "tau_ladder") nu.tau_ladder = to_list(section, key, v);
        if (key == "max_steps") nu.max_steps = to_uint(section, key, v);
      } else if (section == "experiment") {
        auto& ex = cfg.experiment;
        if (key == "mode") {
          ex.mode_explicit = true;
          if (v == "simulate") ex.mode = Mode::Simulate;
          else if (v == "sweep") ex.mode = Mode::Sweep;
          else if (v == "verify") ex.mode = Mode::Verify;
          else if (v == "baseline") ex.mode = Mode::Baseline;
          else throw ConfigError(where(section, key) + ": unknown mode '" + v + "'");
        }
        if (key == "ratios") ex.ratios = to_list(section, key, v);
        if (key == "fit_start") ex.fit_start = to_double(section, key, v);
        if (key == "fit_end") ex.fit_end = to_double(section, key, v);
        if (key == "min_cells") ex.min_cells = to_double(section, key, v);
        if (key == "taxis") ex.taxis = to_bool(section, key, v);
        if (key == "envelope") ex.envelope = to_bool(section, key, v);
        if (key == "baseline_alpha") ex.baseline_alpha = to_double(section, key, v);
        if (key == "baseline_ratio") ex.baseline_ratio = to_double(section, key, v);
        if (key == "seed") ex.seed = to_uint(section, key, v);
        if (key == "verify_cells") ex.verify_cells = to_uint(section, key, v);
      } else if (section == "output") {
        if (key == "dir") cfg.output.dir = v;
        if (key == "gnuplot") cfg.output.gnuplot = to_bool(section, key, v);
        if (key == "snapshot_stride") cfg.output.snapshot_stride = to_uint(section, key, v);
      }
    }
  }
  if (mode) {
    if (cfg.experiment.mode_explicit && cfg.experiment.mode != *mode)
      throw ConfigError(std::string("config is for mode '") + to_string(cfg.experiment.mode) +
                        "', not '" + to_string(*mode) + "'");
    cfg.experiment.mode = *mode;
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Mode> mode) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), mode);
}

void validate(const RunConfig& cfg) {
  try {
    cfg.model.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("[model] ") + e.what());
  }
  const auto& pr = cfg.profile;
  const auto& nu = cfg.numerics;
  const auto& ex = cfg.experiment;
  const double R = cfg.model.R;

  if (!(pr.target_mass > 0.0)) throw ConfigError("[profile] target_mass must be positive");
  if (pr.shape == ProfileShape::Tail) {
    if (pr.A && pr.A_ratio) throw ConfigError("[profile] A and A_ratio are mutually exclusive");
    const bool needs_amplitude = ex.mode == Mode::Simulate || ex.mode == Mode::Baseline;
    if (needs_amplitude && !pr.A && !pr.A_ratio)
      throw ConfigError("[profile] one of A or A_ratio is required");
    if (pr.A && !(*pr.A > 0.0)) throw ConfigError("[profile] A must be positive");
    if (pr.A_ratio && !(*pr.A_ratio > 0.0)) throw ConfigError("[profile] A_ratio must be positive");
    if (!(0.0 < pr.r_plateau && pr.r_plateau <= pr.r0 && pr.r0 < pr.r1 && pr.r1 < R))
      throw ConfigError("[profile] need 0 < r_plateau <= r0 < r1 < R");
    if (!(pr.alpha > 0.0)) throw ConfigError("[profile] alpha must be positive");
    if (pr.B && !(*pr.B >= 0.0)) throw ConfigError("[profile] B must be nonnegative");
    if (pr.B && (pr.A_ratio || ex.mode == Mode::Sweep))
      throw ConfigError("[profile] an explicit B fixes the mass; use A instead of ratios");
  }

  if (nu.cells < 8) throw ConfigError("[numerics] cells must be at least 8");
  for (double e : nu.eps)
    if (!(e > 0.0 && e < 1.0)) throw ConfigError("[numerics] eps values must lie in (0, 1)");
  if (!(nu.safety > 0.0 && nu.safety <= 1.0))
    throw ConfigError("[numerics] safety must lie in (0, 1]");
  if (!(nu.horizon > 0.0)) throw ConfigError("[numerics] horizon must be positive");
  if (nu.outputs < 4) throw ConfigError("[numerics] outputs must be at least 4");
  std::vector<double> bands = nu.tau_ladder;
  bands.push_back(nu.tau);
  for (double t : bands)
    if (!(t > 0.0 && t < 1.0)) throw ConfigError("[numerics] tau values must lie in (0, 1)");

  if (!(0.0 <= ex.fit_start && ex.fit_start < ex.fit_end && ex.fit_end <= 1.0))
    throw ConfigError("[experiment] need 0 <= fit_start < fit_end <= 1");
  if (!(ex.min_cells >= 0.0)) throw ConfigError("[experiment] min_cells must be nonnegative");
  for (double r : ex.ratios)
    if (!(r > 0.0)) throw ConfigError("[experiment] ratios must be positive");
  if (ex.mode == Mode::Sweep) {
    const bool below = std::any_of(ex.ratios.begin(), ex.ratios.end(), [](double r) { return r < 1.0; });
    const bool above = std::any_of(ex.ratios.begin(), ex.ratios.end(), [](double r) { return r > 1.0; });
    if (!below || !above) throw ConfigError("[experiment] sweep ratios must straddle 1");
    if (pr.shape != ProfileShape::Tail) throw ConfigError("[experiment] sweep needs a tail profile");
  }
  if (ex.mode == Mode::Baseline) {
    const double m = cfg.model.m;
    if (!(ex.baseline_alpha > 1.0 / (m - 1.0) && ex.baseline_alpha < 2.0 / (m - 1.0)))
      throw ConfigError("[experiment] baseline_alpha must lie between 1/(m-1) and 2/(m-1)");
    if (ex.baseline_ratio && !(*ex.baseline_ratio > 0.0))
      throw ConfigError("[experiment] baseline_ratio must be positive");
    if (pr.shape != ProfileShape::Tail) throw ConfigError("[experiment] baseline needs a tail profile");
  }

  if (pr.shape != ProfileShape::Tail || ex.mode == Mode::Verify) return;

  // The band must stay below the deficit scale eps kappa (R^n - r1^n) of the
  // subsolution extension for the smallest eps in use.
  const double mu = MassData::from_mass(cfg.model, pr.target_mass).mu;
  const double A_crit = a_crit(cfg.model, MassData::from_mass(cfg.model, pr.target_mass), pr.r1);
  std::vector<double> amplitudes;
  if (ex.mode == Mode::Sweep) {
    for (double r : ex.ratios) amplitudes.push_back(r * A_crit);
  } else {
    amplitudes.push_back(pr.A ? *pr.A : *pr.A_ratio * A_crit);
  }
  const double eps_min = *std::min_element(nu.eps.begin(), nu.eps.end());
  const double span = cfg.model.R_n() - std::pow(pr.r1, cfg.model.n);
  const double top = mu * cfg.model.R_n();
  for (double A : amplitudes) {
    double kappa = 1.0;
    try {
      kappa = kappa_for_band(cfg, A, mu);
    } catch (const Error& e) {
      throw ConfigError(std::string("cannot select comparison parameters: ") + e.what());
    }
    const double cap = eps_min * kappa * span / top;
    for (double t : bands)
      if (!(t < cap))
        throw ConfigError("[numerics] tau " + fmt_double(t) + " is not below eps_min kappa (R^n - r1^n) / mu R^n = " +
                          fmt_double(cap) + " for A = " + fmt_double(A));
  }
}

Metadata echo(const RunConfig& cfg) {
  const auto& pr = cfg.profile;
  const auto& nu = cfg.numerics;
  const auto& ex = cfg.experiment;
  Metadata md{
      {"model.n", fmt_int(cfg.model.n)},
      {"model.R", fmt_double(cfg.model.R)},
      {"model.m", fmt_double(cfg.model.m)},
      {"profile.shape", pr.shape == ProfileShape::Tail ? "tail" : "constant"},
      {"profile.target_mass", fmt_double(pr.target_mass)},
      {"profile.r1", fmt_double(pr.r1)},
      {"profile.r0", fmt_double(pr.r0)},
      {"profile.r_plateau", fmt_double(pr.r_plateau)},
      {"profile.alpha", fmt_double(pr.alpha)},
  };
  if (pr.A) md.push_back({"profile.A", fmt_double(*pr.A)});
  if (pr.A_ratio) md.push_back({"profile.A_ratio", fmt_double(*pr.A_ratio)});
  if (pr.B) md.push_back({"profile.B", fmt_double(*pr.B)});
  md.insert(md.end(), {
      {"numerics.cells", fmt_int(static_cast<long long>(nu.cells))},
      {"numerics.eps", list_text(nu.eps)},
      {"numerics.safety", fmt_double(nu.safety)},
      {"numerics.horizon", fmt_double(nu.horizon)},
      {"numerics.outputs", fmt_int(static_cast<long long>(nu.outputs))},
      {"numerics.tau", fmt_double(nu.tau)},
      {"numerics.tau_ladder", list_text(nu.tau_ladder)},
      {"numerics.max_steps", fmt_int(static_cast<long long>(nu.max_steps))},
      {"experiment.mode", to_string(ex.mode)},
      {"experiment.ratios", list_text(ex.ratios)},
      {"experiment.fit_start", fmt_double(ex.fit_start)},
      {"experiment.fit_end", fmt_double(ex.fit_end)},
      {"experiment.min_cells", fmt_double(ex.min_cells)},
      {"experiment.taxis", ex.taxis ? "yes" : "no"},
      {"experiment.envelope", ex.envelope ? "yes" : "no"},
      {"experiment.baseline_alpha", fmt_double(ex.baseline_alpha)},
      {"experiment.seed", std::to_string(ex.seed)},
  });
  if (ex.baseline_ratio) md.push_back({"experiment.baseline_ratio", fmt_double(*ex.baseline_ratio)});
  if (pr.shape == ProfileShape::Tail) {
    const auto massd = MassData::from_mass(cfg.model, pr.target_mass);
    md.push_back({"derived.mu", fmt_double(massd.mu)});
    md.push_back({"derived.A_crit", fmt_double(a_crit(cfg.model, massd, pr.r1))});
    md.push_back({"derived.C_crit", fmt_double(c_crit(cfg.model, massd.mu, pr.r1))});
  }
  return md;
}

}  // namespace frontlab
