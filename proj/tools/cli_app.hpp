#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "catqnd/catqnd.hpp"

namespace catqnd::cli {

namespace fs = std::filesystem;

enum ExitCode : int { ok = 0, config_invalid = 2, numeric_failure = 3, improbable_outcome = 4 };

class config_error : public error {
public:
  using error::error;
};

// Collects every invalid field before failing, so users see all problems at once.
class Validator {
public:
  void require(bool cond, const std::string& message) {
    if (!cond) problems_.push_back(message);
  }
  void finish() const {
    if (problems_.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& p : problems_) msg += "\n  - " + p;
    throw config_error(msg);
  }

private:
  std::vector<std::string> problems_;
};

struct SqueezeConfig {
  double xi2 = 0.0;
  double tail_tol = default_tail_tol;
  std::string out_dir = ".";

  void validate() const {
    Validator v;
    v.require(std::isfinite(xi2) && xi2 >= 1.0, "xi2 must be >= 1");
    v.require(tail_tol > 0.0 && tail_tol <= 1e-4, "tail-tol must lie in (0, 1e-4]");
    v.finish();
  }
};

struct CatConfig {
  double xi2 = 0.0;
  double beta = 0.0;
  std::optional<double> p_r;
  std::optional<double> pr_over_beta;
  bool sample = false;
  std::optional<std::uint64_t> seed;
  double tail_tol = default_tail_tol;
  std::string out_dir = ".";

  void validate() const {
    Validator v;
    v.require(std::isfinite(xi2) && xi2 > 1.0, "xi2 must be > 1");
    v.require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
    const int sources = int(p_r.has_value()) + int(pr_over_beta.has_value()) + int(sample);
    v.require(sources == 1, "give exactly one of --pr, --pr-over-beta or --sample");
    v.require(!sample || seed.has_value(), "--sample needs --seed");
    v.require(!p_r || std::isfinite(*p_r), "pr must be finite");
    v.require(!pr_over_beta || std::isfinite(*pr_over_beta), "pr-over-beta must be finite");
    v.require(tail_tol > 0.0 && tail_tol <= 1e-4, "tail-tol must lie in (0, 1e-4]");
    v.finish();
  }
};

struct TrajectoriesConfig {
  double xi2 = 0.0;
  double beta = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::size_t bins = 100;
  std::size_t threads = 1;
  double tail_tol = default_tail_tol;
  std::string out_dir = ".";

  void validate() const {
    Validator v;
    v.require(std::isfinite(xi2) && xi2 > 1.0, "xi2 must be > 1");
    v.require(std::isfinite(beta) && beta > 0.0, "beta must be > 0");
    v.require(count >= 1, "count must be >= 1");
    v.require(bins >= 1, "bins must be >= 1");
    v.require(threads >= 1, "threads must be >= 1");
    v.require(tail_tol > 0.0 && tail_tol <= 1e-4, "tail-tol must lie in (0, 1e-4]");
    v.finish();
  }
};

struct FeasibilityConfig {
  std::string preset;
  ExperimentalParams params{.kappa0 = 0, .gamma = 1.0, .delta = 100.0, .n_atoms = 0, .n_photons = 0,
                            .transmission = 1.0, .polarization = 0.99, .tau_c = 0.1};
  std::string out_dir = ".";

  void validate() const {
    Validator v;
    const auto& p = params;
    v.require(std::isfinite(p.kappa0) && p.kappa0 > 0.0, "kappa0 must be > 0");
    v.require(std::isfinite(p.gamma) && p.gamma > 0.0, "gamma must be > 0");
    v.require(std::isfinite(p.delta) && std::abs(p.delta) >= 10.0 * p.gamma, "|delta| must be >= 10 gamma");
    v.require(p.n_atoms >= 1.0 && p.n_atoms == std::floor(p.n_atoms), "n-atoms must be a positive integer");
    v.require(std::isfinite(p.n_photons) && p.n_photons > 0.0, "n-photons must be > 0");
    v.require(p.transmission > 0.0 && p.transmission <= 1.0, "transmission must lie in (0, 1]");
    v.require(p.polarization > 0.0 && p.polarization < 1.0, "polarization must lie in (0, 1)");
    v.require(std::isfinite(p.tau_c) && p.tau_c > 0.0, "tau-c must be > 0");
    v.finish();
  }
};

class Output {
public:
  explicit Output(std::string dir) : dir_(std::move(dir)) {}

  void write(const std::string& key, const std::string& name, const std::string& contents) {
    const fs::path path = fs::path(dir_) / name;
    write_file_atomic(path, contents);
    files_[key] = path.string();
  }
  const json& files() const { return files_; }

private:
  std::string dir_;
  json files_ = json::object();
};

namespace detail {

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline json moments_json(const NumberState& s) {
  const NumberMoments m = number_moments(s);
  return {{"mean_n", m.mean_n}, {"var_x", m.var_x()}, {"var_p", m.var_p()}};
}

template <typename F>
json optional_metric(F&& f) {
  try {
    return f();
  } catch (const no_fringe_error&) {
  } catch (const no_cat_error&) {
  } catch (const degenerate_state_error&) {
  }
  return nullptr;
}

}  // namespace detail

inline json run_squeeze(const SqueezeConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::size_t n_max = choose_truncation(cfg.xi2, 1.0, 0.0, cfg.tail_tol);
  log << "squeeze: xi2=" << cfg.xi2 << " n_max=" << n_max << "\n";
  Output out(cfg.out_dir);

  const NumberState exact = squeezed_state_exact(cfg.xi2, n_max);
  const QuadratureGrid grid = state_grid(exact);
  out.write("exact_number", "squeezed_exact_number.csv", number_state_csv(exact));
  out.write("exact_p", "squeezed_exact_p.csv", wavefunction_csv(to_quadrature(exact, grid, Basis::P)));
  out.write("exact_x", "squeezed_exact_x.csv", wavefunction_csv(to_quadrature(exact, grid, Basis::X)));

  json summary = {{"xi2", cfg.xi2}, {"alpha", alpha_from_xi2(cfg.xi2)}, {"n_max", n_max},
                  {"exact", detail::moments_json(exact)}};
  if (cfg.xi2 > 1.0) {
    const NumberState stirling = squeezed_state_stirling(cfg.xi2, n_max);
    const QuadratureGrid sgrid = state_grid(stirling);
    out.write("stirling_number", "squeezed_stirling_number.csv", number_state_csv(stirling));
    out.write("stirling_p", "squeezed_stirling_p.csv", wavefunction_csv(to_quadrature(stirling, sgrid, Basis::P)));
    out.write("stirling_x", "squeezed_stirling_x.csv", wavefunction_csv(to_quadrature(stirling, sgrid, Basis::X)));
    summary["stirling"] = detail::moments_json(stirling);
    summary["overlap_exact_stirling"] = std::abs(inner_product(exact, stirling));
  } else {
    summary["stirling"] = nullptr;
  }
  out.write("summary", "squeeze_summary.json", detail::dump(summary));
  return {{"command", "squeeze"}, {"files", out.files()}, {"summary", summary}};
}

inline json run_cat(const CatConfig& cfg, std::ostream& log) {
  cfg.validate();
  const double alpha = alpha_from_xi2(cfg.xi2);
  std::optional<double> p_p;
  double p_r = 0.0;
  if (cfg.sample) {
    RandomSource rng(*cfg.seed);
    p_p = sample_first_outcome(alpha, rng).value;
    const std::size_t n0 = choose_truncation(cfg.xi2, cfg.beta, 0.0, cfg.tail_tol);
    p_r = sample_second_outcome(squeezed_state_exact(cfg.xi2, n0), cfg.beta, rng).value;
  } else {
    p_r = cfg.p_r ? *cfg.p_r : *cfg.pr_over_beta * cfg.beta;
  }

  CatPreparation prep = [&] {
    try {
      return prepare_cat(cfg.xi2, cfg.beta, p_r, cfg.tail_tol);
    } catch (const improbable_outcome_error&) {
      const std::size_t n0 = choose_truncation(cfg.xi2, cfg.beta, 0.0, cfg.tail_tol);
      const double density = outcome_density_second(squeezed_state_exact(cfg.xi2, n0), cfg.beta)(p_r);
      throw improbable_outcome_error("outcome p_R = " + format_double(p_r) +
                                         " is improbable: outcome density " + format_double(density),
                                     density);
    }
  }();
  log << "cat: xi2=" << cfg.xi2 << " beta=" << cfg.beta << " p_R=" << p_r << " mu_exact=" << prep.mu.exact
      << " n_max=" << prep.n_max << "\n";

  Output out(cfg.out_dir);
  const double mu = prep.mu.exact;
  const QuadratureGrid grid = analysis_grid(prep.cat, mu);
  const QuadratureWavefunction p_rep = to_quadrature(prep.cat, grid, Basis::P);
  const QuadratureWavefunction x_rep = to_quadrature(prep.cat, grid, Basis::X);
  out.write("cat_number", "cat_number.csv", number_state_csv(prep.cat));
  out.write("cat_p", "cat_p.csv", wavefunction_csv(p_rep));
  out.write("cat_x", "cat_x.csv", wavefunction_csv(x_rep));

  const CatConditions cond = check_cat_conditions(mu, cfg.beta, cfg.xi2);
  json metrics = {{"xi2", cfg.xi2},
                  {"alpha", alpha},
                  {"beta", cfg.beta},
                  {"p_R", p_r},
                  {"p_P", p_p ? json(*p_p) : json(nullptr)},
                  {"mu_exact", prep.mu.exact},
                  {"mu_approx", prep.mu.approx},
                  {"n_max", prep.n_max},
                  {"resolvable", cond.resolvable},
                  {"reachable", cond.reachable},
                  {"combined", cond.combined}};
  if (mu > 0.0) {
    const CatApproxParams approx(mu, cfg.beta);
    const QuadratureWavefunction ap = approx_p_wavefunction(approx, grid);
    const QuadratureWavefunction ax = approx_x_wavefunction(approx, grid);
    out.write("approx_p", "approx_p.csv", wavefunction_csv(ap));
    out.write("approx_x", "approx_x.csv", wavefunction_csv(ax));
    metrics["overlap_p"] = overlap(p_rep, ap);
    metrics["overlap_x"] = overlap(x_rep, ax);
  } else {
    metrics["overlap_p"] = nullptr;
    metrics["overlap_x"] = nullptr;
  }
  metrics["cat"] = detail::optional_metric([&] { return to_json(measure_cat(p_rep, x_rep, mu, cfg.beta, cfg.xi2)); });

  ProtocolTrace trace{.seed = cfg.seed.value_or(0), .xi2 = cfg.xi2, .alpha = alpha, .beta = cfg.beta,
                      .p_p = p_p.value_or(0.0), .p_r = p_r, .mu_exact = prep.mu.exact,
                      .mu_approx = prep.mu.approx, .n_max = prep.n_max,
                      .state_file = (fs::path(cfg.out_dir) / "cat_number.csv").string()};
  json trace_json = to_json(trace);
  if (!p_p) trace_json["p_P"] = nullptr;
  if (!cfg.seed) trace_json["seed"] = nullptr;
  out.write("metrics", "cat_metrics.json", detail::dump(metrics));
  out.write("trace", "protocol_trace.json", detail::dump(trace_json));
  return {{"command", "cat"}, {"files", out.files()}, {"summary", metrics}};
}

struct TrajectoryRecord {
  double p_p;
  double p_r;
  MuEstimate mu;
  CatConditions flags;
};

inline std::vector<TrajectoryRecord> simulate_trajectories(const TrajectoriesConfig& cfg, const NumberState& squeezed) {
  const double alpha = alpha_from_xi2(cfg.xi2);
  std::vector<TrajectoryRecord> records(cfg.count);
  const auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < cfg.count; i += stride) {
      RandomSource rng = RandomSource::derived(cfg.seed, i);
      const double p_p = sample_first_outcome(alpha, rng).value;
      // The recentering rotation makes the squeezed state independent of p_P.
      const double p_r = sample_second_outcome(squeezed, cfg.beta, rng).value;
      const MuEstimate mu = mu_of_outcome(p_r, cfg.beta, cfg.xi2);
      records[i] = {p_p, p_r, mu, check_cat_conditions(mu.exact, cfg.beta, cfg.xi2)};
    }
  };
  const std::size_t threads = std::min(cfg.threads, cfg.count);
  if (threads <= 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  return records;
}

inline json run_trajectories(const TrajectoriesConfig& cfg, std::ostream& log) {
  cfg.validate();
  const std::size_t n_max = choose_truncation(cfg.xi2, cfg.beta, 0.0, cfg.tail_tol);
  const NumberState squeezed = squeezed_state_exact(cfg.xi2, n_max);
  log << "trajectories: count=" << cfg.count << " seed=" << cfg.seed << " n_max=" << n_max << "\n";
  const std::vector<TrajectoryRecord> records = simulate_trajectories(cfg, squeezed);

  std::string lines;
  std::size_t resolvable = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    resolvable += r.flags.resolvable ? 1 : 0;
    const json j = {{"index", i},
                    {"p_P", r.p_p},
                    {"p_R", r.p_r},
                    {"mu_exact", r.mu.exact},
                    {"mu_approx", r.mu.approx},
                    {"resolvable", r.flags.resolvable},
                    {"reachable", r.flags.reachable},
                    {"combined", r.flags.combined}};
    lines += j.dump() + "\n";
  }

  // Histogram range spans every populated mixture component by 5 widths.
  const OutcomeDensity density = outcome_density_second(squeezed, cfg.beta);
  const double lo = -5.0 * OutcomeDensity::component_stddev;
  const double hi = density.means().back() + 5.0 * OutcomeDensity::component_stddev;
  const double width = (hi - lo) / static_cast<double>(cfg.bins);
  std::vector<std::size_t> counts(cfg.bins);
  std::size_t outside = 0;
  for (const auto& r : records) {
    const double b = std::floor((r.p_r - lo) / width);
    if (b < 0.0 || b >= static_cast<double>(cfg.bins)) {
      ++outside;
      continue;
    }
    ++counts[static_cast<std::size_t>(b)];
  }
  std::string hist = "bin_lo,bin_hi,count,expected\n";
  const double total = static_cast<double>(cfg.count);
  for (std::size_t b = 0; b < cfg.bins; ++b) {
    const double a = lo + width * static_cast<double>(b);
    const double z = b + 1 == cfg.bins ? hi : a + width;
    hist += format_double(a) + ',' + format_double(z) + ',' + std::to_string(counts[b]) + ',' +
            format_double(total * (density.cdf(z) - density.cdf(a))) + '\n';
  }

  Output out(cfg.out_dir);
  out.write("trajectories", "trajectories.jsonl", lines);
  out.write("histogram", "pr_histogram.csv", hist);
  const double threshold = 1.0 - std::log((cfg.xi2 - 1.0) / (cfg.xi2 + 1.0)) / (2.0 * cfg.beta);
  const json summary = {{"count", cfg.count},
                        {"seed", cfg.seed},
                        {"n_max", n_max},
                        {"outside_histogram", outside},
                        {"resolvable_fraction", static_cast<double>(resolvable) / total},
                        {"resolvable_fraction_expected", 1.0 - density.cdf(threshold)}};
  return {{"command", "trajectories"}, {"files", out.files()}, {"summary", summary}};
}

inline json run_feasibility(const FeasibilityConfig& cfg, std::ostream& log) {
  cfg.validate();
  log << "feasibility: " << (cfg.preset.empty() ? "custom" : cfg.preset) << "\n";
  const FeasibilityReport report = evaluate_scenario(cfg.params);
  json j = to_json(report);
  j["preset"] = cfg.preset.empty() ? json(nullptr) : json(cfg.preset);
  Output out(cfg.out_dir);
  out.write("report", "feasibility_report.json", detail::dump(j));
  return {{"command", "feasibility"}, {"files", out.files()}, {"summary", j}};
}

namespace detail {

inline std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// Adds --key value pairs from a JSON config for every key not already given on
// the command line.
inline std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw config_error("--config needs a path");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (!path) return out;

  std::ifstream in(*path);
  if (!in) throw config_error("cannot read config file " + *path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw config_error("config file " + *path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw config_error("config file " + *path + " must hold a JSON object");

  const auto given = [&](const std::string& flag) {
    return std::any_of(out.begin(), out.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + normalize_key(key);
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      out.push_back(flag);
      out.push_back(value.dump());
    } else if (value.is_number()) {
      out.push_back(flag);
      out.push_back(format_double(value.get<double>()));
    } else {
      throw config_error("config key '" + key + "' must be a scalar");
    }
  }
  return out;
}

}  // namespace detail

/// Parses and runs one command; prints the JSON result on `out` and logs on `err`.
inline int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = detail::merge_config(raw_args);
  } catch (const config_error& e) {
    err << e.what() << "\n";
    return config_invalid;
  }

  CLI::App app{"Simulator for QND preparation of collective-spin cat states", "catqnd_cli"};
  app.require_subcommand(1);

  SqueezeConfig squeeze;
  auto* sq = app.add_subcommand("squeeze", "Squeezed state after the first QND step");
  sq->add_option("--xi2", squeeze.xi2, "Squeezing degree xi^2")->required();
  sq->add_option("--tail-tol", squeeze.tail_tol, "Truncation tail tolerance");
  sq->add_option("--out-dir", squeeze.out_dir, "Output directory");

  CatConfig cat;
  double pr = 0.0, pr_over_beta = 0.0;
  std::uint64_t cat_seed = 0;
  auto* ca = app.add_subcommand("cat", "Conditional cat state after the second QND step");
  ca->add_option("--xi2", cat.xi2, "Squeezing degree xi^2")->required();
  ca->add_option("--beta", cat.beta, "Number-QND coupling beta")->required();
  auto* pr_opt = ca->add_option("--pr", pr, "Second light outcome p_R");
  auto* prb_opt = ca->add_option("--pr-over-beta", pr_over_beta, "Outcome given as p_R / beta");
  ca->add_flag("--sample", cat.sample, "Sample both outcomes");
  auto* seed_opt = ca->add_option("--seed", cat_seed, "Seed for --sample");
  ca->add_option("--tail-tol", cat.tail_tol, "Truncation tail tolerance");
  ca->add_option("--out-dir", cat.out_dir, "Output directory");

  TrajectoriesConfig traj;
  auto* tr = app.add_subcommand("trajectories", "Monte Carlo over both measurement outcomes");
  tr->add_option("--xi2", traj.xi2, "Squeezing degree xi^2")->required();
  tr->add_option("--beta", traj.beta, "Number-QND coupling beta")->required();
  tr->add_option("--count", traj.count, "Number of trajectories")->required();
  tr->add_option("--seed", traj.seed, "Base seed")->required();
  tr->add_option("--bins", traj.bins, "Histogram bins");
  tr->add_option("--threads", traj.threads, "Worker threads");
  tr->add_option("--tail-tol", traj.tail_tol, "Truncation tail tolerance");
  tr->add_option("--out-dir", traj.out_dir, "Output directory");

  FeasibilityConfig feas;
  auto* fe = app.add_subcommand("feasibility", "Experimental feasibility report");
  fe->add_option("--preset", feas.preset, "Scenario preset")
      ->check(CLI::IsMember({"bec-free-space", "bec-cavity"}));
  ExperimentalParams overrides{};
  auto* k0 = fe->add_option("--kappa0", overrides.kappa0, "Resonant optical depth");
  auto* ga = fe->add_option("--gamma", overrides.gamma, "Linewidth");
  auto* de = fe->add_option("--delta", overrides.delta, "Detuning, same unit as gamma");
  auto* na = fe->add_option("--n-atoms", overrides.n_atoms, "Atom number");
  auto* np = fe->add_option("--n-photons", overrides.n_photons, "Photon number per pulse");
  auto* tt = fe->add_option("--transmission", overrides.transmission, "Cavity mirror transmission (1 = free space)");
  auto* po = fe->add_option("--polarization", overrides.polarization, "Spin polarization fraction");
  auto* tc = fe->add_option("--tau-c", overrides.tau_c, "Ground-state coherence time [s]");
  fe->add_option("--out-dir", feas.out_dir, "Output directory");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return e.get_exit_code() == 0 ? ok : config_invalid;
  }

  try {
    json result;
    if (*sq) {
      result = run_squeeze(squeeze, err);
    } else if (*ca) {
      if (*pr_opt) cat.p_r = pr;
      if (*prb_opt) cat.pr_over_beta = pr_over_beta;
      if (*seed_opt) cat.seed = cat_seed;
      result = run_cat(cat, err);
    } else if (*tr) {
      result = run_trajectories(traj, err);
    } else {
      if (feas.preset == "bec-free-space") feas.params = preset_bec_free_space();
      if (feas.preset == "bec-cavity") feas.params = preset_bec_cavity();
      const auto apply = [](CLI::Option* opt, double& field, double value) {
        if (*opt) field = value;
      };
      apply(k0, feas.params.kappa0, overrides.kappa0);
      apply(ga, feas.params.gamma, overrides.gamma);
      apply(de, feas.params.delta, overrides.delta);
      apply(na, feas.params.n_atoms, overrides.n_atoms);
      apply(np, feas.params.n_photons, overrides.n_photons);
      apply(tt, feas.params.transmission, overrides.transmission);
      apply(po, feas.params.polarization, overrides.polarization);
      apply(tc, feas.params.tau_c, overrides.tau_c);
      result = run_feasibility(feas, err);
    }
    out << result.dump() << "\n";
    return ok;
  } catch (const config_error& e) {
    err << e.what() << "\n";
    return config_invalid;
  } catch (const improbable_outcome_error& e) {
    err << e.what() << "\n";
    out << json{{"error", "improbable_outcome"}, {"message", e.what()}, {"density", e.weight()}}.dump() << "\n";
    return improbable_outcome;
  } catch (const stage_error& e) {
    err << e.what() << "\n";
    out << json{{"error", "domain"}, {"stage", e.stage()}, {"message", e.what()}}.dump() << "\n";
    return numeric_failure;
  } catch (const error& e) {
    err << e.what() << "\n";
    out << json{{"error", "numeric"}, {"message", e.what()}}.dump() << "\n";
    return numeric_failure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << e.what() << "\n";
    return numeric_failure;
  }
}

}  // namespace catqnd::cli
