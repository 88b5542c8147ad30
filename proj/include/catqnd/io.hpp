#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "catqnd/cat_analysis.hpp"
#include "catqnd/errors.hpp"
#include "catqnd/feasibility.hpp"
#include "catqnd/grid.hpp"
#include "catqnd/number_state.hpp"

namespace catqnd {

using json = nlohmann::json;

/// 17 significant digits: every double round-trips.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string wavefunction_csv(const QuadratureWavefunction& wf) {
  std::string out = "coord,re,im,abs2\n";
  for (std::size_t k = 0; k < wf.size(); ++k) {
    out += format_double(wf.grid()[k]) + ',' + format_double(wf[k].real()) + ',' +
           format_double(wf[k].imag()) + ',' + format_double(std::norm(wf[k])) + '\n';
  }
  return out;
}

inline std::string number_state_csv(const NumberState& s) {
  std::string out = "n,re,im\n";
  for (std::size_t n = 0; n < s.size(); ++n) {
    out += std::to_string(n) + ',' + format_double(s[n].real()) + ',' + format_double(s[n].imag()) + '\n';
  }
  return out;
}

/// Writes to a sibling temporary and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw error("failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw error("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

inline json to_json(const CatMetrics& m) {
  return {{"peak_positions", {m.peak_positions.first, m.peak_positions.second}},
          {"peak_std", m.peak_std},
          {"peak_separation", m.peak_separation},
          {"fringe_period", m.fringe_period},
          {"envelope_std", m.envelope_std},
          {"visibility", m.visibility},
          {"resolvable", m.resolvable},
          {"reachable", m.reachable}};
}

inline json to_json(const ExperimentalParams& p) {
  return {{"kappa0", p.kappa0},         {"gamma", p.gamma},
          {"delta", p.delta},           {"n_atoms", p.n_atoms},
          {"n_photons", p.n_photons},   {"transmission", p.transmission},
          {"polarization", p.polarization}, {"tau_c", p.tau_c}};
}

inline json to_json(const FeasibilityReport& r) {
  return {{"input", to_json(r.input)},
          {"kappa_detuned", r.kappa_detuned},
          {"theta_detuned", r.theta_detuned},
          {"a_per_atom", r.a_per_atom},
          {"xi2_raw", r.xi2_raw},
          {"xi2_achieved", r.xi2_achieved},
          {"beta", r.beta},
          {"eta", r.eta},
          {"xi2_max_depth", r.xi2_max_depth},
          {"xi2_max_polarization", r.xi2_max_polarization},
          {"xi2_max_polarization_heuristic", true},
          {"xi2_required_cat", r.xi2_required_cat},
          {"effective_depth", r.effective_depth},
          {"required_depth", r.required_depth},
          {"depth_condition_met", r.depth_condition_met},
          {"depth_flag", std::string(to_string(r.depth_flag))},
          {"coherence_ok", r.coherence_ok},
          {"cavity_used", r.cavity_used},
          {"rotation_tolerance", r.rotation_tolerance},
          {"cat_lifetime", r.cat_lifetime}};
}

/// Record of one protocol run.
struct ProtocolTrace {
  std::uint64_t seed = 0;
  double xi2 = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double p_p = 0.0;
  double p_r = 0.0;
  double mu_exact = 0.0;
  double mu_approx = 0.0;
  std::size_t n_max = 0;
  std::string state_file;
};

inline json to_json(const ProtocolTrace& t) {
  return {{"seed", t.seed},         {"xi2", t.xi2},           {"alpha", t.alpha},
          {"beta", t.beta},         {"p_P", t.p_p},           {"p_R", t.p_r},
          {"mu_exact", t.mu_exact}, {"mu_approx", t.mu_approx}, {"n_max", t.n_max},
          {"state_file", t.state_file}};
}

}  // namespace catqnd
