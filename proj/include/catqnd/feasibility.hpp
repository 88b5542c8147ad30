#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>

#include "catqnd/errors.hpp"

namespace catqnd {

/// Sample and probe parameters. gamma and delta may use any common unit;
/// only their ratio enters.
struct ExperimentalParams {
  double kappa0;        // resonant optical depth
  double gamma;         // linewidth
  double delta;         // detuning
  double n_atoms;
  double n_photons;
  double transmission;  // cavity mirror T; 1 means free space
  double polarization;  // spin polarization fraction after pumping
  double tau_c;         // ground-state coherence time [s]

  void validate() const {
    const auto fail = [](const std::string& what) { throw domain_error("experimental params: " + what); };
    if (!(kappa0 > 0.0) || !std::isfinite(kappa0)) fail("kappa0 must be > 0");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) fail("gamma must be > 0");
    if (!std::isfinite(delta) || std::abs(delta) < 10.0 * gamma) {
      fail("|delta| must be at least 10 gamma (far-detuned regime)");
    }
    if (!(n_atoms >= 1.0) || !std::isfinite(n_atoms) || n_atoms != std::floor(n_atoms)) {
      fail("n_atoms must be a positive integer");
    }
    if (!(n_photons > 0.0) || !std::isfinite(n_photons)) fail("n_photons must be > 0");
    if (!(transmission > 0.0 && transmission <= 1.0)) fail("transmission must lie in (0, 1]");
    if (!(polarization > 0.0 && polarization < 1.0)) fail("polarization must lie in (0, 1)");
    if (!(tau_c > 0.0) || !std::isfinite(tau_c)) fail("tau_c must be > 0");
  }
};

/// kappa0 = cross_section * density * length for a cylinder of the given area.
struct SampleGeometry {
  double cross_section;  // cm^2
  double area;           // cm^2
  double density;        // cm^-3
  double length;         // cm

  double kappa0() const {
    if (!(cross_section > 0.0 && area > 0.0 && density > 0.0 && length > 0.0)) {
      throw domain_error("sample geometry: all dimensions must be > 0");
    }
    return cross_section * density * length;
  }
  double n_atoms() const { return density * area * length; }
};

struct DetunedOptics {
  double kappa_detuned;
  double theta_detuned;
};

/// Optical depth kappa0 gamma^2 / (4 delta^2) and phase shift kappa0 gamma / (2 delta).
inline DetunedOptics detuned_optics(double kappa0, double gamma, double delta) {
  if (!(kappa0 > 0.0) || !(gamma > 0.0)) throw domain_error("detuned_optics: kappa0 and gamma must be > 0");
  if (!(std::abs(delta) >= 10.0 * gamma)) {
    throw domain_error("detuned_optics: |delta| = " + std::to_string(std::abs(delta)) +
                       " below 10 gamma = " + std::to_string(10.0 * gamma));
  }
  return {kappa0 * gamma * gamma / (4.0 * delta * delta), kappa0 * gamma / (2.0 * delta)};
}

struct Coupling {
  double a;     // rotation per atom
  double xi2;   // squeezing degree a^2 N_a N_p / 4
  double beta;  // number-QND coupling a sqrt(2 N_p)
  double eta;   // depumping probability kappa_detuned N_p / N_a
};

inline Coupling coupling_chain(double theta_detuned, double kappa_detuned, double n_atoms, double n_photons) {
  if (!(theta_detuned > 0.0 && kappa_detuned > 0.0 && n_atoms > 0.0 && n_photons > 0.0)) {
    throw domain_error("coupling_chain: all inputs must be > 0");
  }
  const double a = theta_detuned / n_atoms;
  return {a, a * a * n_atoms * n_photons / 4.0, a * std::sqrt(2.0 * n_photons),
          kappa_detuned * n_photons / n_atoms};
}

/// Squeezing allowed by the depumping limit: sqrt(kappa0) / 2.
inline double max_squeezing_depth(double kappa0) {
  if (!(kappa0 > 0.0)) throw domain_error("max_squeezing_depth: kappa0 must be > 0");
  return 0.5 * std::sqrt(kappa0);
}

inline bool coherence_ok(double eta, double xi2) { return eta <= 1.0 / xi2; }

enum class DepthFlag { Met, Marginal, Unmet };

inline constexpr std::string_view to_string(DepthFlag f) {
  switch (f) {
    case DepthFlag::Met: return "met";
    case DepthFlag::Marginal: return "marginal";
    case DepthFlag::Unmet: return "unmet";
  }
  return "unmet";
}

// Depth within this fraction of the requirement counts as marginal.
inline constexpr double marginal_depth_fraction = 0.4;

struct DepthCondition {
  bool depth_ok;
  double xi2_required;
  double effective_depth;
  double required_depth;
  DepthFlag flag;
};

/// Depth requirement effective_depth >= 4 N_a^{2/3}, with the low-finesse
/// cavity raising the depth to 2 kappa0 / T, and the squeezing N_a^{1/3}
/// needed to resolve the cat.
inline DepthCondition cat_conditions_experimental(double kappa0, double n_atoms, double transmission) {
  if (!(kappa0 > 0.0 && n_atoms > 0.0)) {
    throw domain_error("cat_conditions_experimental: kappa0 and n_atoms must be > 0");
  }
  if (!(transmission > 0.0 && transmission <= 1.0)) {
    throw domain_error("cat_conditions_experimental: transmission must lie in (0, 1]");
  }
  const double cube_root = std::cbrt(n_atoms);
  const double effective = transmission < 1.0 ? 2.0 * kappa0 / transmission : kappa0;
  const double required = 4.0 * cube_root * cube_root;
  const bool ok = effective >= required;
  const DepthFlag flag = ok ? DepthFlag::Met
                            : (effective >= marginal_depth_fraction * required ? DepthFlag::Marginal
                                                                               : DepthFlag::Unmet);
  return {ok, cube_root, effective, required, flag};
}

/// Cavity-enhanced value 2 value / T, valid while the single-pass value is
/// well below T.
inline double cavity_enhancement(double value, double transmission) {
  if (!(transmission > 0.0 && transmission < 1.0)) {
    throw domain_error("cavity_enhancement: transmission must lie in (0, 1), got " +
                       std::to_string(transmission));
  }
  if (!(value >= 0.0) || !(value < transmission / 10.0)) {
    throw domain_error("cavity_enhancement: single-pass value " + std::to_string(value) +
                       " not small against T = " + std::to_string(transmission) +
                       " (need value < T/10)");
  }
  return 2.0 * value / transmission;
}

/// Heuristic squeezing cap from imperfect optical pumping, 1 / (1 - polarization).
inline double polarization_limit(double polarization) {
  if (!(polarization > 0.0 && polarization < 1.0)) {
    throw domain_error("polarization_limit: polarization must lie in (0, 1)");
  }
  return 1.0 / (1.0 - polarization);
}

/// Required precision of the spin rotation between the two QND steps.
inline double rotation_tolerance(double xi2, double n_atoms) {
  if (!(xi2 > 0.0 && n_atoms > 0.0)) throw domain_error("rotation_tolerance: inputs must be > 0");
  return 1.0 / (xi2 * std::sqrt(n_atoms));
}

inline double cat_lifetime(double tau_c, double xi2) {
  if (!(tau_c > 0.0 && xi2 > 0.0)) throw domain_error("cat_lifetime: inputs must be > 0");
  return tau_c / xi2;
}

struct FeasibilityReport {
  ExperimentalParams input;
  double kappa_detuned;  // after the cavity when T < 1
  double theta_detuned;
  double a_per_atom;
  double xi2_raw;
  double xi2_achieved;
  double beta;
  double eta;
  double xi2_max_depth;
  double xi2_max_polarization;
  double xi2_required_cat;
  double effective_depth;
  double required_depth;
  bool depth_condition_met;
  DepthFlag depth_flag;
  bool coherence_ok;
  bool cavity_used;
  double rotation_tolerance;
  double cat_lifetime;
};

/// A domain error tagged with the stage of the chain that raised it.
class stage_error : public domain_error {
public:
  stage_error(std::string stage, const std::string& what)
      : domain_error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& f) {
  try {
    return f();
  } catch (const domain_error& e) {
    throw stage_error(stage, e.what());
  }
}

}  // namespace detail

/// Full chain: detuned optics, cavity enhancement (T < 1 only), coupling
/// constants, then every constraint. xi2_achieved is the raw squeezing
/// clamped by the depth and polarization limits.
inline FeasibilityReport evaluate_scenario(const ExperimentalParams& p) {
  detail::run_stage("validate", [&] { p.validate(); return 0; });
  FeasibilityReport r{};
  r.input = p;
  const DetunedOptics optics =
      detail::run_stage("detuned_optics", [&] { return detuned_optics(p.kappa0, p.gamma, p.delta); });
  r.kappa_detuned = optics.kappa_detuned;
  r.theta_detuned = optics.theta_detuned;
  r.cavity_used = p.transmission < 1.0;
  if (r.cavity_used) {
    r.theta_detuned =
        detail::run_stage("cavity_enhancement", [&] { return cavity_enhancement(optics.theta_detuned, p.transmission); });
    r.kappa_detuned =
        detail::run_stage("cavity_enhancement", [&] { return cavity_enhancement(optics.kappa_detuned, p.transmission); });
  }
  const Coupling c = detail::run_stage(
      "coupling_chain", [&] { return coupling_chain(r.theta_detuned, r.kappa_detuned, p.n_atoms, p.n_photons); });
  r.a_per_atom = c.a;
  r.xi2_raw = c.xi2;
  r.beta = c.beta;
  r.eta = c.eta;

  const DepthCondition depth = cat_conditions_experimental(p.kappa0, p.n_atoms, p.transmission);
  r.effective_depth = depth.effective_depth;
  r.required_depth = depth.required_depth;
  r.depth_condition_met = depth.depth_ok;
  r.depth_flag = depth.flag;
  r.xi2_required_cat = depth.xi2_required;
  r.xi2_max_depth = max_squeezing_depth(depth.effective_depth);
  r.xi2_max_polarization = polarization_limit(p.polarization);
  r.xi2_achieved = std::min({r.xi2_raw, r.xi2_max_depth, r.xi2_max_polarization});
  r.coherence_ok = coherence_ok(r.eta, r.xi2_raw);
  r.rotation_tolerance = rotation_tolerance(r.xi2_achieved, p.n_atoms);
  r.cat_lifetime = cat_lifetime(p.tau_c, r.xi2_achieved);
  return r;
}

/// Dense BEC probed in free space.
inline ExperimentalParams preset_bec_free_space() {
  return {.kappa0 = 1e4, .gamma = 1.0, .delta = 100.0, .n_atoms = 4e5, .n_photons = 3.2e4,
          .transmission = 1.0, .polarization = 0.999, .tau_c = 0.1};
}

/// Small BEC inside a low-finesse cavity with T = 5%.
inline ExperimentalParams preset_bec_cavity() {
  return {.kappa0 = 10.0, .gamma = 1.0, .delta = 2000.0, .n_atoms = 1e3, .n_photons = 4e6,
          .transmission = 0.05, .polarization = 0.999, .tau_c = 0.1};
}

}  // namespace catqnd
