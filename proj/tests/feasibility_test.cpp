#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "catqnd/feasibility.hpp"

namespace catqnd {
namespace {

std::vector<double> log_grid(double lo, double hi, int steps) {
  std::vector<double> out;
  for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / steps));
  return out;
}

TEST(DetunedOptics, Examples) {
  const auto o = detuned_optics(1e4, 1.0, 100.0);
  EXPECT_DOUBLE_EQ(o.kappa_detuned, 0.25);
  EXPECT_DOUBLE_EQ(o.theta_detuned, 50.0);
  EXPECT_DOUBLE_EQ(detuned_optics(7.0, 1.3, 40.0).kappa_detuned / detuned_optics(7.0, 1.3, 80.0).kappa_detuned, 4.0);
  EXPECT_THROW(detuned_optics(1e4, 1.0, 9.0), domain_error);
}

TEST(DetunedOptics, PhaseSquaredOverDepthIsResonantDepth) {
  for (double k0 : log_grid(1.0, 1e6, 6)) {
    for (double delta : {10.0, 37.0, 1e3}) {
      const auto o = detuned_optics(k0, 1.0, delta);
      EXPECT_NEAR(o.theta_detuned * o.theta_detuned / o.kappa_detuned / k0, 1.0, 1e-14);
    }
  }
}

TEST(CouplingChain, FreeSpaceNumbers) {
  const double n_atoms = 4e5;
  const double n_photons = 0.02 * n_atoms / 0.25;  // eta = 0.02
  const auto c = coupling_chain(50.0, 0.25, n_atoms, n_photons);
  EXPECT_NEAR(c.eta, 0.02, 1e-16);
  EXPECT_NEAR(c.xi2, 1e4 * c.eta / 4.0, 1e-12);
  EXPECT_NEAR(c.xi2, 50.0, 1e-12);
  EXPECT_THROW(coupling_chain(0.0, 0.25, 1.0, 1.0), domain_error);
}

TEST(CouplingChain, LinearInPhotonNumber) {
  const auto a = coupling_chain(3.0, 0.1, 1e3, 1e5);
  const auto b = coupling_chain(3.0, 0.1, 1e3, 2e5);
  EXPECT_DOUBLE_EQ(b.eta / a.eta, 2.0);
  EXPECT_DOUBLE_EQ(b.xi2 / a.xi2, 2.0);
}

TEST(CouplingChain, IdentitiesOverLogGrid) {
  for (double k0 : log_grid(1.0, 1e5, 5)) {
    for (double na : log_grid(1e2, 1e7, 5)) {
      for (double np : log_grid(1e2, 1e8, 6)) {
        const auto o = detuned_optics(k0, 1.0, 50.0);
        const auto c = coupling_chain(o.theta_detuned, o.kappa_detuned, na, np);
        EXPECT_NEAR(c.xi2 / (k0 * c.eta / 4.0), 1.0, 1e-13);
        EXPECT_NEAR(c.beta * c.beta * na / c.xi2, 8.0, 1e-13);
        // Squeezing to N_a^{1/3} implies beta xi2 >= 2 sqrt2 > 1.
        if (c.xi2 >= std::cbrt(na)) {
          EXPECT_GE(c.beta * c.xi2, 2.0 * std::sqrt(2.0) * (1.0 - 1e-12));
        }
      }
    }
  }
}

TEST(MaxSqueezingDepth, Examples) {
  EXPECT_EQ(max_squeezing_depth(1e4), 50.0);
  EXPECT_EQ(max_squeezing_depth(4.0), 1.0);
  EXPECT_EQ(max_squeezing_depth(400.0), 10.0);
  EXPECT_THROW(max_squeezing_depth(0.0), domain_error);
}

TEST(CoherenceOk, Examples) {
  EXPECT_TRUE(coherence_ok(0.01, 50.0));
  EXPECT_FALSE(coherence_ok(0.05, 50.0));
  EXPECT_TRUE(coherence_ok(0.7, 1.0));
}

TEST(CatConditionsExperimental, Examples) {
  const auto fs = cat_conditions_experimental(1e4, 4e5, 1.0);
  EXPECT_FALSE(fs.depth_ok);
  EXPECT_NEAR(fs.required_depth, 21715.0, 1.0);
  EXPECT_EQ(fs.flag, DepthFlag::Marginal);
  EXPECT_NEAR(fs.xi2_required, 73.68, 0.01);

  const auto cav = cat_conditions_experimental(10.0, 1e3, 0.05);
  EXPECT_EQ(cav.effective_depth, 400.0);
  EXPECT_TRUE(cav.depth_ok);
  EXPECT_EQ(cav.flag, DepthFlag::Met);
  EXPECT_EQ(cav.xi2_required, 10.0);

  EXPECT_EQ(cat_conditions_experimental(4.0, 1.0, 1.0).xi2_required, 1.0);
  EXPECT_TRUE(cat_conditions_experimental(4.0, 1.0, 1.0).depth_ok);
  EXPECT_FALSE(cat_conditions_experimental(3.99, 1.0, 1.0).depth_ok);
  EXPECT_EQ(cat_conditions_experimental(1.0, 1.0, 1.0).flag, DepthFlag::Unmet);
  EXPECT_THROW(cat_conditions_experimental(1.0, 1.0, 0.0), domain_error);
}

TEST(CavityEnhancement, Examples) {
  EXPECT_NEAR(cavity_enhancement(0.001, 0.05), 0.04, 1e-15);
  EXPECT_NEAR(cavity_enhancement(0.001, 1.0 - 1e-12), 0.002, 1e-12);
  EXPECT_THROW(cavity_enhancement(0.02, 0.05), domain_error);
  EXPECT_THROW(cavity_enhancement(0.001, 1.0), domain_error);
}

TEST(PolarizationLimit, Examples) {
  EXPECT_NEAR(polarization_limit(0.99), 100.0, 1e-9);
  EXPECT_EQ(polarization_limit(0.5), 2.0);
  EXPECT_NEAR(polarization_limit(0.9999), 1e4, 1e-7);
  EXPECT_THROW(polarization_limit(1.0), domain_error);
}

TEST(RotationTolerance, Examples) {
  EXPECT_NEAR(rotation_tolerance(50.0, 4e5), 1.0 / (50.0 * std::sqrt(4e5)), 1e-20);
  EXPECT_NEAR(rotation_tolerance(50.0, 4e5), 3.16e-5, 0.01e-5);
  EXPECT_NEAR(rotation_tolerance(10.0, 1e3), 1.0 / 300.0, 0.1 / 300.0);
  EXPECT_EQ(rotation_tolerance(1.0, 1.0), 1.0);
}

TEST(RotationTolerance, DecreasingInBothArguments) {
  const auto xs = log_grid(1.0, 1e3, 20);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    EXPECT_LT(rotation_tolerance(xs[i], 1e4), rotation_tolerance(xs[i - 1], 1e4));
    EXPECT_LT(rotation_tolerance(10.0, xs[i]), rotation_tolerance(10.0, xs[i - 1]));
  }
}

TEST(CatLifetime, Examples) {
  EXPECT_NEAR(cat_lifetime(0.1, 50.0), 2e-3, 1e-18);
  EXPECT_NEAR(cat_lifetime(0.1, 10.0), 1e-2, 1e-18);
  EXPECT_EQ(cat_lifetime(0.3, 1.0), 0.3);
}

TEST(SampleGeometry, DepthAndAtomNumber) {
  const SampleGeometry g{1e-9, 1e-4, 1e15, 1e-2};
  EXPECT_NEAR(g.kappa0(), 1e4, 1e-9);
  EXPECT_NEAR(g.n_atoms(), 1e9, 1e-3);
  EXPECT_THROW((SampleGeometry{0.0, 1.0, 1.0, 1.0}.kappa0()), domain_error);
}

TEST(EvaluateScenario, FreeSpacePreset) {
  const auto r = evaluate_scenario(preset_bec_free_space());
  EXPECT_FALSE(r.cavity_used);
  EXPECT_FALSE(r.depth_condition_met);
  EXPECT_EQ(r.depth_flag, DepthFlag::Marginal);
  EXPECT_EQ(r.xi2_max_depth, 50.0);
  EXPECT_NEAR(r.required_depth, 21715.0, 1.0);
  EXPECT_NEAR(r.xi2_required_cat, 73.7, 0.05);
  EXPECT_DOUBLE_EQ(r.kappa_detuned, 0.25);
  EXPECT_DOUBLE_EQ(r.theta_detuned, 50.0);
  EXPECT_NEAR(r.xi2_raw, 50.0, 1e-9);
  EXPECT_NEAR(r.xi2_achieved, 50.0, 1e-9);
  EXPECT_NEAR(r.rotation_tolerance, 3.16e-5, 0.1 * 3e-5);
  EXPECT_NEAR(r.cat_lifetime, 2e-3, 1e-12);
}

TEST(EvaluateScenario, CavityPreset) {
  const auto r = evaluate_scenario(preset_bec_cavity());
  EXPECT_TRUE(r.cavity_used);
  EXPECT_TRUE(r.depth_condition_met);
  EXPECT_EQ(r.depth_flag, DepthFlag::Met);
  EXPECT_EQ(r.xi2_required_cat, 10.0);
  EXPECT_EQ(r.xi2_max_depth, 10.0);
  EXPECT_NEAR(r.xi2_achieved, 10.0, 1e-9);
  EXPECT_NEAR(r.rotation_tolerance, 1.0 / 300.0, 0.1 / 300.0);
  EXPECT_TRUE(r.coherence_ok);
}

TEST(EvaluateScenario, StageNamedInErrors) {
  auto p = preset_bec_cavity();
  p.delta = 100.0;  // single-pass phase 0.05 is not small against T
  try {
    evaluate_scenario(p);
    FAIL();
  } catch (const stage_error& e) {
    EXPECT_EQ(e.stage(), "cavity_enhancement");
  }
  p = preset_bec_free_space();
  p.delta = 5.0;
  try {
    evaluate_scenario(p);
    FAIL();
  } catch (const stage_error& e) {
    EXPECT_EQ(e.stage(), "validate");
  }
}

TEST(EvaluateScenario, ReportConsistentWithNumbers) {
  for (double k0 : log_grid(10.0, 1e5, 8)) {
    for (double np : log_grid(1e3, 1e7, 8)) {
      auto p = preset_bec_free_space();
      p.kappa0 = k0;
      p.n_photons = np;
      const auto r = evaluate_scenario(p);
      EXPECT_EQ(r.depth_condition_met, r.effective_depth >= r.required_depth);
      EXPECT_EQ(r.coherence_ok, r.eta <= 1.0 / r.xi2_raw);
      EXPECT_LE(r.xi2_achieved, r.xi2_raw);
      EXPECT_LE(r.xi2_achieved, r.xi2_max_depth);
      EXPECT_LE(r.xi2_achieved, r.xi2_max_polarization);
      EXPECT_TRUE(std::isfinite(r.beta) && std::isfinite(r.rotation_tolerance));
    }
  }
}

TEST(EvaluateScenario, AchievedSqueezingMonotone) {
  const auto grid = log_grid(10.0, 1e6, 30);
  double prev = 0.0;
  for (double k0 : grid) {
    auto p = preset_bec_free_space();
    p.kappa0 = k0;
    const double x = evaluate_scenario(p).xi2_achieved;
    EXPECT_GE(x, prev);
    prev = x;
  }
  prev = 0.0;
  for (double np : log_grid(1e2, 1e8, 30)) {
    auto p = preset_bec_free_space();
    p.n_photons = np;
    const double x = evaluate_scenario(p).xi2_achieved;
    EXPECT_GE(x, prev);
    prev = x;
  }
}

TEST(DepthFlag, Names) {
  EXPECT_EQ(to_string(DepthFlag::Met), "met");
  EXPECT_EQ(to_string(DepthFlag::Marginal), "marginal");
  EXPECT_EQ(to_string(DepthFlag::Unmet), "unmet");
}

}  // namespace
}  // namespace catqnd
