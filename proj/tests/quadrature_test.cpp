#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "catqnd/grid.hpp"
#include "catqnd/qnd.hpp"
#include "catqnd/quadrature.hpp"
#include "oracles.hpp"

namespace catqnd {
namespace {

double unit_gaussian(double u) { return std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * u * u); }

double max_abs_diff(const QuadratureWavefunction& a, const QuadratureWavefunction& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

// Random even-parity state with amplitudes decaying fast enough that the
// default grid holds all of its mass.
NumberState random_even_state(std::mt19937_64& gen, std::size_t n_max) {
  std::normal_distribution<double> g;
  std::vector<complex> a(n_max + 1);
  for (std::size_t n = 0; n <= n_max; n += 2) a[n] = complex(g(gen), g(gen)) * std::exp(-0.05 * n);
  return normalize(NumberState(a));
}

TEST(Grid, Invariants) {
  EXPECT_THROW(QuadratureGrid(1.0, 1.0, 10), domain_error);
  EXPECT_THROW(QuadratureGrid(0.0, 1.0, 1), domain_error);
  const QuadratureGrid g(-2.0, 2.0, 5);
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  EXPECT_DOUBLE_EQ(g[0], -2.0);
  EXPECT_DOUBLE_EQ(g[4], 2.0);
  EXPECT_DOUBLE_EQ(g[2], 0.0);
}

TEST(Grid, SymmetricGridIsExactlySymmetric) {
  const QuadratureGrid g = QuadratureGrid::symmetric(11.6192884, 256);
  for (std::size_t k = 0; k < g.count(); ++k) EXPECT_EQ(g[k], -g[g.count() - 1 - k]);
}

TEST(Grid, CatGridPolicy) {
  const QuadratureGrid g = cat_grid(7.0);
  EXPECT_DOUBLE_EQ(g.max(), std::sqrt(14.0) + 8.0);
  EXPECT_EQ(g.count(), 256u);
  EXPECT_LE(g.spacing(), 2.0 * std::numbers::pi / std::sqrt(14.0) / 16.0);
  EXPECT_THROW(cat_grid(0.0), no_cat_error);
}

TEST(ToQuadrature, VacuumInP) {
  const auto grid = QuadratureGrid::symmetric(8.0, 257);
  const auto wf = to_quadrature(NumberState::vacuum(), grid, Basis::P);
  EXPECT_EQ(wf.basis(), Basis::P);
  for (std::size_t k = 0; k < grid.count(); ++k) EXPECT_NEAR(wf[k].real(), unit_gaussian(grid[k]), 1e-14);
}

TEST(ToQuadrature, VacuumInX) {
  const auto grid = QuadratureGrid::symmetric(8.0, 257);
  const auto wf = to_quadrature(NumberState::vacuum(), grid, Basis::X);
  EXPECT_EQ(wf.basis(), Basis::X);
  for (std::size_t k = 0; k < grid.count(); ++k) {
    EXPECT_NEAR(wf[k].real(), unit_gaussian(grid[k]), 1e-10);
    EXPECT_NEAR(wf[k].imag(), 0.0, 1e-10);
  }
}

// Oracle: the defining Gaussian exp(-p^2 / (2 xi2)), normalized by Simpson
// quadrature of its square.
TEST(ToQuadrature, SqueezedStateMatchesDefiningGaussian) {
  const double xi2 = 3.0;
  const NumberState s = squeezed_state_exact(xi2, choose_truncation(xi2, 1.0, 0.0));
  const QuadratureGrid grid = state_grid(s);
  EXPECT_NEAR(riemann_norm(to_quadrature(s, grid, Basis::P)), 1.0, 1e-6);

  // Pointwise agreement in the tails needs a far smaller truncation tail.
  const auto wf = to_quadrature(squeezed_state_exact(xi2, choose_truncation(xi2, 1.0, 0.0, 1e-30)), grid, Basis::P);

  const double reach = 40.0;
  const double z = std::sqrt(oracle::simpson([&](double p) { return std::exp(-p * p / xi2); }, -reach, reach));
  for (std::size_t k = 0; k < grid.count(); k += 7) {
    EXPECT_NEAR(wf[k].real(), std::exp(-grid[k] * grid[k] / (2.0 * xi2)) / z, 1e-8);
  }
}

TEST(ToQuadrature, CoarseGridIsResolutionError) {
  const NumberState s = squeezed_state_exact(20.0, 256);
  EXPECT_THROW(to_quadrature(s, QuadratureGrid::symmetric(30.0, 64), Basis::P), resolution_error);
  EXPECT_THROW(to_quadrature(s, QuadratureGrid::symmetric(30.0, 64), Basis::X), resolution_error);
}

TEST(ToQuadrature, ZeroStateIsDegenerate) {
  EXPECT_THROW(to_quadrature(NumberState({0.0, 0.0}), QuadratureGrid::symmetric(8, 64), Basis::P),
               degenerate_state_error);
}

TEST(FourierPair, GaussianIsSelfDual) {
  const auto grid = QuadratureGrid::symmetric(10.0, 401);
  std::vector<complex> v(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) v[k] = unit_gaussian(grid[k]);
  const auto x = fourier_pair(QuadratureWavefunction(grid, v, Basis::P));
  EXPECT_EQ(x.basis(), Basis::X);
  for (std::size_t k = 0; k < grid.count(); ++k) EXPECT_NEAR(std::abs(x[k] - v[k]), 0.0, 1e-12);
}

TEST(FourierPair, TwoLobesBecomeCosineFringes) {
  const double mu = 7.0, beta = 1.0 / 3.0;
  const double s = std::sqrt(2.0 * mu);
  const auto grid = QuadratureGrid::symmetric(s + 8.0, 512);
  std::vector<complex> p(grid.count()), expected(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double u = grid[k];
    p[k] = std::exp(-(u - s) * (u - s) * beta * beta * mu) + std::exp(-(u + s) * (u + s) * beta * beta * mu);
    expected[k] = std::exp(-u * u / (4.0 * beta * beta * mu)) * std::cos(u * s);
  }
  const auto x = normalized(fourier_pair(normalized(QuadratureWavefunction(grid, p, Basis::P))));
  const auto ref = normalized(QuadratureWavefunction(grid, expected, Basis::X));
  EXPECT_LT(max_abs_diff(x, ref), 1e-6);
}

TEST(FourierPair, TwiceIsParity) {
  const auto grid = QuadratureGrid::symmetric(12.0, 1024);
  std::vector<complex> v(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double u = grid[k];
    v[k] = std::exp(-0.5 * (u - 1.3) * (u - 1.3)) * std::polar(1.0, 0.7 * u) + 0.4 * u * std::exp(-u * u);
  }
  const QuadratureWavefunction in(grid, v, Basis::P);
  const auto twice = fourier_pair(fourier_pair(in));
  EXPECT_EQ(twice.basis(), Basis::P);
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.count(); ++k) worst = std::max(worst, std::abs(twice[k] - v[grid.count() - 1 - k]));
  EXPECT_LT(worst, 1e-6);
}

TEST(FourierPair, AsymmetricGridIsDomainError) {
  const QuadratureGrid grid(-5.0, 6.0, 64);
  const QuadratureWavefunction wf(grid, std::vector<complex>(64, 1.0), Basis::P);
  EXPECT_THROW(fourier_pair(wf), domain_error);
}

TEST(QuadratureProperties, ParsevalOnRandomEvenStates) {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const NumberState s = random_even_state(gen, 10 + 2 * (gen() % 20));
    const QuadratureGrid grid = state_grid(s);
    EXPECT_NEAR(riemann_norm(to_quadrature(s, grid, Basis::P)), norm(s), 1e-6);
    EXPECT_NEAR(riemann_norm(to_quadrature(s, grid, Basis::X)), norm(s), 1e-6);
  }
}

TEST(QuadratureProperties, BasisConsistencyForEvenStates) {
  std::mt19937_64 gen(77);
  for (int trial = 0; trial < 5; ++trial) {
    const NumberState s = random_even_state(gen, 30);
    const QuadratureGrid grid = state_grid(s);
    const auto direct = to_quadrature(s, grid, Basis::X);
    const auto via_p = fourier_pair(to_quadrature(s, grid, Basis::P));
    EXPECT_LT(max_abs_diff(direct, via_p), 1e-6);
  }
  const NumberState sq = squeezed_state_exact(20.0, choose_truncation(20.0, 1.0, 0.0));
  const QuadratureGrid grid = state_grid(sq);
  EXPECT_LT(max_abs_diff(to_quadrature(sq, grid, Basis::X), fourier_pair(to_quadrature(sq, grid, Basis::P))), 1e-6);
}

TEST(QuadratureProperties, OscillatorIdentityFromGrids) {
  std::mt19937_64 gen(9);
  std::vector<NumberState> states{squeezed_state_exact(5.0, choose_truncation(5.0, 1.0, 0.0))};
  for (int i = 0; i < 4; ++i) states.push_back(random_even_state(gen, 24));
  for (const auto& s : states) {
    const QuadratureGrid grid = state_grid(s);
    const double x2 = coordinate_moment(to_quadrature(s, grid, Basis::X), 2);
    const double p2 = coordinate_moment(to_quadrature(s, grid, Basis::P), 2);
    EXPECT_NEAR(0.5 * x2 + 0.5 * p2, number_moments(s).mean_n + 0.5, 1e-6);
  }
}

}  // namespace
}  // namespace catqnd
