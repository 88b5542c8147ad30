#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "catqnd/errors.hpp"

namespace catqnd {

using complex = std::complex<double>;

enum class Basis { X, P };

inline constexpr std::string_view to_string(Basis b) { return b == Basis::X ? "X" : "P"; }
inline constexpr Basis conjugate(Basis b) { return b == Basis::X ? Basis::P : Basis::X; }

/// Uniform grid of `count` points from `min` to `max` inclusive.
class QuadratureGrid {
public:
  QuadratureGrid(double min, double max, std::size_t count) : min_(min), max_(max), count_(count) {
    if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
      throw domain_error("grid requires finite min < max");
    }
    if (count < 2) {
      throw domain_error("grid requires at least two points");
    }
  }

  static QuadratureGrid symmetric(double half_width, std::size_t count) {
    return QuadratureGrid(-half_width, half_width, count);
  }

  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  std::size_t count() const noexcept { return count_; }
  double spacing() const noexcept { return (max_ - min_) / static_cast<double>(count_ - 1); }

  double operator[](std::size_t k) const noexcept {
    // Fill from both ends so symmetric grids are exactly symmetric.
    const double last = static_cast<double>(count_ - 1);
    if (k + k < count_) return min_ + (max_ - min_) * (static_cast<double>(k) / last);
    return max_ - (max_ - min_) * (static_cast<double>(count_ - 1 - k) / last);
  }

  std::vector<double> points() const {
    std::vector<double> out(count_);
    for (std::size_t k = 0; k < count_; ++k) out[k] = (*this)[k];
    return out;
  }

  bool is_symmetric() const noexcept {
    return std::abs(min_ + max_) <= 1e-12 * std::max(std::abs(min_), std::abs(max_));
  }

  friend bool operator==(const QuadratureGrid&, const QuadratureGrid&) = default;

private:
  double min_;
  double max_;
  std::size_t count_;
};

/// Smallest power of two (at least 2) with count - 1 >= span / max_spacing.
inline std::size_t power_of_two_count(double span, double max_spacing) {
  const double intervals = std::ceil(span / max_spacing);
  auto needed = static_cast<std::size_t>(std::max(1.0, intervals)) + 1;
  return std::bit_ceil(needed);
}

/// Default grid for a cat state with mean flip number mu: range covers both
/// lobes with margin, and every fringe period gets at least 16 samples.
inline QuadratureGrid cat_grid(double mu) {
  if (!(mu > 0.0)) {
    throw no_cat_error("cat grid requires mu > 0, got " + std::to_string(mu));
  }
  const double lobe = std::sqrt(2.0 * mu);
  const double half_width = lobe + 8.0;
  const double period = 2.0 * std::numbers::pi / lobe;
  return QuadratureGrid::symmetric(half_width, power_of_two_count(2.0 * half_width, period / 16.0));
}

class QuadratureWavefunction {
public:
  QuadratureWavefunction(QuadratureGrid grid, std::vector<complex> values, Basis basis)
      : grid_(std::move(grid)), values_(std::move(values)), basis_(basis) {
    if (values_.size() != grid_.count()) {
      throw domain_error("wavefunction has " + std::to_string(values_.size()) +
                         " values for a grid of " + std::to_string(grid_.count()) + " points");
    }
  }

  const QuadratureGrid& grid() const noexcept { return grid_; }
  const std::vector<complex>& values() const noexcept { return values_; }
  Basis basis() const noexcept { return basis_; }
  std::size_t size() const noexcept { return values_.size(); }
  const complex& operator[](std::size_t k) const noexcept { return values_[k]; }

private:
  QuadratureGrid grid_;
  std::vector<complex> values_;
  Basis basis_;
};

/// sqrt of the Riemann sum of |psi|^2 on the grid.
inline double riemann_norm(const QuadratureWavefunction& wf) {
  double sum = 0.0;
  for (const auto& v : wf.values()) sum += std::norm(v);
  return std::sqrt(sum * wf.grid().spacing());
}

inline QuadratureWavefunction normalized(const QuadratureWavefunction& wf) {
  const double n = riemann_norm(wf);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw degenerate_state_error("cannot normalize a wavefunction with zero norm");
  }
  std::vector<complex> values = wf.values();
  for (auto& v : values) v /= n;
  return {wf.grid(), std::move(values), wf.basis()};
}

/// Riemann inner product <a|b>.
inline complex inner_product(const QuadratureWavefunction& a, const QuadratureWavefunction& b) {
  if (a.grid() != b.grid() || a.basis() != b.basis()) {
    throw domain_error("inner product requires identical grids and bases");
  }
  complex sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::conj(a[k]) * b[k];
  return sum * a.grid().spacing();
}

/// Riemann expectation of coord^power under |psi|^2 (psi assumed normalized).
inline double coordinate_moment(const QuadratureWavefunction& wf, int power) {
  double sum = 0.0;
  for (std::size_t k = 0; k < wf.size(); ++k) {
    sum += std::pow(wf.grid()[k], power) * std::norm(wf[k]);
  }
  return sum * wf.grid().spacing();
}

}  // namespace catqnd
