#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "catqnd/errors.hpp"
#include "catqnd/grid.hpp"
#include "catqnd/hermite.hpp"
#include "catqnd/number_state.hpp"

namespace catqnd {

namespace detail {

// Shortest local oscillation period among the populated Hermite functions
// is 2 pi / sqrt(2 n + 1); require four samples per period.
inline double max_resolving_spacing(std::size_t n_eff) {
  return std::numbers::pi / (2.0 * std::sqrt(2.0 * static_cast<double>(n_eff) + 1.0));
}

// Half-width beyond which every populated eigenfunction is negligible.
inline double support_half_width(std::size_t n_eff) {
  return std::sqrt(2.0 * static_cast<double>(n_eff) + 1.0) + 8.0;
}

inline void check_resolution(const NumberState& state, const QuadratureGrid& grid) {
  const std::size_t n_eff = effective_n_max(state);
  const double bound = max_resolving_spacing(n_eff);
  if (grid.spacing() > bound) {
    throw resolution_error("grid spacing " + std::to_string(grid.spacing()) +
                           " exceeds resolution bound " + std::to_string(bound) +
                           " for states populated up to n = " + std::to_string(n_eff));
  }
}

inline std::vector<complex> p_values(const NumberState& state, const QuadratureGrid& grid) {
  const std::size_t n_top = effective_n_max(state, 0.0);
  std::vector<complex> values(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    complex sum = 0.0;
    detail::hermite_recurrence(n_top, grid[k], [&](std::size_t n, double phi) {
      sum += state[n] * phi;
    });
    values[k] = sum;
  }
  return values;
}

// psi_out(y) = (h / sqrt(2 pi)) sum_k exp(i y u_k) psi_in(u_k)
inline std::vector<complex> fourier_sum(const QuadratureWavefunction& wf, const QuadratureGrid& out) {
  const double weight = wf.grid().spacing() / std::sqrt(2.0 * std::numbers::pi);
  const std::vector<double> in_pts = wf.grid().points();
  std::vector<complex> values(out.count());
  for (std::size_t j = 0; j < out.count(); ++j) {
    const double y = out[j];
    complex sum = 0.0;
    for (std::size_t k = 0; k < in_pts.size(); ++k) {
      const double phase = y * in_pts[k];
      sum += complex{std::cos(phase), std::sin(phase)} * wf[k];
    }
    values[j] = sum * weight;
  }
  return values;
}

}  // namespace detail

/// Grid wide and fine enough for every populated eigenfunction of `state`.
/// The same grid serves both quadratures.
inline QuadratureGrid state_grid(const NumberState& state) {
  const std::size_t n_eff = effective_n_max(state);
  const double half_width = detail::support_half_width(n_eff);
  return QuadratureGrid::symmetric(
      half_width, power_of_two_count(2.0 * half_width, detail::max_resolving_spacing(n_eff)));
}

/// Conjugate-basis representation on `out`, using the kernel
/// exp(i x p) / sqrt(2 pi) in both directions. Applying it twice is the
/// parity reflection; on even states it is its own inverse.
inline QuadratureWavefunction fourier_pair(const QuadratureWavefunction& wf, const QuadratureGrid& out) {
  if (!wf.grid().is_symmetric()) {
    throw domain_error("fourier_pair requires an input grid symmetric about 0");
  }
  return {out, detail::fourier_sum(wf, out), conjugate(wf.basis())};
}

inline QuadratureWavefunction fourier_pair(const QuadratureWavefunction& wf) {
  return fourier_pair(wf, wf.grid());
}

/// Evaluates `state` in the requested quadrature on `grid`. The P values
/// expand in the real eigenfunctions <p|n>; the X values are the Fourier
/// transform of the P representation, taken from an internal P grid that
/// covers the state's support and avoids aliasing on `grid`.
inline QuadratureWavefunction to_quadrature(const NumberState& state, const QuadratureGrid& grid,
                                            Basis basis) {
  if (!(norm(state) > 0.0)) {
    throw degenerate_state_error("to_quadrature: state is zero");
  }
  detail::check_resolution(state, grid);
  if (basis == Basis::P) {
    return {grid, detail::p_values(state, grid), Basis::P};
  }

  const std::size_t n_eff = effective_n_max(state);
  const double support = detail::support_half_width(n_eff);
  const double reach = std::max(std::abs(grid.min()), std::abs(grid.max()));
  const double spacing =
      std::min(detail::max_resolving_spacing(n_eff), std::numbers::pi / (reach + support));
  const auto p_grid = QuadratureGrid::symmetric(support, power_of_two_count(2.0 * support, spacing));
  const QuadratureWavefunction p_rep{p_grid, detail::p_values(state, p_grid), Basis::P};
  return fourier_pair(p_rep, grid);
}

}  // namespace catqnd
