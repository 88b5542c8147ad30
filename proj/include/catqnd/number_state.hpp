#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "catqnd/errors.hpp"
#include "catqnd/grid.hpp"

namespace catqnd {

/// Amplitudes over the flip-number basis n = 0..n_max of the rescaled
/// collective-spin oscillator.
class NumberState {
public:
  explicit NumberState(std::vector<complex> amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.empty()) {
      throw domain_error("number state needs at least one amplitude");
    }
  }

  /// |n> truncated at n_max.
  static NumberState basis_state(std::size_t n, std::size_t n_max) {
    if (n > n_max) {
      throw domain_error("basis index " + std::to_string(n) + " above n_max " + std::to_string(n_max));
    }
    std::vector<complex> a(n_max + 1);
    a[n] = 1.0;
    return NumberState(std::move(a));
  }

  static NumberState vacuum(std::size_t n_max = 0) { return basis_state(0, n_max); }

  std::size_t n_max() const noexcept { return amplitudes_.size() - 1; }
  std::size_t size() const noexcept { return amplitudes_.size(); }
  const std::vector<complex>& amplitudes() const noexcept { return amplitudes_; }
  const complex& operator[](std::size_t n) const noexcept { return amplitudes_[n]; }

private:
  std::vector<complex> amplitudes_;
};

inline double norm(const NumberState& state) {
  double sum = 0.0;
  for (const auto& a : state.amplitudes()) sum += std::norm(a);
  return std::sqrt(sum);
}

inline NumberState normalize(const NumberState& state) {
  const double n = norm(state);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw degenerate_state_error("cannot normalize an all-zero number state");
  }
  std::vector<complex> a = state.amplitudes();
  for (auto& v : a) v /= n;
  return NumberState(std::move(a));
}

inline complex inner_product(const NumberState& a, const NumberState& b) {
  complex sum = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t k = 0; k < n; ++k) sum += std::conj(a[k]) * b[k];
  return sum;
}

inline bool has_even_parity(const NumberState& state) {
  for (std::size_t n = 1; n < state.size(); n += 2) {
    if (state[n] != complex{}) return false;
  }
  return true;
}

/// Smallest index such that the probability mass above it is at most
/// `tail_fraction` of the total.
inline std::size_t effective_n_max(const NumberState& state, double tail_fraction = 1e-12) {
  double total = 0.0;
  for (const auto& a : state.amplitudes()) total += std::norm(a);
  double tail = 0.0;
  for (std::size_t n = state.n_max(); n > 0; --n) {
    tail += std::norm(state[n]);
    if (tail > tail_fraction * total) return n;
  }
  return 0;
}

struct NumberMoments {
  double mean_n = 0.0;
  double mean_x = 0.0;
  double mean_p = 0.0;
  double mean_x2 = 0.0;
  double mean_p2 = 0.0;
  double var_x() const { return mean_x2 - mean_x * mean_x; }
  double var_p() const { return mean_p2 - mean_p * mean_p; }
};

/// Quadrature moments from the ladder algebra, with p = (a + a^dag)/sqrt2 and
/// x = i(a - a^dag)/sqrt2 (the Hermite functions live in the p representation).
/// Operators act on an extended space so that truncation does not bias them.
inline NumberMoments number_moments(const NumberState& in) {
  const NumberState s = normalize(in);
  const std::size_t dim = s.size() + 1;
  std::vector<complex> a_psi(dim), adag_psi(dim);
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n > 0) a_psi[n - 1] += std::sqrt(static_cast<double>(n)) * s[n];
    adag_psi[n + 1] += std::sqrt(static_cast<double>(n + 1)) * s[n];
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const complex i{0.0, 1.0};
  NumberMoments m;
  complex ex = 0.0, ep = 0.0;
  for (std::size_t n = 0; n < dim; ++n) {
    const complex psi_n = n < s.size() ? s[n] : complex{};
    const complex p_psi = (a_psi[n] + adag_psi[n]) * inv_sqrt2;
    const complex x_psi = i * (a_psi[n] - adag_psi[n]) * inv_sqrt2;
    ex += std::conj(psi_n) * x_psi;
    ep += std::conj(psi_n) * p_psi;
    m.mean_x2 += std::norm(x_psi);
    m.mean_p2 += std::norm(p_psi);
    m.mean_n += static_cast<double>(n) * std::norm(psi_n);
  }
  m.mean_x = ex.real();
  m.mean_p = ep.real();
  return m;
}

inline constexpr double default_tail_tol = 1e-10;
inline constexpr std::size_t default_truncation_cap = 4096;

/// Smallest even n_max that keeps the squeezed-state tail below `tail_tol`
/// and, when mu_max > 0, leaves ten resolution widths 1/beta above mu_max.
inline std::size_t choose_truncation(double xi2, double beta, double mu_max,
                                     double tail_tol = default_tail_tol,
                                     std::size_t cap = default_truncation_cap) {
  if (!(xi2 >= 1.0) || !std::isfinite(xi2)) throw domain_error("choose_truncation: xi2 must be >= 1");
  if (!(beta > 0.0)) throw domain_error("choose_truncation: beta must be > 0");
  if (!(mu_max >= 0.0)) throw domain_error("choose_truncation: mu_max must be >= 0");
  if (!(tail_tol > 0.0 && tail_tol <= 1e-4)) {
    throw domain_error("choose_truncation: tail_tol must lie in (0, 1e-4]");
  }

  // |c(n+2)|^2 / |c(n)|^2 < q^2, so the tail beyond n is bounded by
  // |c(n)|^2 q^2 / (1 - q^2) with c(0) = 1 (the norm is >= 1).
  const double q = (xi2 - 1.0) / (xi2 + 1.0);
  const double log_r = q > 0.0 ? std::log(q / 2.0) : -std::numeric_limits<double>::infinity();
  const double log_geom = q > 0.0 ? 2.0 * std::log(q) - std::log1p(-q * q) : 0.0;
  const auto tail_bound = [&](std::size_t n) {
    if (q == 0.0) return 0.0;
    const double k = static_cast<double>(n);
    const double log_c2 = k * log_r + std::lgamma(k + 1.0) - 2.0 * std::lgamma(k / 2.0 + 1.0);
    return std::exp(log_c2 + log_geom);
  };
  const double floor_n = mu_max > 0.0 ? mu_max + 10.0 / beta : 0.0;

  constexpr std::size_t search_limit = std::size_t{1} << 24;
  for (std::size_t n = 2; n <= search_limit; n += 2) {
    if (static_cast<double>(n) >= floor_n && tail_bound(n) < tail_tol) {
      if (n > cap) {
        throw capacity_error("truncation needs n_max = " + std::to_string(n) + " above cap " +
                                 std::to_string(cap),
                             n);
      }
      return n;
    }
  }
  throw capacity_error("truncation search exhausted", search_limit);
}

}  // namespace catqnd
