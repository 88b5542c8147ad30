#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "catqnd/errors.hpp"

namespace catqnd {

// Largest order for which the normalized recurrence is trusted.
inline constexpr std::size_t hermite_max_order = 2000;

namespace detail {

inline void check_hermite_order(std::size_t n) {
  if (n > hermite_max_order) {
    throw domain_error("hermite order " + std::to_string(n) +
                       " exceeds the recurrence budget of " +
                       std::to_string(hermite_max_order));
  }
}

// Runs the normalized three-term recurrence starting from 1 and carries the
// Gaussian prefactor as a separate log scale. Rescaling keeps the running
// values inside double range for |u| where exp(-u^2/2) alone would underflow.
template <typename Sink>
void hermite_recurrence(std::size_t n_max, double u, Sink&& sink) {
  constexpr double rescale_at = 1e150;
  const double log_rescale = std::log(rescale_at);
  double log_scale = -0.5 * u * u - 0.25 * std::log(std::numbers::pi);

  const auto scaled = [&](double v) {
    if (log_scale > -600.0 || v == 0.0) return v * std::exp(log_scale);
    return std::copysign(std::exp(log_scale + std::log(std::abs(v))), v);
  };

  double prev = 0.0;
  double cur = 1.0;
  sink(0, scaled(cur));
  for (std::size_t n = 0; n < n_max; ++n) {
    const double k = static_cast<double>(n);
    const double next =
        u * std::sqrt(2.0 / (k + 1.0)) * cur - std::sqrt(k / (k + 1.0)) * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > rescale_at) {
      cur /= rescale_at;
      prev /= rescale_at;
      log_scale += log_rescale;
    }
    sink(n + 1, scaled(cur));
  }
}

}  // namespace detail

/// Normalized oscillator eigenfunction pi^{-1/4} (2^n n!)^{-1/2} H_n(u) e^{-u^2/2}.
inline double hermite_osc_eigenfunction(std::size_t n, double u) {
  detail::check_hermite_order(n);
  if (!std::isfinite(u)) {
    throw domain_error("hermite argument must be finite");
  }
  double out = 0.0;
  detail::hermite_recurrence(n, u, [&](std::size_t k, double v) {
    if (k == n) out = v;
  });
  return out;
}

/// All eigenfunctions of order 0..n_max at one point.
inline std::vector<double> hermite_osc_table(std::size_t n_max, double u) {
  detail::check_hermite_order(n_max);
  std::vector<double> out(n_max + 1);
  detail::hermite_recurrence(n_max, u, [&](std::size_t k, double v) { out[k] = v; });
  return out;
}

}  // namespace catqnd
