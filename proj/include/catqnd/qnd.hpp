#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "catqnd/errors.hpp"
#include "catqnd/grid.hpp"
#include "catqnd/number_state.hpp"
#include "catqnd/random.hpp"

namespace catqnd {

inline double alpha_from_xi2(double xi2) {
  if (!(xi2 >= 1.0) || !std::isfinite(xi2)) {
    throw domain_error("squeezing degree xi2 must be >= 1, got " + std::to_string(xi2));
  }
  return std::sqrt(xi2 - 1.0);
}

/// Coupling of the first (quadrature) QND step and the squeezing it yields.
struct SqueezeParams {
  double alpha = 0.0;
  double xi2 = 1.0;

  static SqueezeParams from_alpha(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw domain_error("alpha must be finite and >= 0");
    }
    return {alpha, alpha * alpha + 1.0};
  }
  static SqueezeParams from_xi2(double xi2) { return {alpha_from_xi2(xi2), xi2}; }
};

/// Coupling of the second (number) QND step; 1/beta is the flip-number resolution.
struct NumberQndParams {
  double beta;

  explicit NumberQndParams(double b) : beta(b) {
    if (!(b > 0.0) || !std::isfinite(b)) throw domain_error("beta must be finite and > 0");
  }
};

enum class MeasurementStep { First, Second };

struct MeasurementOutcome {
  double value;
  MeasurementStep step;
};

namespace detail {

inline void require_even(std::size_t n_max) {
  if (n_max % 2 != 0) {
    throw domain_error("squeezed states need an even n_max, got " + std::to_string(n_max));
  }
}

}  // namespace detail

/// Recentered squeezed state after the first QND step:
/// c(n) = (r)^{n/2} sqrt(n!) / (n/2)! for even n with r = (xi2-1)/(2(xi2+1)),
/// zero for odd n. Evaluated in log space, then normalized.
inline NumberState squeezed_state_exact(double xi2, std::size_t n_max) {
  if (!(xi2 >= 1.0)) throw domain_error("squeezed_state_exact: xi2 must be >= 1");
  detail::require_even(n_max);
  std::vector<complex> c(n_max + 1);
  c[0] = 1.0;
  if (xi2 > 1.0) {
    const double log_r = std::log((xi2 - 1.0) / (2.0 * (xi2 + 1.0)));
    for (std::size_t n = 2; n <= n_max; n += 2) {
      const double k = static_cast<double>(n);
      c[n] = std::exp(0.5 * k * log_r + 0.5 * std::lgamma(k + 1.0) - std::lgamma(0.5 * k + 1.0));
    }
  }
  return normalize(NumberState(std::move(c)));
}

/// Large-n form of the squeezed coefficients, c(n) ~ q^{n/2} with
/// q = (xi2-1)/(xi2+1), which drops the slowly varying n^{-1/4} factor.
inline NumberState squeezed_state_stirling(double xi2, std::size_t n_max) {
  if (!(xi2 > 1.0)) throw domain_error("squeezed_state_stirling: requires xi2 > 1");
  detail::require_even(n_max);
  const double log_q = std::log((xi2 - 1.0) / (xi2 + 1.0));
  std::vector<complex> c(n_max + 1);
  for (std::size_t n = 0; n <= n_max; n += 2) {
    c[n] = std::exp(0.5 * static_cast<double>(n) * log_q);
  }
  return normalize(NumberState(std::move(c)));
}

/// Atomic x-wavefunction conditioned on the first outcome p_P, before the
/// recentering rotation: exp[-(alpha x - p_P)^2 / 2] exp[-x^2 / 2].
inline QuadratureWavefunction conditional_first_step(double alpha, double p_p, const QuadratureGrid& grid) {
  if (!(alpha >= 0.0) || !std::isfinite(p_p)) {
    throw domain_error("conditional_first_step: need alpha >= 0 and finite p_P");
  }
  const double xi2 = alpha * alpha + 1.0;
  const double center = alpha * p_p / xi2;
  const double reach = 8.0 / std::sqrt(xi2);
  if (grid.min() > center - reach || grid.max() < center + reach) {
    throw domain_error("conditional_first_step: grid must cover the conditional Gaussian to 8 widths");
  }
  std::vector<complex> values(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    // Completed square keeps the exponent O(1) near the peak for any p_P.
    const double d = grid[k] - center;
    values[k] = std::exp(-0.5 * xi2 * d * d);
  }
  return normalized(QuadratureWavefunction(grid, std::move(values), Basis::X));
}

/// Marginal law of the first light outcome: zero-mean Gaussian, variance (1 + alpha^2)/2.
inline MeasurementOutcome sample_first_outcome(double alpha, RandomSource& rng) {
  return {rng.normal(0.0, std::sqrt(0.5 * (1.0 + alpha * alpha))), MeasurementStep::First};
}

inline constexpr double improbable_weight_threshold = 1e-300;

/// Atomic state conditioned on the second light outcome p_R:
/// amplitude_n * exp[-(beta n - p_R)^2 / 2], renormalized.
inline NumberState apply_number_qnd(const NumberState& state, double beta, double p_r) {
  if (!(beta >= 0.0) || !std::isfinite(beta) || !std::isfinite(p_r)) {
    throw domain_error("apply_number_qnd: need finite beta >= 0 and finite p_R");
  }
  const auto exponent = [&](std::size_t n) {
    const double d = beta * static_cast<double>(n) - p_r;
    return -0.5 * d * d;
  };

  // Work relative to the largest populated exponent so that the renormalized
  // state is exact even when the raw weights underflow.
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < state.size(); ++n) {
    if (state[n] != complex{}) shift = std::max(shift, exponent(n));
  }
  if (!std::isfinite(shift)) throw degenerate_state_error("apply_number_qnd: state is zero");

  std::vector<complex> out(state.size());
  double shifted_norm2 = 0.0;
  for (std::size_t n = 0; n < state.size(); ++n) {
    if (state[n] == complex{}) continue;
    out[n] = state[n] * std::exp(exponent(n) - shift);
    shifted_norm2 += std::norm(out[n]);
  }
  const double log_weight = std::log(shifted_norm2) + 2.0 * shift;
  if (log_weight < std::log(improbable_weight_threshold)) {
    throw improbable_outcome_error("outcome p_R = " + std::to_string(p_r) +
                                       " has conditional weight 1e" +
                                       std::to_string(log_weight / std::numbers::ln10) +
                                       ", below 1e-300",
                                   std::exp(log_weight));
  }
  const double scale = 1.0 / std::sqrt(shifted_norm2);
  for (auto& v : out) v *= scale;
  return NumberState(std::move(out));
}

/// Density of the second light outcome: a Gaussian mixture with weights
/// |c_n|^2, means beta n and common standard deviation 1/sqrt2.
class OutcomeDensity {
public:
  OutcomeDensity(const NumberState& state, double beta) : beta_(beta) {
    if (!(beta >= 0.0)) throw domain_error("outcome density: beta must be >= 0");
    double total = 0.0;
    for (std::size_t n = 0; n < state.size(); ++n) {
      const double w = std::norm(state[n]);
      if (w > 0.0) {
        weights_.push_back(w);
        means_.push_back(beta * static_cast<double>(n));
        total += w;
      }
    }
    if (!(total > 0.0)) throw degenerate_state_error("outcome density: state is zero");
    for (auto& w : weights_) w /= total;
  }

  static constexpr double component_stddev = std::numbers::sqrt2 / 2.0;

  double operator()(double p) const { return pdf(p); }

  double pdf(double p) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      const double d = p - means_[i];
      sum += weights_[i] * std::exp(-d * d);
    }
    return sum / std::sqrt(std::numbers::pi);
  }

  double cdf(double p) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      sum += weights_[i] * 0.5 * std::erfc(-(p - means_[i]));
    }
    return sum;
  }

  double mean() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) sum += weights_[i] * means_[i];
    return sum;
  }

  double beta() const noexcept { return beta_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<double>& means() const noexcept { return means_; }

private:
  double beta_;
  std::vector<double> weights_;
  std::vector<double> means_;
};

inline OutcomeDensity outcome_density_second(const NumberState& state, double beta) {
  return OutcomeDensity(state, beta);
}

/// Exact mixture sampling: n with probability |c_n|^2, then p_R ~ N(beta n, 1/2).
inline MeasurementOutcome sample_second_outcome(const NumberState& state, double beta, RandomSource& rng) {
  std::vector<double> weights(state.size());
  for (std::size_t n = 0; n < state.size(); ++n) weights[n] = std::norm(state[n]);
  const std::size_t n = rng.discrete(weights);
  return {rng.normal(beta * static_cast<double>(n), OutcomeDensity::component_stddev),
          MeasurementStep::Second};
}

struct MuEstimate {
  double exact;
  double approx;
};

/// Mean flip number of the conditional state:
/// mu = p_R/beta + ln((xi2-1)/(xi2+1)) / (2 beta^2), approximately p_R/beta.
inline MuEstimate mu_of_outcome(double p_r, double beta, double xi2) {
  if (!(beta > 0.0)) throw domain_error("mu_of_outcome: beta must be > 0");
  if (!(xi2 > 1.0)) throw domain_error("mu_of_outcome: xi2 must be > 1");
  const double approx = p_r / beta;
  const double exact = approx + std::log((xi2 - 1.0) / (xi2 + 1.0)) / (2.0 * beta * beta);
  return {exact, approx};
}

/// One full protocol run ending in the conditional (cat) state.
struct CatPreparation {
  double xi2;
  double beta;
  double p_r;
  MuEstimate mu;
  std::size_t n_max;
  NumberState squeezed;
  NumberState cat;
};

inline CatPreparation prepare_cat(double xi2, double beta, double p_r, double tail_tol = default_tail_tol,
                                  std::size_t cap = default_truncation_cap) {
  const MuEstimate mu = mu_of_outcome(p_r, beta, xi2);
  const std::size_t n_max = choose_truncation(xi2, beta, std::max(mu.exact, 0.0), tail_tol, cap);
  NumberState squeezed = squeezed_state_exact(xi2, n_max);
  NumberState cat = apply_number_qnd(squeezed, beta, p_r);
  return {xi2, beta, p_r, mu, n_max, std::move(squeezed), std::move(cat)};
}

}  // namespace catqnd
