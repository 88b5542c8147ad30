#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "catqnd/errors.hpp"
#include "catqnd/grid.hpp"
#include "catqnd/number_state.hpp"
#include "catqnd/quadrature.hpp"

namespace catqnd {

/// Parameters of the two-lobe approximation to the conditional state.
/// All widths are amplitude-profile widths: sigma in exp[-(u - u0)^2 / (2 sigma^2)].
struct CatApproxParams {
  double mu;
  double beta;

  CatApproxParams(double m, double b) : mu(m), beta(b) {
    if (!(b > 0.0) || !std::isfinite(b)) throw domain_error("cat approximation: beta must be > 0");
    if (!std::isfinite(m)) throw domain_error("cat approximation: mu must be finite");
  }

  double peak_position() const { return std::sqrt(2.0 * mu); }
  double peak_std() const { return 1.0 / (beta * std::sqrt(2.0 * mu)); }
  double fringe_period() const { return 2.0 * std::numbers::pi / std::sqrt(2.0 * mu); }
  double envelope_std() const { return beta * std::sqrt(2.0 * mu); }
};

struct CatMetrics {
  std::pair<double, double> peak_positions{};
  double peak_std = 0.0;
  double peak_separation = 0.0;
  double fringe_period = 0.0;
  double envelope_std = 0.0;
  double visibility = 0.0;
  bool resolvable = false;
  bool reachable = false;
};

namespace detail {

inline void require_cat(const CatApproxParams& params) {
  if (!(params.mu > 0.0)) {
    throw no_cat_error("no two-lobe state for mu = " + std::to_string(params.mu) + " <= 0");
  }
}

// Vertex of the parabola through three equally spaced samples, as an offset
// in units of the spacing from the middle sample, plus the value there.
inline std::pair<double, double> parabolic_vertex(double left, double mid, double right) {
  const double curvature = left - 2.0 * mid + right;
  if (curvature >= 0.0) return {0.0, mid};
  const double offset = 0.5 * (left - right) / curvature;
  return {offset, mid - 0.25 * (left - right) * offset};
}

// Smallest |psi|^2 on the two segments around index k, with psi linearly
// interpolated in the complex plane.
inline double interpolated_minimum(const std::vector<complex>& v, std::size_t k) {
  double best = std::norm(v[k]);
  const auto segment_min = [&](const complex& a, const complex& b) {
    const complex d = b - a;
    const double dd = std::norm(d);
    double t = dd > 0.0 ? -std::real(std::conj(a) * d) / dd : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return std::norm(a + t * d);
  };
  if (k > 0) best = std::min(best, segment_min(v[k - 1], v[k]));
  if (k + 1 < v.size()) best = std::min(best, segment_min(v[k], v[k + 1]));
  return best;
}

}  // namespace detail

/// Two Gaussian lobes at +-sqrt(2 mu) in p, each exp[-(p -+ sqrt(2 mu))^2 beta^2 mu].
inline QuadratureWavefunction approx_p_wavefunction(const CatApproxParams& params, const QuadratureGrid& grid) {
  detail::require_cat(params);
  const double center = params.peak_position();
  const double rate = params.beta * params.beta * params.mu;
  std::vector<complex> values(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double p = grid[k];
    const double a = p - center;
    const double b = p + center;
    values[k] = std::exp(-a * a * rate) + std::exp(-b * b * rate);
  }
  return normalized(QuadratureWavefunction(grid, std::move(values), Basis::P));
}

/// Fourier image of the two lobes: exp[-x^2 / (4 beta^2 mu)] cos(x sqrt(2 mu)).
inline QuadratureWavefunction approx_x_wavefunction(const CatApproxParams& params, const QuadratureGrid& grid) {
  detail::require_cat(params);
  const double period = params.fringe_period();
  if (grid.spacing() > period / 16.0) {
    throw resolution_error("grid spacing " + std::to_string(grid.spacing()) +
                           " gives fewer than 16 points per fringe period " + std::to_string(period));
  }
  const double k_fringe = params.peak_position();
  const double rate = 1.0 / (4.0 * params.beta * params.beta * params.mu);
  std::vector<complex> values(grid.count());
  for (std::size_t k = 0; k < grid.count(); ++k) {
    const double x = grid[k];
    values[k] = std::exp(-x * x * rate) * std::cos(x * k_fringe);
  }
  return normalized(QuadratureWavefunction(grid, std::move(values), Basis::X));
}

/// Symmetric grid fine and wide enough for both the number state and the
/// two-lobe structure at mean flip number mu.
inline QuadratureGrid analysis_grid(const NumberState& state, double mu) {
  const QuadratureGrid base = state_grid(state);
  if (!(mu > 0.0)) return base;
  const QuadratureGrid cat = cat_grid(mu);
  const double half = std::max(base.max(), cat.max());
  const double spacing = std::min(base.spacing(), cat.spacing());
  return QuadratureGrid::symmetric(half, power_of_two_count(2.0 * half, spacing));
}

inline constexpr double peak_threshold_fraction = 0.05;

struct Peaks {
  std::vector<double> positions;
  std::vector<double> stds;
};

/// Local maxima of |psi|^2 above 5% of the global maximum. Positions are
/// refined by parabolic interpolation; each width is the |psi|-weighted
/// second moment about the peak over its lobe, bounded by the neighbouring
/// minima.
inline Peaks detect_peaks(const QuadratureWavefunction& wf) {
  if (wf.basis() != Basis::P) throw domain_error("detect_peaks expects a P-basis wavefunction");
  const std::size_t n = wf.size();
  std::vector<double> density(n);
  for (std::size_t k = 0; k < n; ++k) density[k] = std::norm(wf[k]);
  const double global = *std::max_element(density.begin(), density.end());
  if (!(global > 0.0)) throw degenerate_state_error("detect_peaks: wavefunction is zero");

  const double h = wf.grid().spacing();
  Peaks out;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const bool is_max = density[k] > density[k - 1] && density[k] >= density[k + 1];
    if (!is_max || density[k] < peak_threshold_fraction * global) continue;

    const auto [offset, value] = detail::parabolic_vertex(density[k - 1], density[k], density[k + 1]);
    (void)value;
    const double position = wf.grid()[k] + offset * h;

    std::size_t lo = k;
    while (lo > 0 && density[lo - 1] <= density[lo]) --lo;
    std::size_t hi = k;
    while (hi + 1 < n && density[hi + 1] <= density[hi]) ++hi;

    double mass = 0.0;
    double second = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) {
      const double w = std::abs(wf[j]);
      const double d = wf.grid()[j] - position;
      mass += w;
      second += w * d * d;
    }
    out.positions.push_back(position);
    out.stds.push_back(std::sqrt(second / mass));
  }
  if (out.positions.empty()) throw degenerate_state_error("detect_peaks: no peak above threshold");
  return out;
}

struct FringeMetrics {
  double period;
  double visibility;
};

inline constexpr double fringe_region_fraction = 1e-3;

/// Fringe period from the mean spacing of zero crossings of Re(psi) where the
/// envelope is above 1e-3 of its maximum, and visibility
/// (max - min) / (max + min) of |psi|^2 over the central maximum and its
/// adjacent minima.
inline FringeMetrics fringe_metrics(const QuadratureWavefunction& wf) {
  if (wf.basis() != Basis::X) throw domain_error("fringe_metrics expects an X-basis wavefunction");
  const std::size_t n = wf.size();
  std::size_t peak = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (std::abs(wf[k]) > std::abs(wf[peak])) peak = k;
  }
  const double top = std::abs(wf[peak]);
  if (!(top > 0.0)) throw degenerate_state_error("fringe_metrics: wavefunction is zero");

  // Remove the global phase so crossings of the real part are meaningful.
  const complex unphase = std::conj(wf[peak]) / top;
  std::vector<complex> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = wf[k] * unphase;

  std::size_t first = 0;
  while (std::abs(v[first]) < fringe_region_fraction * top) ++first;
  std::size_t last = n - 1;
  while (std::abs(v[last]) < fringe_region_fraction * top) --last;

  std::vector<double> crossings;
  const double h = wf.grid().spacing();
  for (std::size_t k = first; k < last; ++k) {
    const double a = v[k].real();
    const double b = v[k + 1].real();
    if ((a < 0.0 && b >= 0.0) || (a > 0.0 && b <= 0.0)) {
      if (b == 0.0) continue;  // counted on the next segment
      crossings.push_back(wf.grid()[k] + h * a / (a - b));
    }
  }
  if (crossings.size() < 3) {
    throw no_fringe_error("found " + std::to_string(crossings.size()) +
                          " zero crossings inside the envelope, need at least 3");
  }
  const double period = 2.0 * (crossings.back() - crossings.front()) /
                        static_cast<double>(crossings.size() - 1);

  // Central maximum: the local maximum of |psi|^2 closest to x = 0.
  std::vector<double> density(n);
  for (std::size_t k = 0; k < n; ++k) density[k] = std::norm(v[k]);
  std::size_t centre = n;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (density[k] > density[k - 1] && density[k] >= density[k + 1] &&
        (centre == n || std::abs(wf.grid()[k]) < std::abs(wf.grid()[centre]))) {
      centre = k;
    }
  }
  if (centre == n) throw no_fringe_error("fringe_metrics: no interior maximum");
  const double max_val =
      detail::parabolic_vertex(density[centre - 1], density[centre], density[centre + 1]).second;

  std::size_t lo = centre;
  while (lo > 0 && density[lo - 1] <= density[lo]) --lo;
  std::size_t hi = centre;
  while (hi + 1 < n && density[hi + 1] <= density[hi]) ++hi;
  const double min_val = std::max(detail::interpolated_minimum(v, lo), detail::interpolated_minimum(v, hi));
  const double visibility = std::clamp((max_val - min_val) / (max_val + min_val), 0.0, 1.0);
  return {period, visibility};
}

/// Amplitude-profile width of the fringe envelope, from a least-squares fit of
/// log|psi| against x^2 over the fringe maxima above 1e-3 of the peak.
inline double envelope_std(const QuadratureWavefunction& wf) {
  const std::size_t n = wf.size();
  double top = 0.0;
  for (const auto& v : wf.values()) top = std::max(top, std::abs(v));
  if (!(top > 0.0)) throw degenerate_state_error("envelope_std: wavefunction is zero");

  std::vector<double> xs, ys;
  const double h = wf.grid().spacing();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double l = std::abs(wf[k - 1]), m = std::abs(wf[k]), r = std::abs(wf[k + 1]);
    if (!(m > l && m >= r) || m < fringe_region_fraction * top) continue;
    const auto [offset, value] = detail::parabolic_vertex(l, m, r);
    const double x = wf.grid()[k] + offset * h;
    xs.push_back(x * x);
    ys.push_back(std::log(value));
  }
  if (xs.size() < 2) throw no_fringe_error("envelope_std: need at least two fringe maxima");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double m = static_cast<double>(xs.size());
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  if (!(slope < 0.0)) throw no_fringe_error("envelope_std: envelope does not decay");
  return std::sqrt(-0.5 / slope);
}

struct CatConditions {
  bool resolvable;
  bool reachable;
  bool combined;
};

/// Observability of the cat: lobes resolvable (mu >= 1/beta), mean flip
/// number reachable from the squeezed state (mu <= xi2), and the
/// parameter-only condition beta xi2 > 1.
inline CatConditions check_cat_conditions(double mu, double beta, double xi2) {
  if (!(beta > 0.0)) throw domain_error("check_cat_conditions: beta must be > 0");
  return {mu >= 1.0 / beta, mu <= xi2, beta * xi2 > 1.0};
}

inline double overlap(const QuadratureWavefunction& a, const QuadratureWavefunction& b) {
  return std::min(1.0, std::abs(inner_product(a, b)));
}

/// Peak, fringe and condition metrics of a conditional state, measured on the
/// given P and X representations.
inline CatMetrics measure_cat(const QuadratureWavefunction& p_rep, const QuadratureWavefunction& x_rep,
                              double mu, double beta, double xi2) {
  const Peaks peaks = detect_peaks(p_rep);
  // Outermost lobe on each side of the origin.
  const std::size_t last = peaks.positions.size() - 1;
  CatMetrics m;
  m.peak_positions = {peaks.positions.front(), peaks.positions.back()};
  m.peak_separation = std::abs(peaks.positions.back() - peaks.positions.front());
  m.peak_std = 0.5 * (peaks.stds.front() + peaks.stds[last]);
  const FringeMetrics fringes = fringe_metrics(x_rep);
  m.fringe_period = fringes.period;
  m.visibility = fringes.visibility;
  m.envelope_std = envelope_std(x_rep);
  const CatConditions c = check_cat_conditions(mu, beta, xi2);
  m.resolvable = c.resolvable;
  m.reachable = c.reachable;
  return m;
}

}  // namespace catqnd
