#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfhurst/errors.hpp"
#include "mfhurst/fitting.hpp"
#include "mfhurst/series.hpp"

namespace mfhurst {

/// Configuration of one MFDFA run: scale grid, moment-order grid, detrending
/// order and the scale subset used for the scaling regression.
///
/// An empty `scales` vector means "derive the default grid from the analyzed
/// series length": ~20 integer scales log-spaced between 16 and N/4 with
/// duplicates removed. N/4 keeps at least 8 segments at the largest scale;
/// 16 keeps cubic fits overdetermined at the smallest.
struct MfdfaConfig {
  std::vector<int> scales;
  std::vector<double> q_grid = default_q_grid();
  int detrend_order = 3;
  std::optional<std::pair<int, int>> fit_range;  // inclusive [s_lo, s_hi]

  /// q = -5 .. +5 in steps of 0.25 (41 values, symmetric, includes 0).
  static std::vector<double> default_q_grid(double q_max = 5.0,
                                            double q_step = 0.25) {
    std::vector<double> grid;
    const int half = static_cast<int>(std::llround(q_max / q_step));
    grid.reserve(static_cast<std::size_t>(2 * half + 1));
    for (int i = -half; i <= half; ++i)
      grid.push_back(static_cast<double>(i) * q_step);
    return grid;
  }

  static std::vector<double> q_grid_from_range(double q_min, double q_max,
                                               double q_step) {
    if (!(q_step > 0.0) || !(q_max > q_min))
      raise(ErrorCode::ConfigInvalid, "need q_min < q_max and q_step > 0");
    const long count = std::lround((q_max - q_min) / q_step);
    if (std::abs(q_min + static_cast<double>(count) * q_step - q_max) > 1e-9)
      raise(ErrorCode::ConfigInvalid, "q_step must divide the q range");
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count) + 1);
    for (long i = 0; i <= count; ++i)
      grid.push_back(q_min + static_cast<double>(i) * q_step);
    return grid;
  }

  static std::vector<int> log_spaced_scales(int s_min, int s_max, int count) {
    if (s_min < 2 || s_max < s_min || count < 1)
      raise(ErrorCode::ConfigInvalid, "invalid scale grid parameters");
    if (s_max == s_min || count == 1) return {s_min};
    std::vector<int> scales;
    const double lo = std::log(static_cast<double>(s_min));
    const double hi = std::log(static_cast<double>(s_max));
    for (int j = 0; j < count; ++j) {
      const double t = lo + (hi - lo) * static_cast<double>(j) /
                                static_cast<double>(count - 1);
      scales.push_back(static_cast<int>(std::llround(std::exp(t))));
    }
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    return scales;
  }

  static std::vector<int> default_scales(std::size_t n, int s_min = 16,
                                         int count = 20) {
    const int s_max = static_cast<int>(n / 4);
    if (s_max < s_min)
      raise(ErrorCode::ConfigInvalid,
            "series too short for the default scale grid (need length >= " +
                std::to_string(4 * s_min) + ")");
    return log_spaced_scales(s_min, s_max, count);
  }

  std::vector<int> effective_scales(std::size_t n) const {
    return scales.empty() ? default_scales(n) : scales;
  }

  /// Checks every config invariant against the analyzed series length.
  void validate(std::size_t n) const {
    if (detrend_order < 0 || detrend_order > 8)
      raise(ErrorCode::ConfigInvalid, "detrend order must be in [0, 8]");
    const std::vector<int> s = effective_scales(n);
    if (s.empty()) raise(ErrorCode::ConfigInvalid, "empty scale grid");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < detrend_order + 2)
        raise(ErrorCode::ScaleTooSmall,
              "scale " + std::to_string(s[i]) +
                  " too small for detrend order " +
                  std::to_string(detrend_order));
      if (i > 0 && s[i] <= s[i - 1])
        raise(ErrorCode::ConfigInvalid, "scales must be strictly increasing");
    }
    if (static_cast<std::size_t>(s.back()) > n / 4)
      raise(ErrorCode::ScaleTooLarge,
            "largest scale " + std::to_string(s.back()) +
                " exceeds series length / 4");
    if (q_grid.empty()) raise(ErrorCode::ConfigInvalid, "empty q grid");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
      if (!(q_grid[i] > q_grid[i - 1]))
        raise(ErrorCode::ConfigInvalid, "q grid must be strictly increasing");
    for (double q : q_grid) {
      bool mirrored = false;
      for (double r : q_grid)
        if (std::abs(r + q) < 1e-12) {
          mirrored = true;
          break;
        }
      if (!mirrored)
        raise(ErrorCode::ConfigInvalid, "q grid must be symmetric about 0");
    }
    if (fit_range && fit_range->first > fit_range->second)
      raise(ErrorCode::ConfigInvalid, "fit range lower bound above upper");
  }
};

/// Step (i): profile Y(i) = sum_{j<=i} (r(j) - mean(r)).
inline std::vector<double> profile(std::span<const double> values) {
  if (values.size() < 2)
    raise(ErrorCode::SeriesTooShort, "profile needs at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  std::vector<double> prof(values.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    acc += values[i] - mean;
    prof[i] = acc;
  }
  return prof;
}

/// Steps (ii)-(iii): per-segment detrended variances at scale s, detrending
/// order p. The first Ns entries walk the profile from the front, the next
/// Ns repeat the segmentation from the end, so a tail shorter than s is
/// still covered. Each entry is the mean squared residual of a degree-p
/// least-squares fit over the segment's s points.
inline std::vector<double> segment_variances(std::span<const double> prof,
                                             int s, int p) {
  const std::size_t n = prof.size();
  if (s <= p + 1)
    raise(ErrorCode::ScaleTooSmall,
          "scale " + std::to_string(s) + " needs more than p+1 points");
  const std::size_t scale = static_cast<std::size_t>(s);
  const std::size_t ns = n / scale;
  if (ns == 0)
    raise(ErrorCode::ScaleTooLarge,
          "scale " + std::to_string(s) + " exceeds series length");
  PolynomialDetrender detrender(scale, p);
  std::vector<double> variances(2 * ns);
  for (std::size_t v = 0; v < ns; ++v)
    variances[v] = detrender.mean_squared_residual(
        prof.subspan(v * scale, scale));
  for (std::size_t v = 0; v < ns; ++v)
    variances[ns + v] = detrender.mean_squared_residual(
        prof.subspan(n - (v + 1) * scale, scale));
  return variances;
}

struct FluctuationValue {
  double value = 0.0;
  /// Segments with zero variance excluded from the average (q <= 0 only).
  int excluded_segments = 0;
};

namespace detail {

// Shared q-th order average over precomputed log-variances. `log_variances`
// holds ln(F^2) for the strictly positive variances, `total` counts all
// segments including the zero-variance ones.
inline FluctuationValue fluctuation_from_logs(
    std::span<const double> log_variances, std::size_t total, double q) {
  const std::size_t m = log_variances.size();
  if (m == 0)
    raise(ErrorCode::AllZeroVariances,
          "all segment variances are zero; cannot form fluctuation function");
  FluctuationValue out;
  const int zeros = static_cast<int>(total - m);
  if (q == 0.0) {
    double acc = 0.0;
    for (double lv : log_variances) acc += lv;
    out.value = std::exp(acc / (2.0 * static_cast<double>(m)));
    out.excluded_segments = zeros;
    return out;
  }
  const double half_q = 0.5 * q;
  double acc = 0.0;
  for (double lv : log_variances) acc += std::exp(half_q * lv);
  if (q > 0.0) {
    // zero variances legitimately contribute 0 to positive moments
    out.value = std::pow(acc / static_cast<double>(total), 1.0 / q);
  } else {
    out.value = std::pow(acc / static_cast<double>(m), 1.0 / q);
    out.excluded_segments = zeros;
  }
  return out;
}

}  // namespace detail

/// Step (iv): q-th order fluctuation function over one scale's segment
/// variances. q = 0 uses the logarithmic-average limit form.
inline FluctuationValue fluctuation_function(std::span<const double> variances,
                                             double q) {
  std::vector<double> logs;
  logs.reserve(variances.size());
  for (double v : variances) {
    if (v < 0.0)
      raise(ErrorCode::ConfigInvalid, "negative segment variance");
    if (v > 0.0) logs.push_back(std::log(v));
  }
  return detail::fluctuation_from_logs(logs, variances.size(), q);
}

/// F_q(s) over the full (q, s) grid plus per-scale diagnostics.
struct FluctuationSurface {
  std::vector<int> scales;
  std::vector<double> q_grid;
  std::vector<double> values;  // row-major: [qi * scales.size() + si]
  std::vector<std::vector<double>> variances_per_scale;
  std::vector<int> zero_segments_per_scale;
  /// Largest observed decrease of F_q(s) in q at fixed s (should be ~0:
  /// power means are non-decreasing in the order).
  double max_q_order_violation = 0.0;

  double value(std::size_t qi, std::size_t si) const {
    return values[qi * scales.size() + si];
  }
};

inline FluctuationSurface compute_fluctuation_surface(
    std::span<const double> values, const MfdfaConfig& config) {
  config.validate(values.size());
  FluctuationSurface surface;
  surface.scales = config.effective_scales(values.size());
  surface.q_grid = config.q_grid;
  const std::vector<double> prof = profile(values);

  const std::size_t n_scales = surface.scales.size();
  const std::size_t n_q = surface.q_grid.size();
  surface.values.assign(n_q * n_scales, 0.0);
  surface.variances_per_scale.resize(n_scales);
  surface.zero_segments_per_scale.assign(n_scales, 0);

  std::vector<double> logs;
  for (std::size_t si = 0; si < n_scales; ++si) {
    std::vector<double> vars =
        segment_variances(prof, surface.scales[si], config.detrend_order);
    logs.clear();
    logs.reserve(vars.size());
    for (double v : vars)
      if (v > 0.0) logs.push_back(std::log(v));
    surface.zero_segments_per_scale[si] =
        static_cast<int>(vars.size() - logs.size());
    for (std::size_t qi = 0; qi < n_q; ++qi) {
      surface.values[qi * n_scales + si] =
          detail::fluctuation_from_logs(logs, vars.size(), surface.q_grid[qi])
              .value;
    }
    surface.variances_per_scale[si] = std::move(vars);
  }

  for (std::size_t si = 0; si < n_scales; ++si)
    for (std::size_t qi = 1; qi < n_q; ++qi) {
      const double drop = surface.values[(qi - 1) * n_scales + si] -
                          surface.values[qi * n_scales + si];
      surface.max_q_order_violation =
          std::max(surface.max_q_order_violation, drop);
    }
  return surface;
}

struct GhePoint {
  double q = 0.0;
  double h = 0.0;
  double h_stderr = 0.0;
  double r_squared = 0.0;
  int dropped_scales = 0;  // scales with non-usable F values at this q
};

/// Estimated h(q) over a q grid, with per-q regression diagnostics.
struct GheCurve {
  std::vector<GhePoint> points;  // ordered by q
  MfdfaConfig config;            // snapshot with the scale grid made explicit
  /// Set when h(q) increases by more than kMonotonicityTolerance between
  /// adjacent grid points; finite-sample noise can produce small inversions,
  /// larger ones mean the estimate is unreliable.
  bool suspect = false;
  double max_monotonicity_violation = 0.0;

  static constexpr double kMonotonicityTolerance = 0.02;

  bool has_q(double q) const {
    for (const GhePoint& p : points)
      if (std::abs(p.q - q) < 1e-9) return true;
    return false;
  }

  const GhePoint& at_q(double q) const {
    for (const GhePoint& p : points)
      if (std::abs(p.q - q) < 1e-9) return p;
    raise(ErrorCode::QNotOnGrid,
          "q = " + std::to_string(q) + " is not on the estimated grid");
  }

  double h_at(double q) const { return at_q(q).h; }
};

/// Step (v): unweighted OLS of ln F_q(s) on ln s.
inline GhePoint ghe_fit(const FluctuationSurface& surface, double q,
                        std::optional<std::pair<int, int>> fit_range = {}) {
  std::size_t qi = surface.q_grid.size();
  for (std::size_t i = 0; i < surface.q_grid.size(); ++i)
    if (std::abs(surface.q_grid[i] - q) < 1e-9) {
      qi = i;
      break;
    }
  if (qi == surface.q_grid.size())
    raise(ErrorCode::QNotOnGrid, "q not on the surface grid");

  std::vector<double> log_s;
  std::vector<double> log_f;
  int dropped = 0;
  for (std::size_t si = 0; si < surface.scales.size(); ++si) {
    const int s = surface.scales[si];
    if (fit_range && (s < fit_range->first || s > fit_range->second)) continue;
    const double f = surface.value(qi, si);
    if (!(f > 0.0) || !std::isfinite(f)) {
      ++dropped;
      continue;
    }
    log_s.push_back(std::log(static_cast<double>(s)));
    log_f.push_back(std::log(f));
  }
  if (log_s.size() < 4)
    raise(ErrorCode::InsufficientScales,
          "need at least 4 usable scales in the fit range, have " +
              std::to_string(log_s.size()));
  const LinearFit fit = linear_fit(log_s, log_f);
  GhePoint point;
  point.q = surface.q_grid[qi];
  point.h = fit.slope;
  point.h_stderr = fit.slope_stderr;
  point.r_squared = fit.r_squared;
  point.dropped_scales = dropped;
  return point;
}

/// Full MFDFA: profile -> per-scale detrended variances -> fluctuation
/// surface -> per-q scaling fits. Deterministic for fixed input and config.
inline GheCurve mfdfa(std::span<const double> values,
                      const MfdfaConfig& config = {}) {
  if (values.size() < 2)
    raise(ErrorCode::SeriesTooShort, "mfdfa needs at least 2 values");
  const double front = values.front();
  bool constant = true;
  for (double v : values)
    if (v != front) {
      constant = false;
      break;
    }
  if (constant)
    raise(ErrorCode::DegenerateSeries,
          "constant input has a zero profile; h(q) is undefined");

  const FluctuationSurface surface =
      compute_fluctuation_surface(values, config);
  GheCurve curve;
  curve.config = config;
  curve.config.scales = surface.scales;
  curve.points.reserve(surface.q_grid.size());
  for (double q : surface.q_grid)
    curve.points.push_back(ghe_fit(surface, q, config.fit_range));
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const double rise = curve.points[i].h - curve.points[i - 1].h;
    curve.max_monotonicity_violation =
        std::max(curve.max_monotonicity_violation, rise);
  }
  curve.suspect =
      curve.max_monotonicity_violation > GheCurve::kMonotonicityTolerance;
  return curve;
}

inline GheCurve mfdfa(const DerivedSeries& series,
                      const MfdfaConfig& config = {}) {
  return mfdfa(std::span<const double>(series.values), config);
}

}  // namespace mfhurst
