#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "mfhurst/errors.hpp"

namespace mfhurst {

/// Saturating finite-sample model H2(n) = H2_inf * n / (n + a1): estimates
/// from short samples are biased low and approach the asymptote as n grows.
struct ScalingPoint {
  double n = 0.0;
  double h2 = 0.0;
};

struct ScalingFit {
  double h2_inf = 0.0;
  double a1 = 0.0;
  double residual_norm = 0.0;  // sqrt of the sum of squared residuals
  int iterations = 0;
  std::vector<ScalingPoint> points;

  double predict(double n) const { return h2_inf * n / (n + a1); }
};

/// Inverts the finite-sample bias: given an estimate from sample size n,
/// returns the asymptotic value h2 * (n + a1) / n.
inline double apply_correction(double h2_measured, long n, double a1) {
  if (n < 1)
    raise(ErrorCode::ConfigInvalid, "sample size must be at least 1");
  if (!(a1 > 0.0))
    raise(ErrorCode::InvalidA1, "a1 must be positive");
  return h2_measured * (static_cast<double>(n) + a1) / static_cast<double>(n);
}

/// Nonlinear least squares of the saturating model over (h2_inf, a1) with
/// Marquardt-damped Gauss-Newton steps. Deterministic initializer: h2_inf
/// starts at the largest observed value, a1 at 3.
inline ScalingFit fit_scaling(const std::vector<ScalingPoint>& points) {
  if (points.size() < 2)
    raise(ErrorCode::ConfigInvalid, "scaling fit needs at least 2 points");
  double first_n = points.front().n;
  bool distinct = false;
  double h_init = 0.0;
  double min_n = points.front().n;
  for (const ScalingPoint& p : points) {
    if (!(p.n >= 1.0))
      raise(ErrorCode::ConfigInvalid, "sample sizes must be at least 1");
    if (!(p.h2 > 0.0))
      raise(ErrorCode::ConfigInvalid, "measured exponents must be positive");
    if (p.n != first_n) distinct = true;
    h_init = std::max(h_init, p.h2);
    min_n = std::min(min_n, p.n);
  }
  if (!distinct)
    raise(ErrorCode::SingularFit,
          "all sample sizes equal; the two parameters are not identifiable");

  const auto ssr_at = [&](double h, double a) {
    double acc = 0.0;
    for (const ScalingPoint& p : points) {
      const double r = h * p.n / (p.n + a) - p.h2;
      acc += r * r;
    }
    return acc;
  };

  double h = h_init;
  double a = 3.0;
  double lambda = 1e-3;
  double ssr = ssr_at(h, a);
  constexpr int kMaxIterations = 200;
  constexpr double kGradientTolerance = 1e-10;
  int iter = 0;
  bool converged = false;
  for (; iter < kMaxIterations; ++iter) {
    // normal equations of the damped step
    double jtj_hh = 0.0, jtj_ha = 0.0, jtj_aa = 0.0;
    double g_h = 0.0, g_a = 0.0;
    for (const ScalingPoint& p : points) {
      const double denom = p.n + a;
      const double model = h * p.n / denom;
      const double r = model - p.h2;
      const double d_h = p.n / denom;
      const double d_a = -model / denom;
      jtj_hh += d_h * d_h;
      jtj_ha += d_h * d_a;
      jtj_aa += d_a * d_a;
      g_h += d_h * r;
      g_a += d_a * r;
    }
    if (std::max(std::abs(g_h), std::abs(g_a)) < kGradientTolerance) {
      converged = true;
      break;
    }
    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      const double m_hh = jtj_hh * (1.0 + lambda);
      const double m_aa = jtj_aa * (1.0 + lambda);
      const double det = m_hh * m_aa - jtj_ha * jtj_ha;
      if (det == 0.0 || !std::isfinite(det)) {
        lambda *= 10.0;
        continue;
      }
      const double dh = (-g_h * m_aa + g_a * jtj_ha) / det;
      const double da = (-g_a * m_hh + g_h * jtj_ha) / det;
      const double h_try = h + dh;
      const double a_try = a + da;
      // keep every model denominator n + a1 positive
      const double ssr_try = (a_try > -min_n)
                                 ? ssr_at(h_try, a_try)
                                 : std::numeric_limits<double>::infinity();
      if (std::isfinite(ssr_try) && ssr_try <= ssr) {
        const double step = std::max(std::abs(dh), std::abs(da));
        h = h_try;
        a = a_try;
        ssr = ssr_try;
        lambda = std::max(lambda * 0.1, 1e-12);
        stepped = true;
        if (step < 1e-14 * (1.0 + std::abs(h) + std::abs(a))) converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (converged) break;
    if (!stepped)
      raise(ErrorCode::NonConvergence,
            "damped least squares stalled; no descent step found");
  }
  if (!converged && iter == kMaxIterations)
    raise(ErrorCode::NonConvergence,
          "scaling fit did not converge within 200 iterations");
  if (!(a > 0.0))
    raise(ErrorCode::NonConvergence,
          "fitted a1 is not positive; data contradict the saturating model");

  ScalingFit fit;
  fit.h2_inf = h;
  fit.a1 = a;
  fit.residual_norm = std::sqrt(ssr);
  fit.iterations = iter;
  fit.points = points;
  return fit;
}

}  // namespace mfhurst
