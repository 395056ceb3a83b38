#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mfhurst/errors.hpp"
#include "mfhurst/mfdfa.hpp"

namespace mfhurst {

struct AlphaPoint {
  double q = 0.0;
  double alpha = 0.0;  // singularity strength h(q) + q h'(q)
  double f = 0.0;      // spectrum value q [alpha - h(q)] + 1
  /// True when h'(q) came from a central difference; endpoints fall back to
  /// one-sided differences and carry more truncation error.
  bool centered = true;
};

struct AlphaCurve {
  std::vector<AlphaPoint> points;  // ordered by q

  bool has_q(double q) const {
    for (const AlphaPoint& p : points)
      if (std::abs(p.q - q) < 1e-9) return true;
    return false;
  }

  const AlphaPoint& at_q(double q) const {
    for (const AlphaPoint& p : points)
      if (std::abs(p.q - q) < 1e-9) return p;
    raise(ErrorCode::QNotOnGrid,
          "q = " + std::to_string(q) + " is not on the spectrum grid");
  }

  double alpha_width() const {
    if (points.empty()) return 0.0;
    double lo = points.front().alpha;
    double hi = lo;
    for (const AlphaPoint& p : points) {
      lo = std::min(lo, p.alpha);
      hi = std::max(hi, p.alpha);
    }
    return hi - lo;
  }
};

/// Legendre-transforms h(q) into the singularity spectrum f(alpha) via
/// alpha = h + q dh/dq, f = q (alpha - h) + 1. The derivative uses central
/// differences on the (possibly uneven) q grid; the two endpoints use
/// one-sided differences so alpha is still defined at the grid extremes.
inline AlphaCurve singularity_spectrum(const GheCurve& curve) {
  const std::size_t n = curve.points.size();
  if (n < 3)
    raise(ErrorCode::GridTooSmall,
          "singularity spectrum needs at least 3 q grid points");
  AlphaCurve out;
  out.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = curve.points[i].q;
    const double h = curve.points[i].h;
    double dh;
    bool centered = true;
    if (i == 0) {
      dh = (curve.points[1].h - h) / (curve.points[1].q - q);
      centered = false;
    } else if (i == n - 1) {
      dh = (h - curve.points[i - 1].h) / (q - curve.points[i - 1].q);
      centered = false;
    } else {
      dh = (curve.points[i + 1].h - curve.points[i - 1].h) /
           (curve.points[i + 1].q - curve.points[i - 1].q);
    }
    AlphaPoint& p = out.points[i];
    p.q = q;
    p.alpha = h + q * dh;
    p.f = q * (p.alpha - h) + 1.0;
    p.centered = centered;
  }
  return out;
}

namespace detail {

inline void require_nonzero_q(double q) {
  if (q == 0.0) raise(ErrorCode::QZero, "strength measures need q != 0");
}

}  // namespace detail

/// Multifractal strength h(-q) - h(q); 0 for a monofractal, larger when
/// small and large fluctuations scale differently. Antisymmetric in q.
inline double delta_h(const GheCurve& curve, double q = 5.0) {
  detail::require_nonzero_q(q);
  return curve.h_at(-q) - curve.h_at(q);
}

/// Singularity-strength spread alpha(-q) - alpha(q).
inline double delta_alpha(const AlphaCurve& curve, double q = 5.0) {
  detail::require_nonzero_q(q);
  return curve.at_q(-q).alpha - curve.at_q(q).alpha;
}

struct MdmValue {
  double value = 0.0;
  /// True when h(-q) > 1/2 > h(q): the two deviations then point in opposite
  /// directions and the measure equals delta_h(q) / 2 exactly.
  bool reduces_to_half_delta_h = false;
};

/// Market deficiency measure: mean absolute deviation of h(+-q) from the
/// efficient-market value 1/2.
inline MdmValue mdm(const GheCurve& curve, double q = 5.0) {
  detail::require_nonzero_q(q);
  const double h_neg = curve.h_at(-q);
  const double h_pos = curve.h_at(q);
  MdmValue out;
  if (h_neg > 0.5 && 0.5 > h_pos) {
    out.reduces_to_half_delta_h = true;
    out.value = 0.5 * (h_neg - h_pos);
  } else {
    out.value = 0.5 * (std::abs(h_neg - 0.5) + std::abs(0.5 - h_pos));
  }
  return out;
}

/// Per-q strength table used by the CLI's strength.csv output.
struct StrengthRow {
  double q = 0.0;
  double delta_h = 0.0;
  double delta_alpha = 0.0;
  double mdm = 0.0;
};

inline std::vector<StrengthRow> strength_table(const GheCurve& ghe,
                                               const AlphaCurve& alpha) {
  std::vector<StrengthRow> rows;
  for (const GhePoint& p : ghe.points) {
    if (!(p.q > 0.0)) continue;
    if (!ghe.has_q(-p.q) || !alpha.has_q(p.q) || !alpha.has_q(-p.q)) continue;
    StrengthRow row;
    row.q = p.q;
    row.delta_h = delta_h(ghe, p.q);
    row.delta_alpha = delta_alpha(alpha, p.q);
    row.mdm = mdm(ghe, p.q).value;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mfhurst
