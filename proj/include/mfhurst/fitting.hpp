#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "mfhurst/errors.hpp"

namespace mfhurst {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

// Ordinary least squares of y on x with slope standard error and R^2.
inline LinearFit linear_fit(std::span<const double> x,
                            std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2)
    raise(ErrorCode::ConfigInvalid, "linear_fit needs >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0)
    raise(ErrorCode::SingularFit, "linear_fit: abscissa has zero spread");
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  if (n > 2) fit.slope_stderr = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  return fit;
}

// Least-squares polynomial detrending on the fixed abscissa 1..length using
// the Forsythe three-term recurrence (orthogonal basis, no normal equations).
// One instance serves every segment of the same length and order.
class PolynomialDetrender {
 public:
  PolynomialDetrender(std::size_t length, int order)
      : length_(length), order_(order) {
    if (order < 0) raise(ErrorCode::ConfigInvalid, "negative detrend order");
    if (length < static_cast<std::size_t>(order) + 2)
      raise(ErrorCode::ScaleTooSmall,
            "segment length must exceed detrend order + 1");
    build_basis();
  }

  std::size_t length() const { return length_; }
  int order() const { return order_; }

  // Mean squared residual of the degree-`order` fit over `y` (size length).
  double mean_squared_residual(std::span<const double> y) const {
    const std::size_t s = length_;
    const std::size_t k = static_cast<std::size_t>(order_) + 1;
    double coeff[kMaxBasis];
    for (std::size_t j = 0; j < k; ++j) {
      const double* basis = basis_.data() + j * s;
      double dot = 0.0;
      for (std::size_t i = 0; i < s; ++i) dot += basis[i] * y[i];
      coeff[j] = dot / norms_[j];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < s; ++i) {
      double fitted = 0.0;
      for (std::size_t j = 0; j < k; ++j)
        fitted += coeff[j] * basis_[j * s + i];
      const double e = y[i] - fitted;
      ss += e * e;
    }
    return ss / static_cast<double>(s);
  }

 private:
  static constexpr std::size_t kMaxBasis = 16;

  void build_basis() {
    const std::size_t s = length_;
    const std::size_t k = static_cast<std::size_t>(order_) + 1;
    if (k > kMaxBasis) raise(ErrorCode::ConfigInvalid, "detrend order too high");
    basis_.assign(k * s, 0.0);
    norms_.assign(k, 0.0);

    for (std::size_t i = 0; i < s; ++i) basis_[i] = 1.0;
    norms_[0] = static_cast<double>(s);

    if (k == 1) return;

    // p1(x) = x - mean(x); abscissa is 1..s
    const double mean_x = (static_cast<double>(s) + 1.0) / 2.0;
    double* p1 = basis_.data() + s;
    for (std::size_t i = 0; i < s; ++i)
      p1[i] = (static_cast<double>(i) + 1.0) - mean_x;
    norms_[1] = dot(p1, p1);

    for (std::size_t j = 2; j < k; ++j) {
      const double* prev = basis_.data() + (j - 1) * s;
      const double* prev2 = basis_.data() + (j - 2) * s;
      double* cur = basis_.data() + j * s;
      double alpha_num = 0.0;
      for (std::size_t i = 0; i < s; ++i) {
        const double x = static_cast<double>(i) + 1.0;
        alpha_num += x * prev[i] * prev[i];
      }
      const double alpha = alpha_num / norms_[j - 1];
      const double beta = norms_[j - 1] / norms_[j - 2];
      for (std::size_t i = 0; i < s; ++i) {
        const double x = static_cast<double>(i) + 1.0;
        cur[i] = (x - alpha) * prev[i] - beta * prev2[i];
      }
      norms_[j] = dot(cur, cur);
    }
  }

  double dot(const double* a, const double* b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < length_; ++i) acc += a[i] * b[i];
    return acc;
  }

  std::size_t length_;
  int order_;
  std::vector<double> basis_;  // (order+1) rows of `length` samples
  std::vector<double> norms_;
};

}  // namespace mfhurst
