#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "mfhurst/dates.hpp"
#include "mfhurst/errors.hpp"
#include "mfhurst/fft.hpp"
#include "mfhurst/series.hpp"

namespace mfhurst {

/// Deterministic random source: mt19937_64 plus an explicit Box-Muller
/// transform. Both pieces are pinned here (not delegated to
/// std::normal_distribution) so a seed reproduces the same stream on every
/// platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draws two uniforms per pair and caches
  /// the second variate.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Uniform integer in [0, bound) via rejection sampling (no modulo bias).
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0)
      raise(ErrorCode::ConfigInvalid, "uniform_below needs a positive bound");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

inline std::vector<double> gaussian_noise(std::size_t n, std::uint64_t seed) {
  if (n < 64)
    raise(ErrorCode::SeriesTooShort, "noise length must be at least 64");
  Rng rng(seed);
  std::vector<double> values(n);
  for (double& v : values) v = rng.gaussian();
  return values;
}

/// In-place Fisher-Yates shuffle. Destroys temporal correlations while
/// preserving the value multiset, so a shuffled series keeps its
/// distribution but loses correlation-driven scaling.
inline void shuffle_values(std::vector<double>& values, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(
        rng.uniform_below(static_cast<std::uint64_t>(i)));
    std::swap(values[i - 1], values[j]);
  }
}

struct FgnDiagnostics {
  std::size_t embedding_size = 0;  // circulant size actually used
  int doublings = 0;               // extra embedding doublings needed
  bool clipped = false;            // negative eigenvalues were clipped to 0
  double min_eigenvalue = 0.0;
};

struct FgnResult {
  std::vector<double> values;
  FgnDiagnostics diagnostics;
};

namespace detail {

/// Autocovariance of unit-variance fractional Gaussian noise at lag k.
inline double fgn_autocovariance(double hurst, std::size_t k) {
  const double two_h = 2.0 * hurst;
  const double kk = static_cast<double>(k);
  return 0.5 * (std::pow(kk + 1.0, two_h) - 2.0 * std::pow(kk, two_h) +
                std::pow(std::abs(kk - 1.0), two_h));
}

}  // namespace detail

/// Exact-covariance fractional Gaussian noise by circulant embedding: embed
/// the n-point covariance in a circulant matrix, diagonalize it with an FFT
/// and color a complex Gaussian vector with the eigenvalue square roots.
/// When the embedding is not nonnegative definite the size is doubled a few
/// times; if negatives persist they are clipped to zero, which makes the
/// covariance approximate, and the clipping is reported in the diagnostics.
inline FgnResult fgn(std::size_t n, double hurst, std::uint64_t seed) {
  if (n < 2) raise(ErrorCode::ConfigInvalid, "fgn length must be at least 2");
  if (!(hurst > 0.0 && hurst < 1.0))
    raise(ErrorCode::ConfigInvalid, "fgn exponent must lie in (0, 1)");

  std::size_t m = std::bit_ceil(n);
  FgnResult out;
  std::vector<double> lambda;
  for (int attempt = 0;; ++attempt) {
    const std::size_t big = 2 * m;
    std::vector<std::complex<double>> row(big);
    for (std::size_t k = 0; k <= m; ++k)
      row[k] = detail::fgn_autocovariance(hurst, k);
    for (std::size_t k = m + 1; k < big; ++k) row[k] = row[big - k];
    fft_radix2(row);
    lambda.resize(big);
    double min_ev = 0.0;
    for (std::size_t k = 0; k < big; ++k) {
      lambda[k] = row[k].real();
      min_ev = std::min(min_ev, lambda[k]);
    }
    out.diagnostics.min_eigenvalue = min_ev;
    out.diagnostics.embedding_size = big;
    out.diagnostics.doublings = attempt;
    const double tol = 1e-9 * static_cast<double>(big);
    if (min_ev >= -tol || attempt >= 6) {
      if (min_ev < -tol) out.diagnostics.clipped = true;
      break;
    }
    m *= 2;
  }

  const std::size_t big = 2 * m;
  for (double& ev : lambda) ev = std::max(ev, 0.0);

  Rng rng(seed);
  std::vector<std::complex<double>> spectrum(big);
  const double inv_big = 1.0 / static_cast<double>(big);
  spectrum[0] = std::sqrt(lambda[0] * inv_big) * rng.gaussian();
  for (std::size_t k = 1; k < m; ++k) {
    const double scale = std::sqrt(0.5 * lambda[k] * inv_big);
    const double re = rng.gaussian();
    const double im = rng.gaussian();
    spectrum[k] = std::complex<double>(scale * re, scale * im);
    spectrum[big - k] = std::conj(spectrum[k]);
  }
  spectrum[m] = std::sqrt(lambda[m] * inv_big) * rng.gaussian();

  fft_radix2(spectrum);
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = spectrum[i].real();
  return out;
}

/// Binomial measure of length 2^levels built by repeated subdivision: every
/// interval splits into halves carrying weights p (left) and 1-p (right).
/// With `shuffle` set, each node swaps its two child weights with
/// probability 1/2 (seeded); the value multiset is unchanged either way.
struct CascadeSpec {
  int levels = 16;
  double p = 0.75;
  bool shuffle = false;
  std::uint64_t seed = 0;

  void validate() const {
    if (levels < 8 || levels > 24)
      raise(ErrorCode::ConfigInvalid, "cascade levels must be in [8, 24]");
    if (!(p > 0.5 && p < 1.0))
      raise(ErrorCode::ConfigInvalid,
            "cascade weight must lie strictly between 0.5 and 1");
  }

  std::size_t length() const { return std::size_t{1} << levels; }
};

inline std::vector<double> binomial_cascade(const CascadeSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::vector<double> values(spec.length());
  values[0] = 1.0;
  std::vector<std::uint8_t> swap_bits;
  for (int level = 0; level < spec.levels; ++level) {
    const std::size_t nodes = std::size_t{1} << level;
    if (spec.shuffle) {
      swap_bits.resize(nodes);
      for (std::size_t j = 0; j < nodes; ++j)
        swap_bits[j] = static_cast<std::uint8_t>(rng.uniform_below(2));
    }
    // expand backwards so each node is read before its slot is reused
    for (std::size_t j = nodes; j-- > 0;) {
      const double v = values[j];
      const bool swapped = spec.shuffle && swap_bits[j] != 0;
      values[2 * j] = v * (swapped ? 1.0 - spec.p : spec.p);
      values[2 * j + 1] = v * (swapped ? spec.p : 1.0 - spec.p);
    }
  }
  return values;
}

/// Closed-form generalized Hurst exponent of the binomial measure:
/// h(q) = 1/q - log2(p^q + (1-p)^q) / q, continued at q = 0 by its limit
/// -log2(p (1-p)) / 2.
inline double analytic_cascade_ghe(double p, double q) {
  if (!(p > 0.0 && p < 1.0))
    raise(ErrorCode::ConfigInvalid, "cascade weight must lie in (0, 1)");
  if (q == 0.0) return -std::log2(p * (1.0 - p)) / 2.0;
  return 1.0 / q - std::log2(std::pow(p, q) + std::pow(1.0 - p, q)) / q;
}

/// Wraps generated values as a dated series (synthetic consecutive days)
/// so downstream stages can treat them like observed data.
inline DerivedSeries synthetic_series(std::vector<double> values,
                                      const std::string& source,
                                      SeriesKind kind = SeriesKind::Returns,
                                      Date start = Date{2000, 1, 1}) {
  DerivedSeries out;
  out.kind = kind;
  out.source = source;
  out.values = std::move(values);
  out.dates.reserve(out.values.size());
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.dates.push_back(start.plus_days(static_cast<long>(i)));
  return out;
}

/// Value-permuted copy of a series; dates and kind are preserved.
inline DerivedSeries shuffle_series(const DerivedSeries& series,
                                    std::uint64_t seed) {
  DerivedSeries out = series;
  shuffle_values(out.values, seed);
  return out;
}

}  // namespace mfhurst
