#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mfhurst/errors.hpp"

namespace mfhurst {

/// In-place iterative radix-2 FFT (Cooley-Tukey, decimation in time).
/// Size must be a power of two. inverse = true applies the conjugate
/// transform and divides by the size.
inline void fft_radix2(std::vector<std::complex<double>>& data,
                       bool inverse = false) {
  const std::size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    raise(ErrorCode::ConfigInvalid, "fft size must be a power of two");
  if (n == 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (std::complex<double>& c : data) c *= inv;
  }
}

}  // namespace mfhurst
