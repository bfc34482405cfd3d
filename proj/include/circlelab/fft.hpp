#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "circlelab/common.hpp"

namespace circlelab {

// In-place DFT, X[j] = sum_m x[m] e(sign * j*m/n), unnormalized.
// Power-of-two sizes run radix-2 Cooley-Tukey; everything else goes through
// Bluestein's chirp transform (twiddles from exact residues mod 2n).

namespace fft_detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Root table for sign=+1, built once per size; negative sign conjugates.
inline const std::vector<cplx>& pow2_roots(std::size_t n) {
  static thread_local std::vector<cplx> roots;
  static thread_local std::size_t cached_n = 0;
  if (cached_n != n) {
    roots.resize(n / 2);
    const long double step = 6.283185307179586476925286766559L /
                             static_cast<long double>(n);
    for (std::size_t k = 0; k < n / 2; ++k) {
      long double a = step * static_cast<long double>(k);
      roots[k] = cplx(static_cast<double>(std::cos(a)),
                      static_cast<double>(std::sin(a)));
    }
    cached_n = n;
  }
  return roots;
}

inline void fft_pow2(std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  if (n <= 1) return;
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }
  const std::vector<cplx>& roots = pow2_roots(n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < half; ++k) {
        cplx w = roots[k * step];
        if (sign < 0) w = std::conj(w);
        cplx u = x[i + k];
        cplx v = x[i + k + half] * w;
        x[i + k] = u + v;
        x[i + k + half] = u - v;
      }
    }
  }
}

inline void fft_bluestein(std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  // chirp[k] = e(sign * k^2 / (2n)) with k^2 reduced mod 2n exactly.
  std::vector<cplx> chirp(n);
  const long long twon = static_cast<long long>(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    long long r = static_cast<long long>(
        (static_cast<unsigned __int128>(k) * k) % static_cast<unsigned long long>(twon));
    chirp[k] = e_q(sign * r, twon);
  }
  std::vector<cplx> a(m, cplx{}), b(m, cplx{});
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
  b[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) b[k] = b[m - k] = std::conj(chirp[k]);
  fft_pow2(a, +1);
  fft_pow2(b, +1);
  for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
  fft_pow2(a, -1);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * inv * chirp[k];
}

}  // namespace fft_detail

inline void dft_inplace(std::vector<cplx>& x, int sign) {
  if (fft_detail::is_pow2(x.size()))
    fft_detail::fft_pow2(x, sign);
  else
    fft_detail::fft_bluestein(x, sign);
}

// Multidimensional DFT over a row-major array with the given dims.
inline void dft_multi(std::vector<cplx>& data, const std::vector<std::size_t>& dims,
                      int sign) {
  std::size_t total = 1;
  for (std::size_t d : dims) total *= d;
  if (data.size() != total) throw GridMismatch("dft_multi: data/dims size");
  std::size_t stride_after = 1;
  for (std::size_t axis = dims.size(); axis-- > 0;) {
    const std::size_t n = dims[axis];
    const std::size_t stride = stride_after;
    stride_after *= n;
    if (n == 1) continue;
    const std::size_t nlines = total / n;
    std::vector<std::size_t> line_base(nlines);
    for (std::size_t outer = 0, li = 0; outer < total; outer += stride_after) {
      for (std::size_t inner = 0; inner < stride; ++inner) line_base[li++] = outer + inner;
    }
    parallel_blocks(nlines, [&](std::size_t li) {
      thread_local std::vector<cplx> line;
      line.resize(n);
      const std::size_t base = line_base[li];
      for (std::size_t k = 0; k < n; ++k) line[k] = data[base + k * stride];
      dft_inplace(line, sign);
      for (std::size_t k = 0; k < n; ++k) data[base + k * stride] = line[k];
    });
  }
}

}  // namespace circlelab
