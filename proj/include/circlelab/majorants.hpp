#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "circlelab/arcs.hpp"
#include "circlelab/common.hpp"
#include "circlelab/expsum.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/rng.hpp"
#include "circlelab/surfaces.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Majorant V_{p,Q}(theta) = sum_{q <= Q} sum_{a mod q} q^{eps - p/k} Z_p(theta - a/q)
// with Z_p(theta) = (1 + N^k ||theta||)^{-p/k}.

struct MajorantParams {
  double p;
  long long Q;
  double eps = 1e-3;
  long long N;
  int k;

  double nk() const { return static_cast<double>(checked_pow(N, k)); }
};

inline double z_kernel(const MajorantParams& mp, double theta) {
  return std::pow(1.0 + mp.nk() * torus_norm(theta), -mp.p / mp.k);
}

inline double majorant_eval(const MajorantParams& mp, double theta) {
  if (mp.Q > 10000) throw BudgetExceeded("majorant_eval covers Q <= 10^4");
  if (mp.Q < 1) throw InvalidRange("majorant_eval requires Q >= 1");
  double total = 0.0;
  for (long long q = 1; q <= mp.Q; ++q) {
    double wq = std::pow(static_cast<double>(q), mp.eps - mp.p / mp.k);
    for (long long a = 0; a < q; ++a)
      total += wq * z_kernel(mp, theta - static_cast<double>(a) / q);
  }
  return total;
}

// Z-hat(l) = 2 int_0^{1/2} Z_p(theta) cos(2 pi l theta) dtheta by adaptive
// quadrature (the peak at 0 has width ~ N^{-k}).
inline double z_kernel_fourier(const MajorantParams& mp, long long l) {
  const double scale = 1.0 / mp.nk();
  return 2.0 * adaptive_simpson(
                   [&](double th) {
                     return z_kernel(mp, th) * std::cos(kTwoPi * l * th);
                   },
                   0.0, 0.5, 1e-8 * scale);
}

// Closed form from orthogonality: V-hat(l) = (sum_{q <= Q, q | l} q^{eps+1-p/k}) Z-hat(l),
// with l = 0 counting every q.
inline double majorant_fourier(const MajorantParams& mp, long long l) {
  double divsum = 0.0;
  long long la = l < 0 ? -l : l;
  for (long long q = 1; q <= mp.Q; ++q)
    if (la == 0 || la % q == 0)
      divsum += std::pow(static_cast<double>(q), mp.eps + 1.0 - mp.p / mp.k);
  return divsum * z_kernel_fourier(mp, l);
}

// Independent oracle: integrate V(theta) e(-l theta) piecewise between the
// kink points a/q, adaptively on each smooth gap.
inline double majorant_fourier_quadrature(const MajorantParams& mp, long long l) {
  std::vector<double> knots;
  for (long long q = 1; q <= mp.Q; ++q)
    for (long long a = 0; a <= q; ++a)
      knots.push_back(static_cast<double>(a) / q);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
  const double scale = 1.0 / mp.nk();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (knots[i + 1] - knots[i] < 1e-15) continue;
    total += adaptive_simpson(
        [&](double th) {
          return majorant_eval(mp, th) * std::cos(kTwoPi * l * th);
        },
        knots[i], knots[i + 1], 1e-9 * scale);
  }
  return total;  // V real and even, so the transform is real
}

// ---------------------------------------------------------------------------
// Domination scan: C_major = max |F|^p / (N^p V) over sampled major arcs,
// C_minor = max |F| / (Q^{eps - 1/k} N) over sampled minor arcs, where F is
// the smoothed kth-power kernel T(alpha, 0).

struct DominationReport {
  double c_major = 0.0;
  double c_minor = 0.0;
  double minor_sup = 0.0;  // unnormalized max |F| over sampled minor arcs
  int n_major = 0;
  int n_minor = 0;
};

inline DominationReport domination_check(const MajorantParams& mp,
                                         const WeightProfile& w, int samples,
                                         std::uint64_t seed) {
  DominationReport rep;
  CounterRng rng(seed);
  const double minor_scale =
      std::pow(static_cast<double>(mp.Q), mp.eps - 1.0 / mp.k) * static_cast<double>(mp.N);
  const double width = static_cast<double>(mp.Q) / mp.nk();
  // Major stratum: uniform over arcs M_Q(a, q).
  std::vector<FareyFraction> fracs;
  for (long long q = 1; q <= mp.Q; ++q)
    for (long long a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1) fracs.push_back({a, q});
  for (int i = 0; i < samples; ++i) {
    const FareyFraction& f = fracs[rng.next_below(fracs.size())];
    double alpha = static_cast<double>(f.a) / f.q + (2.0 * rng.next_unit() - 1.0) * width;
    double absF = std::abs(eval_weyl(w, mp.k, alpha, 0.0));
    double ratio = std::pow(absF / mp.N, mp.p) / majorant_eval(mp, alpha);
    rep.c_major = std::max(rep.c_major, ratio);
    ++rep.n_major;
  }
  // Minor stratum: uniform over the torus, major hits rejected.
  for (int i = 0; i < samples; ++i) {
    double alpha = rng.next_unit();
    if (classify_arc(alpha, mp.Q, mp.N, mp.k).major) continue;
    double absF = std::abs(eval_weyl(w, mp.k, alpha, 0.0));
    rep.minor_sup = std::max(rep.minor_sup, absF);
    rep.c_minor = std::max(rep.c_minor, absF / minor_scale);
    ++rep.n_minor;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Band-limiting multiplier psi_N: per-coordinate trapezoid, 1 on [-n_i, n_i],
// linear to 0 at +-2n_i.  Plateaus: N^k for kth powers; for paraboloids the
// theta coordinates get 2N and the (last) alpha coordinate gets d (2N)^k, the
// spectral box of the smoothed kernel.

inline std::vector<long long> band_plateaus(const SurfaceSystem& sys, long long N) {
  switch (sys.family) {
    case Family::KthPowers:
      return {checked_pow(N, sys.k)};
    case Family::KParaboloid: {
      std::vector<long long> n(sys.d, 2 * N);
      n.push_back(sys.d * checked_pow(2 * N, sys.k));
      return n;
    }
    default:
      throw UnsupportedFamily("band_multiplier covers kth powers and paraboloids");
  }
}

inline double trapezoid_multiplier(long long j, long long n) {
  long long a = j < 0 ? -j : j;
  if (a <= n) return 1.0;
  if (a >= 2 * n) return 0.0;
  return static_cast<double>(2 * n - a) / static_cast<double>(n);
}

inline double band_multiplier(const SurfaceSystem& sys, long long N,
                              std::span<const long long> j) {
  std::vector<long long> plateaus = band_plateaus(sys, N);
  if (j.size() != plateaus.size())
    throw DimensionMismatch("band_multiplier frequency dimension");
  double v = 1.0;
  for (std::size_t i = 0; i < plateaus.size(); ++i)
    v *= trapezoid_multiplier(j[i], plateaus[i]);
  return v;
}

// Convolution with psi_N realized in frequency space: analyze the table,
// multiply by psi-hat at the aliased signed frequency, synthesize back.
inline FourierTable apply_band_multiplier(const FourierTable& t,
                                          const SurfaceSystem& sys, long long N) {
  std::vector<long long> plateaus = band_plateaus(sys, N);
  if (static_cast<int>(plateaus.size()) != t.grid.r())
    throw GridMismatch("apply_band_multiplier: table rank");
  FourierTable out = t;
  dft_multi(out.values, t.grid.dims, -1);
  const int r = t.grid.r();
  std::vector<long long> freq(r);
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    std::size_t rem = idx;
    for (int i = r - 1; i >= 0; --i) {
      long long m = static_cast<long long>(rem % t.grid.dims[i]);
      rem /= t.grid.dims[i];
      long long M = static_cast<long long>(t.grid.dims[i]);
      freq[i] = m <= M / 2 ? m : m - M;
    }
    out.values[idx] *= band_multiplier(sys, N, freq);
  }
  dft_multi(out.values, t.grid.dims, +1);
  const double inv = 1.0 / static_cast<double>(t.grid.total());
  for (cplx& v : out.values) v *= inv;
  return out;
}

// Grid estimate of the 1-D L^1 norm of the trapezoid kernel with plateau n
// (the de la Vallee Poussin bound gives at most 3).
inline double trapezoid_l1_norm(long long n, std::size_t grid_points = 0) {
  std::size_t M = grid_points ? grid_points : static_cast<std::size_t>(16 * n);
  std::vector<cplx> coef(M, cplx{});
  for (long long j = -2 * n; j <= 2 * n; ++j) {
    long long m = ((j % static_cast<long long>(M)) + static_cast<long long>(M)) %
                  static_cast<long long>(M);
    coef[static_cast<std::size_t>(m)] += trapezoid_multiplier(j, n);
  }
  dft_inplace(coef, +1);
  double sum = 0.0;
  for (const cplx& v : coef) sum += std::abs(v);
  return sum / static_cast<double>(M);
}

}  // namespace circlelab
