#pragma once

#include <array>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "circlelab/common.hpp"
#include "circlelab/fft.hpp"
#include "circlelab/surfaces.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Uniform torus grids and sampled tables.

struct TorusGrid {
  std::vector<std::size_t> dims;     // M_1 .. M_r
  std::vector<double> offsets;       // per-dimension phase offsets in [0,1)

  static TorusGrid uniform(std::vector<std::size_t> m) {
    TorusGrid g;
    g.offsets.assign(m.size(), 0.0);
    g.dims = std::move(m);
    return g;
  }

  int r() const { return static_cast<int>(dims.size()); }

  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t m : dims) t *= m;
    return t;
  }

  // Coordinates of the row-major point `idx`.
  void point(std::size_t idx, std::span<double> alpha) const {
    for (int i = r() - 1; i >= 0; --i) {
      std::size_t m = dims[i];
      alpha[i] = static_cast<double>(idx % m) / static_cast<double>(m) + offsets[i];
      idx /= m;
    }
  }

  TorusGrid doubled() const {
    TorusGrid g = *this;
    for (std::size_t& m : g.dims) m *= 2;
    return g;
  }

  bool same_shape(const TorusGrid& o) const {
    return dims == o.dims && offsets == o.offsets;
  }
};

struct Provenance {
  std::string kind;        // "F_a", "F", "T", "piece", ...
  double l2_norm = -1.0;   // l2 norm of the generating sequence, if any
  std::string params;      // free-form parameter record (JSON string)
};

struct FourierTable {
  TorusGrid grid;
  std::vector<cplx> values;  // row-major, length grid.total()
  Provenance prov;

  double max_abs() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
  }
};

// ---------------------------------------------------------------------------
// Direct evaluation.  Phases P(n).alpha are reduced mod 1 in long double, and
// all sums use the fixed pairwise reduction, so results are reproducible.

namespace detail {

inline void evaluate_map_into(const SurfaceSystem& sys,
                              std::span<const long long> n,
                              std::span<long long> out) {
  switch (sys.family) {
    case Family::KthPowers:
      out[0] = checked_pow(n[0], sys.k);
      break;
    case Family::KParaboloid: {
      __int128 sum = 0;
      for (int i = 0; i < sys.d; ++i) {
        out[i] = n[i];
        sum += checked_pow(n[i], sys.k);
      }
      out[sys.d] = static_cast<long long>(sum);
      break;
    }
    case Family::MonomialCurve:
      for (int j = 0; j < sys.r; ++j) out[j] = checked_pow(n[0], sys.exponents[j]);
      break;
  }
}

inline cplx phase_of(std::span<const long long> p, std::span<const double> alpha) {
  long double cyc = 0.0L;
  for (std::size_t j = 0; j < p.size(); ++j)
    cyc += static_cast<long double>(p[j]) * static_cast<long double>(alpha[j]);
  return unit_phase(cyc);
}

}  // namespace detail

inline cplx eval_extension(const CoefficientSequence& a, const SurfaceSystem& sys,
                           std::span<const double> alpha) {
  if (a.d != sys.d) throw DimensionMismatch("eval_extension: a.d != sys.d");
  if (static_cast<int>(alpha.size()) != sys.r)
    throw DimensionMismatch("eval_extension: alpha has wrong dimension");
  const long long side = a.side();
  std::array<long long, 8> pbuf{};
  return pairwise_sum<cplx>(0, a.values.size(), [&](std::size_t idx) {
    const cplx v = a.values[idx];
    if (v == cplx{}) return cplx{};
    std::array<long long, 4> n{};
    std::size_t rem = idx;
    for (int i = a.d - 1; i >= 0; --i) {
      n[i] = static_cast<long long>(rem % static_cast<std::size_t>(side)) - a.N;
      rem /= static_cast<std::size_t>(side);
    }
    detail::evaluate_map_into(sys, std::span<const long long>(n.data(), a.d),
                              std::span<long long>(pbuf.data(), sys.r));
    return v * detail::phase_of(std::span<const long long>(pbuf.data(), sys.r), alpha);
  });
}

// One-dimensional Weyl sum T(alpha, theta) = sum omega(n) e(alpha n^k + theta n),
// summed over |n| <= 2N exactly (the support of omega).
inline cplx eval_weyl(const WeightProfile& w, int k, double alpha, double theta) {
  if (k < 2) throw InvalidRange("eval_weyl requires k >= 2");
  const long long H = static_cast<long long>(std::floor(2.0 * w.N));
  return pairwise_sum<cplx>(0, static_cast<std::size_t>(2 * H + 1), [&](std::size_t i) {
    const long long n = static_cast<long long>(i) - H;
    const double wn = w(static_cast<double>(n));
    if (wn == 0.0) return cplx{};
    const long long nk = checked_pow(n, k);
    long double cyc = static_cast<long double>(nk) * static_cast<long double>(alpha) +
                      static_cast<long double>(n) * static_cast<long double>(theta);
    return wn * unit_phase(cyc);
  });
}

// Smoothed paraboloid kernel F(alpha, theta) = prod_i T(alpha, theta_i).
inline cplx eval_kernel(const WeightProfile& w, const SurfaceSystem& sys,
                        double alpha, std::span<const double> theta) {
  if (sys.family != Family::KParaboloid)
    throw UnsupportedFamily("eval_kernel needs a k-paraboloid system");
  if (static_cast<int>(theta.size()) != sys.d)
    throw DimensionMismatch("eval_kernel: theta has wrong dimension");
  cplx prod(1.0, 0.0);
  for (int i = 0; i < sys.d; ++i) prod *= eval_weyl(w, sys.k, alpha, theta[i]);
  return prod;
}

// ---------------------------------------------------------------------------
// Grid sampling by folding + multidimensional DFT:
//   b(m) = sum_{P(n) == m mod M} a(n) e(P(n).offsets),
//   values[j] = sum_m b(m) e(m.j / M) = F_a(j/M + offsets).

namespace detail {

template <class EachTerm>
std::vector<cplx> fold_and_transform(const TorusGrid& grid, EachTerm&& each) {
  std::vector<cplx> b(grid.total(), cplx{});
  const int r = grid.r();
  each([&](std::span<const long long> p, cplx v) {
    long double cyc = 0.0L;
    std::size_t idx = 0;
    for (int j = 0; j < r; ++j) {
      const long long M = static_cast<long long>(grid.dims[j]);
      long long m = p[j] % M;
      if (m < 0) m += M;
      idx = idx * grid.dims[j] + static_cast<std::size_t>(m);
      cyc += static_cast<long double>(p[j]) * static_cast<long double>(grid.offsets[j]);
    }
    b[idx] += v * unit_phase(cyc);
  });
  dft_multi(b, grid.dims, +1);
  return b;
}

}  // namespace detail

inline FourierTable grid_sample(const CoefficientSequence& a, const SurfaceSystem& sys,
                                const TorusGrid& grid,
                                std::size_t budget = default_grid_budget()) {
  if (grid.r() != sys.r) throw GridMismatch("grid_sample: grid.r != sys.r");
  if (a.d != sys.d) throw DimensionMismatch("grid_sample: a.d != sys.d");
  if (grid.total() > budget) throw BudgetExceeded("grid_sample: grid over budget");
  FourierTable t;
  t.grid = grid;
  t.values = detail::fold_and_transform(grid, [&](auto&& sink) {
    std::array<long long, 8> pbuf{};
    a.for_each([&](std::span<const long long> n, cplx v) {
      if (v == cplx{}) return;
      detail::evaluate_map_into(sys, n, std::span<long long>(pbuf.data(), sys.r));
      sink(std::span<const long long>(pbuf.data(), sys.r), v);
    });
  });
  t.prov.kind = "F_a";
  t.prov.l2_norm = a.l2_norm;
  return t;
}

// Table of the smoothed kernel F (weights omega_d over [-2N, 2N]^d).
inline FourierTable kernel_grid_sample(const WeightProfile& w, const SurfaceSystem& sys,
                                       const TorusGrid& grid,
                                       std::size_t budget = default_grid_budget()) {
  if (grid.r() != sys.r) throw GridMismatch("kernel_grid_sample: grid.r != sys.r");
  if (grid.total() > budget) throw BudgetExceeded("kernel_grid_sample: grid over budget");
  const long long H = static_cast<long long>(std::floor(2.0 * w.N));
  FourierTable t;
  t.grid = grid;
  t.values = detail::fold_and_transform(grid, [&](auto&& sink) {
    std::array<long long, 8> pbuf{};
    std::vector<long long> n(sys.d, -H);
    std::vector<double> x(sys.d);
    for (;;) {
      for (int i = 0; i < sys.d; ++i) x[i] = static_cast<double>(n[i]);
      const double wn = w.weight_multi(x);
      if (wn != 0.0) {
        detail::evaluate_map_into(sys, n, std::span<long long>(pbuf.data(), sys.r));
        sink(std::span<const long long>(pbuf.data(), sys.r), cplx(wn, 0.0));
      }
      int i = sys.d - 1;
      for (; i >= 0; --i) {
        if (++n[i] <= H) break;
        n[i] = -H;
      }
      if (i < 0) break;
    }
  });
  t.prov.kind = "F";
  return t;
}

// Smallest grid on which the trapezoid rule integrates |F_a|^{2s} exactly:
// M_i = 2 s (frequency extent of coordinate i) + 1.
inline TorusGrid nyquist_grid(const SurfaceSystem& sys, long long N, int s,
                              std::size_t budget = default_grid_budget()) {
  if (s < 1) throw InvalidRange("nyquist_grid requires s >= 1");
  std::vector<long long> ext = sys.frequency_extent(N);
  TorusGrid g;
  std::size_t total = 1;
  for (long long e : ext) {
    std::size_t m = static_cast<std::size_t>(2 * static_cast<long long>(s) * e + 1);
    g.dims.push_back(m);
    if (total > budget / m + 1) throw BudgetExceeded("nyquist_grid over budget");
    total *= m;
  }
  if (total > budget) throw BudgetExceeded("nyquist_grid over budget");
  g.offsets.assign(g.dims.size(), 0.0);
  return g;
}

// ---------------------------------------------------------------------------
// Binary table format: "CLFT", version, r, dims, offsets, provenance, then
// little-endian (re, im) binary64 pairs in row-major order.

inline void save_table(const FourierTable& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  auto put_u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put_u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), 8); };
  out.write("CLFT", 4);
  put_u32(1);
  put_u32(static_cast<std::uint32_t>(t.grid.r()));
  for (std::size_t m : t.grid.dims) put_u64(m);
  for (double o : t.grid.offsets) put_f64(o);
  put_u32(static_cast<std::uint32_t>(t.prov.kind.size()));
  out.write(t.prov.kind.data(), static_cast<std::streamsize>(t.prov.kind.size()));
  put_f64(t.prov.l2_norm);
  put_u32(static_cast<std::uint32_t>(t.prov.params.size()));
  out.write(t.prov.params.data(), static_cast<std::streamsize>(t.prov.params.size()));
  for (const cplx& v : t.values) {
    put_f64(v.real());
    put_f64(v.imag());
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline FourierTable load_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "CLFT", 4) != 0) throw IoError("bad table magic");
  auto get_u32 = [&] { std::uint32_t v; in.read(reinterpret_cast<char*>(&v), 4); return v; };
  auto get_u64 = [&] { std::uint64_t v; in.read(reinterpret_cast<char*>(&v), 8); return v; };
  auto get_f64 = [&] { double v; in.read(reinterpret_cast<char*>(&v), 8); return v; };
  if (get_u32() != 1) throw IoError("unsupported table version");
  FourierTable t;
  std::uint32_t r = get_u32();
  t.grid.dims.resize(r);
  t.grid.offsets.resize(r);
  for (auto& m : t.grid.dims) m = get_u64();
  for (auto& o : t.grid.offsets) o = get_f64();
  std::uint32_t klen = get_u32();
  t.prov.kind.resize(klen);
  in.read(t.prov.kind.data(), klen);
  t.prov.l2_norm = get_f64();
  std::uint32_t plen = get_u32();
  t.prov.params.resize(plen);
  in.read(t.prov.params.data(), plen);
  t.values.resize(t.grid.total());
  for (cplx& v : t.values) {
    double re = get_f64(), im = get_f64();
    v = {re, im};
  }
  if (!in) throw IoError("truncated table file");
  return t;
}

inline void export_abs_csv(const FourierTable& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string());
  const int r = t.grid.r();
  out << "# ";
  for (int i = 0; i < r; ++i) out << "alpha" << i << ",";
  out << "abs\n";
  std::vector<double> alpha(r);
  char buf[64];
  for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
    t.grid.point(idx, alpha);
    for (int i = 0; i < r; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,", alpha[i]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", std::abs(t.values[idx]));
    out << buf;
  }
}

}  // namespace circlelab
