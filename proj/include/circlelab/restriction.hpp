#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "circlelab/arcs.hpp"
#include "circlelab/arith.hpp"
#include "circlelab/common.hpp"
#include "circlelab/expsum.hpp"
#include "circlelab/fft.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/rng.hpp"
#include "circlelab/surfaces.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Moments.

enum class MomentMethod { ExactEven, Quadrature };

struct MomentReport {
  double p = 0.0;
  double value = 0.0;
  MomentMethod method = MomentMethod::Quadrature;
  double predicted_exponent = 0.0;  // d p / 2 - K
  std::optional<double> fitted_slope;
  double refinement_delta = 0.0;
};

// Exact even moment int |F_a|^{2s} dm = sum_u |(a o P)^{*s}(u)|^2 via sparse
// folded convolution; an exact integer when a = 1 on the support.
inline MomentReport even_moment_exact(const CoefficientSequence& a,
                                      const SurfaceSystem& sys, int s,
                                      std::size_t budget = op_budget()) {
  if (s < 1) throw InvalidRange("even_moment_exact requires s >= 1");
  SparseTable<cplx> lvl;
  std::array<long long, 8> pbuf{};
  a.for_each([&](std::span<const long long> n, cplx v) {
    if (v == cplx{}) return;
    detail::evaluate_map_into(sys, n, std::span<long long>(pbuf.data(), sys.r));
    lvl[std::vector<long long>(pbuf.begin(), pbuf.begin() + sys.r)] += v;
  });
  SparseTable<cplx> folded = sparse_power(lvl, s, budget);
  double value = 0.0;
  for (const auto& [u, c] : folded) value += std::norm(c);
  MomentReport rep;
  rep.p = 2.0 * s;
  rep.value = value;
  rep.method = MomentMethod::ExactEven;
  rep.predicted_exponent = sys.d * rep.p / 2.0 - static_cast<double>(sys.K);
  return rep;
}

inline MomentReport moment_quadrature(const FourierTable& t, double p,
                                      const SurfaceSystem* sys = nullptr) {
  if (!(p > 0)) throw InvalidRange("moment_quadrature requires p > 0");
  const std::size_t M = t.values.size();
  double value = pairwise_sum<double>(0, M, [&](std::size_t i) {
    return std::pow(std::abs(t.values[i]), p);
  }) / static_cast<double>(M);
  MomentReport rep;
  rep.p = p;
  rep.value = value;
  rep.method = MomentMethod::Quadrature;
  if (sys) rep.predicted_exponent = sys->d * p / 2.0 - static_cast<double>(sys->K);
  return rep;
}

// Quadrature moment with an M vs 2M refinement delta.
inline MomentReport moment_quadrature_refined(const CoefficientSequence& a,
                                              const SurfaceSystem& sys,
                                              const TorusGrid& grid, double p,
                                              std::size_t budget = default_grid_budget()) {
  FourierTable base = grid_sample(a, sys, grid, budget);
  MomentReport rep = moment_quadrature(base, p, &sys);
  FourierTable fine = grid_sample(a, sys, grid.doubled(), budget);
  rep.refinement_delta = std::abs(moment_quadrature(fine, p).value - rep.value);
  return rep;
}

// ---------------------------------------------------------------------------
// Level sets E_lambda = { |F_a| >= lambda }.

struct LevelSetReport {
  double lambda = 0.0;
  double eta = 0.0;      // lambda / N^{d/2}
  double measure = 0.0;  // fraction of sampled grid points in E_lambda
  TorusGrid grid;
  double refinement_delta = 0.0;
};

inline double level_set_fraction(const FourierTable& t, double lambda) {
  if (lambda < 0) throw InvalidRange("level_set requires lambda >= 0");
  std::size_t count = 0;
  for (const cplx& v : t.values)
    if (std::abs(v) >= lambda) ++count;
  return static_cast<double>(count) / static_cast<double>(t.values.size());
}

inline LevelSetReport level_set_measure(const CoefficientSequence& a,
                                        const SurfaceSystem& sys,
                                        const TorusGrid& grid, double lambda,
                                        std::size_t budget = default_grid_budget()) {
  LevelSetReport rep;
  rep.lambda = lambda;
  rep.eta = lambda / std::pow(static_cast<double>(a.N), sys.d / 2.0);
  rep.grid = grid;
  FourierTable base = grid_sample(a, sys, grid, budget);
  rep.measure = level_set_fraction(base, lambda);
  FourierTable fine = grid_sample(a, sys, grid.doubled(), budget);
  rep.refinement_delta = std::abs(level_set_fraction(fine, lambda) - rep.measure);
  return rep;
}

// ---------------------------------------------------------------------------
// Truncated moments and the layer-cake cross-check.

inline double truncated_moment(const FourierTable& t, double p, double lambda_cut) {
  if (!(p > 0)) throw InvalidRange("truncated_moment requires p > 0");
  const std::size_t M = t.values.size();
  return pairwise_sum<double>(0, M, [&](std::size_t i) {
    double m = std::abs(t.values[i]);
    return m >= lambda_cut ? std::pow(m, p) : 0.0;
  }) / static_cast<double>(M);
}

// Reconstruction through p int_{cut}^inf l^{p-1} m(E_l) dl + cut^p m(E_cut),
// evaluated exactly on the empirical step function.
inline double truncated_moment_layercake(const FourierTable& t, double p,
                                         double lambda_cut) {
  const std::size_t M = t.values.size();
  std::vector<double> mags;
  mags.reserve(M);
  for (const cplx& v : t.values) {
    double m = std::abs(v);
    if (m >= lambda_cut) mags.push_back(m);
  }
  std::sort(mags.begin(), mags.end());
  double integral = 0.0;  // p int l^{p-1} m(E_l) dl above the cut
  for (double m : mags) integral += std::pow(m, p) - std::pow(lambda_cut, p);
  integral /= static_cast<double>(M);
  double boundary = std::pow(lambda_cut, p) * static_cast<double>(mags.size()) /
                    static_cast<double>(M);
  return integral + boundary;
}

// ---------------------------------------------------------------------------
// Discrete Tomas-Stein inequality: with ||a||_2 = 1,
//   lambda^2 m(E_lambda)^2 <= < g * |F|, g >.
// Unnormalized sequences are rescaled through the table provenance.

struct TomasSteinReport {
  double lambda = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double measure = 0.0;
  bool pass = false;
};

inline TomasSteinReport tomas_stein_check(const FourierTable& fa,
                                          const FourierTable& fkernel,
                                          double lambda) {
  if (!fa.grid.same_shape(fkernel.grid))
    throw GridMismatch("tomas_stein_check: incompatible grids");
  const std::size_t M = fa.values.size();
  const double l2 = fa.prov.l2_norm > 0 ? fa.prov.l2_norm : 1.0;
  std::vector<cplx> g(M), h(M);
  std::size_t count = 0;
  for (std::size_t i = 0; i < M; ++i) {
    bool in = std::abs(fa.values[i]) >= lambda;
    g[i] = in ? 1.0 : 0.0;
    count += in;
    h[i] = std::abs(fkernel.values[i]);
  }
  TomasSteinReport rep;
  rep.lambda = lambda;
  rep.measure = static_cast<double>(count) / static_cast<double>(M);
  rep.lhs = (lambda / l2) * (lambda / l2) * rep.measure * rep.measure;
  dft_multi(g, fa.grid.dims, -1);
  dft_multi(h, fa.grid.dims, -1);
  for (std::size_t i = 0; i < M; ++i) g[i] = std::norm(g[i]) * h[i];
  // <g * |F|, g> = (1/M^3) sum_m |g-hat|^2 |F|-hat  (real by symmetry)
  double rhs = 0.0;
  for (std::size_t i = 0; i < M; ++i) rhs += g[i].real();
  rep.rhs = rhs / (static_cast<double>(M) * static_cast<double>(M) *
                   static_cast<double>(M));
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-6) + 1e-300;
  return rep;
}

// ---------------------------------------------------------------------------
// Kernel decomposition F = F_M + F_m over the mollifier family.
//
// Plain:     piece^{Q,s} = Phi_{Q,s}(alpha) F,           F_m = rho F.
// Corrected: piece_{Q,s} = [Phi_{Q,s} - (int Phi / int rho) rho] F,
//            F_m = (1 + sum int Phi / int rho) rho F.
// The alpha frequency is the last grid coordinate.

enum class DecompVariant { Plain, Corrected };

struct KernelDecomposition {
  DecompVariant variant = DecompVariant::Plain;
  SurfaceSystem sys;
  MollifierFamily fam;
  TorusGrid grid;
  FourierTable F, FM, Fm;
  double minor_scalar = 1.0;  // multiplies rho F in the minor piece
  struct Piece {
    long long Q;
    int s;
    FourierTable table;
  };
  std::vector<Piece> pieces;
  std::optional<long long> Q1;
  std::optional<FourierTable> F1, F2;

  const Piece& piece(long long Q, int s) const {
    for (const Piece& p : pieces)
      if (p.Q == Q && p.s == s) return p;
    throw MissingPieces("piece (Q=" + std::to_string(Q) + ", s=" + std::to_string(s) +
                        ") was not retained");
  }
};

inline KernelDecomposition kernel_decompose(
    const WeightProfile& w, const SurfaceSystem& sys_in, const MollifierFamily& fam,
    const TorusGrid& grid, DecompVariant variant,
    std::optional<long long> Q1 = std::nullopt, bool retain_pieces = true,
    std::size_t budget = default_grid_budget()) {
  SurfaceSystem sys = sys_in.family == Family::KthPowers
                          ? SurfaceSystem::k_paraboloid(1, sys_in.k)
                          : sys_in;
  if (sys.family != Family::KParaboloid)
    throw UnsupportedFamily("kernel_decompose needs a k-paraboloid (or kth powers as d=1)");
  if (grid.r() != sys.r) throw GridMismatch("kernel_decompose: grid rank");

  KernelDecomposition dcp{variant, sys, fam, grid, {}, {}, {}, 1.0, {}, Q1, {}, {}};
  dcp.F = kernel_grid_sample(w, sys, grid, budget);

  const int axis = sys.r - 1;  // alpha coordinate
  const std::size_t Ma = grid.dims[axis];

  // Per-alpha weights for every (Q, s) level plus lambda/rho.
  struct Level {
    long long Q;
    int s;
    double average;  // int Phi_{Q,s}
  };
  std::vector<Level> levels;
  for (long long Q : fam.dyadic_levels())
    for (int s = fam.level_of(Q); s <= fam.s_max(); ++s)
      levels.push_back({Q, s, fam.phi_average(Q, s)});

  double phi_avg_total = 0.0;
  for (const Level& lv : levels) phi_avg_total += lv.average;
  const double rho_avg = 1.0 - phi_avg_total;
  const double c = phi_avg_total / rho_avg;
  dcp.minor_scalar = variant == DecompVariant::Corrected ? 1.0 + c : 1.0;

  std::vector<std::vector<double>> weight(levels.size(), std::vector<double>(Ma));
  std::vector<double> rho_alpha(Ma), wM(Ma, 0.0);
  for (std::size_t j = 0; j < Ma; ++j) {
    double alpha = static_cast<double>(j) / static_cast<double>(Ma) + grid.offsets[axis];
    rho_alpha[j] = fam.lambda_rho(alpha).second;
    for (std::size_t li = 0; li < levels.size(); ++li) {
      double phi = fam.arc_mollifier(levels[li].Q, levels[li].s, alpha);
      double wgt = variant == DecompVariant::Plain
                       ? phi
                       : phi - (levels[li].average / rho_avg) * rho_alpha[j];
      weight[li][j] = wgt;
      wM[j] += wgt;
    }
  }

  // alpha is the last coordinate, hence the fastest-varying (stride 1) axis
  auto alpha_multiply = [&](const std::vector<double>& wa) {
    FourierTable t;
    t.grid = grid;
    t.values.resize(dcp.F.values.size());
    for (std::size_t idx = 0; idx < t.values.size(); ++idx)
      t.values[idx] = dcp.F.values[idx] * wa[idx % Ma];
    return t;
  };

  dcp.FM = alpha_multiply(wM);
  dcp.FM.prov.kind = "F_major";
  {
    std::vector<double> wm(Ma);
    for (std::size_t j = 0; j < Ma; ++j) wm[j] = dcp.minor_scalar * rho_alpha[j];
    dcp.Fm = alpha_multiply(wm);
    dcp.Fm.prov.kind = "F_minor";
  }
  if (retain_pieces) {
    if ((levels.size() + 4) * grid.total() > 8 * budget)
      throw BudgetExceeded("kernel_decompose: retained pieces over budget");
    for (std::size_t li = 0; li < levels.size(); ++li) {
      FourierTable t = alpha_multiply(weight[li]);
      t.prov.kind = "piece";
      dcp.pieces.push_back({levels[li].Q, levels[li].s, std::move(t)});
    }
  }
  if (Q1) {
    std::vector<double> w1(Ma, 0.0), w2(Ma, 0.0);
    for (std::size_t li = 0; li < levels.size(); ++li) {
      auto& dst = levels[li].Q <= *Q1 ? w1 : w2;
      for (std::size_t j = 0; j < Ma; ++j) dst[j] += weight[li][j];
    }
    dcp.F1 = alpha_multiply(w1);
    dcp.F2 = alpha_multiply(w2);
  }
  return dcp;
}

struct PieceBoundReport {
  struct Entry {
    long long Q;
    int s;
    double sup;
    double normalized;  // sup / (Q^{0.01} (2^s/Q)^{d/k} N^{d(1-1/k)})
  };
  std::vector<Entry> entries;
  double max_normalized = 0.0;
};

inline PieceBoundReport piece_bound_scan(const KernelDecomposition& dcp) {
  if (dcp.pieces.empty()) throw MissingPieces("no retained pieces to scan");
  PieceBoundReport rep;
  const double d = dcp.sys.d, k = dcp.sys.k;
  const double N = dcp.fam.N();
  for (const auto& piece : dcp.pieces) {
    double sup = piece.table.max_abs();
    double denom = std::pow(static_cast<double>(piece.Q), 0.01) *
                   std::pow(static_cast<double>(1LL << piece.s) / piece.Q, d / k) *
                   std::pow(N, d * (1.0 - 1.0 / k));
    double c = sup / denom;
    rep.entries.push_back({piece.Q, piece.s, sup, c});
    rep.max_normalized = std::max(rep.max_normalized, c);
  }
  return rep;
}

// Verifies hat(piece)(m, l) = omega_d(l) Psi-hat(m - |l|_k^k) at random
// in-band frequencies against the grid DFT of the piece.
inline double piece_fourier_check(const KernelDecomposition& dcp,
                                  const WeightProfile& w, long long Q, int s,
                                  int samples, CounterRng& rng) {
  const auto& piece = dcp.piece(Q, s).table;
  const SurfaceSystem& sys = dcp.sys;
  const int r = sys.r;
  const long long N = dcp.fam.N();
  const long long theta_ext = 2 * N;
  const long long alpha_ext = sys.d * checked_pow(2 * N, sys.k);
  const std::size_t M = piece.values.size();

  const double rho_avg = dcp.fam.rho_average();
  auto psi_hat = [&](long long n) {
    cplx phat = dcp.fam.mollifier_fourier(Q, s, n);
    if (dcp.variant == DecompVariant::Plain) return phat;
    double avg = dcp.fam.phi_average(Q, s);
    return phat - (avg / rho_avg) * dcp.fam.rho_fourier(n, 8.0);
  };

  double worst = 0.0;
  std::vector<long long> freq(r);
  std::vector<double> point(r);
  for (int it = 0; it < samples; ++it) {
    for (int i = 0; i < sys.d; ++i)
      freq[i] = static_cast<long long>(rng.next_below(2 * theta_ext + 1)) - theta_ext;
    freq[r - 1] =
        static_cast<long long>(rng.next_below(2 * alpha_ext + 1)) - alpha_ext;
    // grid DFT coefficient at this frequency
    cplx acc = pairwise_sum<cplx>(0, M, [&](std::size_t idx) {
      piece.grid.point(idx, point);
      long double cyc = 0.0L;
      for (int i = 0; i < r; ++i)
        cyc -= static_cast<long double>(freq[i]) * static_cast<long double>(point[i]);
      return piece.values[idx] * unit_phase(cyc);
    });
    acc /= static_cast<double>(M);
    // closed form
    __int128 lk = 0;
    double omega = 1.0;
    for (int i = 0; i < sys.d; ++i) {
      lk += checked_pow(freq[i], sys.k);
      omega *= w(static_cast<double>(freq[i]));
    }
    cplx expect = omega == 0.0
                      ? cplx{}
                      : omega * psi_hat(freq[r - 1] - static_cast<long long>(lk));
    worst = std::max(worst, std::abs(acc - expect));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Minor-arc Weyl sum scan.

struct WeylScanReport {
  std::vector<long long> N_list;
  std::vector<double> normalized_max;  // max |T| / N^{1-tau}
  std::vector<int> accepted;           // minor-arc samples per N
  double tau = 0.0;
  bool pass = true;  // consecutive growth <= factor 1.5
};

inline WeylScanReport weyl_minor_scan(int k, std::span<const long long> N_list,
                                      int samples, std::uint64_t seed,
                                      double tau_override = -1.0,
                                      BumpShape shape = BumpShape::QuinticPlateau) {
  WeylScanReport rep;
  rep.tau = tau_override > 0 ? tau_override : weyl_tau(k).value();
  for (long long N : N_list) {
    if (N > 512) throw BudgetExceeded("weyl_minor_scan covers N <= 512");
    WeightProfile w(static_cast<double>(N), shape);
    const long long qcap = checked_pow(N, k - 1);
    CounterRng rng(seed ^ static_cast<std::uint64_t>(N));
    double best = 0.0;
    int used = 0;
    const double norm = std::pow(static_cast<double>(N), 1.0 - rep.tau);
    for (int i = 0; i < samples; ++i) {
      double alpha = rng.next_unit();
      RationalApprox ra = best_rational(alpha, qcap);
      if (ra.frac.q < N) continue;  // major-arc sample, rejected
      ++used;
      for (int j = 0; j < 64; ++j) {
        double theta = static_cast<double>(j) / 64.0;
        best = std::max(best, std::abs(eval_weyl(w, k, alpha, theta)) / norm);
      }
    }
    rep.N_list.push_back(N);
    rep.normalized_max.push_back(best);
    rep.accepted.push_back(used);
  }
  for (std::size_t i = 0; i + 1 < rep.normalized_max.size(); ++i) {
    if (rep.normalized_max[i + 1] > 1.5 * rep.normalized_max[i]) rep.pass = false;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Oscillatory integral J(beta, gamma; N) = int eta(x) e(beta N^k x^k + gamma N x) dx.

inline cplx oscillatory_integral(const WeightProfile& w, int k, double beta,
                                 double gamma, long long N) {
  const double nk = static_cast<double>(checked_pow(N, k));
  if (std::abs(beta) * nk > 1e6)
    throw InvalidRange("oscillatory_integral phase budget |beta| N^k <= 10^6");
  const double cycles =
      std::abs(beta) * nk * std::pow(2.0, k) + 2.0 * std::abs(gamma) * N;
  const double Nd = static_cast<double>(N);
  return oscillatory_quadrature(
      [&, k](double x) {
        long double cyc =
            static_cast<long double>(beta) * nk * std::pow(static_cast<long double>(x), k) +
            static_cast<long double>(gamma) * Nd * static_cast<long double>(x);
        return w.bump(x) * unit_phase(cyc);
      },
      -2.0, 2.0, cycles, 1e-9);
}

// ---------------------------------------------------------------------------
// Poisson major-arc identity:
//   T(a/q + beta, theta) = sum_{b mod q} q^{-1} S(a,b;q)
//                          sum_m N J(beta, theta - b/q - m; N),
// truncated at |m| <= m_cut; tolerance calibrated as C N (N m_cut)^{-2}.

struct PoissonReport {
  cplx lhs, rhs;
  double error = 0.0;
  double tol = 0.0;
  bool pass = false;
};

inline PoissonReport poisson_majorarc_check(const WeightProfile& w, int k,
                                            long long N, FareyFraction frac,
                                            double beta, double theta, int m_cut) {
  if (frac.q > N) throw NotMajorArc("require q <= N");
  const double nk1 = static_cast<double>(checked_pow(N, k - 1));
  if (std::abs(beta) > 2.0 / (static_cast<double>(frac.q) * nk1))
    throw NotMajorArc("require |beta| <= 2/(q N^{k-1})");
  PoissonReport rep;
  double alpha = static_cast<double>(frac.a) / static_cast<double>(frac.q) + beta;
  rep.lhs = eval_weyl(w, k, alpha, theta);
  cplx rhs{};
  for (long long b = 0; b < frac.q; ++b) {
    cplx sab = gaussian_sum(frac.a, b, frac.q, k) / static_cast<double>(frac.q);
    cplx inner{};
    for (long long m = -m_cut; m <= m_cut; ++m) {
      double gamma = theta - static_cast<double>(b) / frac.q - static_cast<double>(m);
      inner += static_cast<double>(N) * oscillatory_integral(w, k, beta, gamma, N);
    }
    rhs += sab * inner;
  }
  rep.rhs = rhs;
  rep.error = std::abs(rep.lhs - rep.rhs);
  const double mm = std::max(1, m_cut);
  rep.tol = 50.0 * static_cast<double>(N) /
            (static_cast<double>(N) * mm * static_cast<double>(N) * mm);
  rep.pass = rep.error <= rep.tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Scaling fits.

struct FitReport {
  double slope = 0.0;
  double intercept = 0.0;
  double predicted = 0.0;
  std::vector<double> xs, ys;  // log N, log value
  std::vector<double> residuals;
  std::vector<double> aux;  // per-N refinement deltas where applicable
};

inline void linear_fit(FitReport& rep) {
  const std::size_t n = rep.xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += rep.xs[i];
    sy += rep.ys[i];
    sxx += rep.xs[i] * rep.xs[i];
    sxy += rep.xs[i] * rep.ys[i];
  }
  double denom = n * sxx - sx * sx;
  rep.slope = (n * sxy - sx * sy) / denom;
  rep.intercept = (sy - rep.slope * sx) / n;
  rep.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    rep.residuals[i] = rep.ys[i] - (rep.slope * rep.xs[i] + rep.intercept);
}

enum class ARule { AllOnes, RandomUnit };

inline FitReport scaling_fit(const SurfaceSystem& sys, double p,
                             std::span<const long long> N_list, ARule rule,
                             std::uint64_t seed,
                             std::size_t budget = default_grid_budget()) {
  if (N_list.size() < 4) throw InvalidRange("scaling_fit requires >= 4 values of N");
  FitReport rep;
  const bool even_p = std::abs(p - 2.0 * std::llround(p / 2.0)) < 1e-12;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    long long N = N_list[i];
    CounterRng rng(seed + i);
    CoefficientSequence a = rule == ARule::AllOnes
                                ? CoefficientSequence::all_ones(sys, N)
                                : CoefficientSequence::random_unit(sys, N, rng);
    double value;
    if (even_p) {
      value = even_moment_exact(a, sys, static_cast<int>(std::llround(p / 2.0))).value;
    } else {
      int s_eff = std::max(1, static_cast<int>(std::llround(std::ceil(p / 2.0))));
      TorusGrid g = nyquist_grid(sys, N, s_eff, budget);
      MomentReport mr = moment_quadrature_refined(a, sys, g, p, budget);
      value = mr.value;
      rep.aux.push_back(mr.refinement_delta);
    }
    rep.xs.push_back(std::log(static_cast<double>(N)));
    rep.ys.push_back(std::log(value));
  }
  linear_fit(rep);
  double base = sys.d * p / 2.0 - static_cast<double>(sys.K);
  rep.predicted = rule == ARule::AllOnes ? base + p * sys.d / 2.0 : base;
  return rep;
}

// Level-set exponent fit: eta_N = eta0 N^{-eta_exp}, lambda = eta_N N^{d/2},
// measure slope compared against -K.
inline FitReport level_set_exponent_fit(const SurfaceSystem& sys, double eta0,
                                        double eta_exp,
                                        std::span<const long long> N_list,
                                        int resolution = 4,
                                        std::size_t budget = default_grid_budget()) {
  FitReport rep;
  ExponentProfile prof = exponent_table(sys);
  for (long long N : N_list) {
    double eta = eta0 * std::pow(static_cast<double>(N), -eta_exp);
    double floor_eta = std::pow(static_cast<double>(N), -prof.zeta_bound.value());
    if (eta > 1.0)
      throw RangeViolation("eta above 1: level set empty, fit refused");
    if (eta <= floor_eta)
      throw RangeViolation("eta below the N^{-zeta} validity floor");
    CoefficientSequence a = CoefficientSequence::all_ones(sys, N);
    a.scale(1.0 / a.l2_norm);
    a.l2_norm = 1.0;
    double lambda = eta * std::pow(static_cast<double>(N), sys.d / 2.0);
    std::vector<long long> ext = sys.frequency_extent(N);
    TorusGrid g;
    for (long long e : ext)
      g.dims.push_back(static_cast<std::size_t>(2 * resolution * e + 1));
    g.offsets.assign(g.dims.size(), 0.0);
    LevelSetReport ls = level_set_measure(a, sys, g, lambda, budget);
    if (ls.measure <= 0.0)
      throw RangeViolation("empty level set at N=" + std::to_string(N));
    rep.xs.push_back(std::log(static_cast<double>(N)));
    rep.ys.push_back(std::log(ls.measure));
    rep.aux.push_back(ls.refinement_delta);
  }
  linear_fit(rep);
  rep.predicted = -static_cast<double>(sys.K);
  return rep;
}

}  // namespace circlelab
