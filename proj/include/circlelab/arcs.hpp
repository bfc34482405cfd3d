#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "circlelab/arith.hpp"
#include "circlelab/common.hpp"
#include "circlelab/rational.hpp"
#include "circlelab/surfaces.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Rational approximation and arc membership.

struct FareyFraction {
  long long a = 1;
  long long q = 1;  // gcd(a, q) = 1, 1 <= a <= q; a = q = 1 represents 0 mod 1
};

struct RationalApprox {
  FareyFraction frac;
  double error;  // torus distance |alpha - a/q|
};

// Continued-fraction convergent with q <= Qmax; satisfies the Dirichlet
// inequality |alpha - a/q| <= 1/(q Qmax).
inline RationalApprox best_rational(double alpha, long long Qmax) {
  if (Qmax < 1) throw InvalidRange("best_rational requires Qmax >= 1");
  double x = alpha - std::floor(alpha);
  long long h_prev = 0, k_prev = 1;  // p_{-1}/q_{-1}
  long long h = 1, k = 0;            // p_0/q_0 placeholders for a_0 = 0
  // convergents of x in [0,1): p/q with p0 = 0, q0 = 1
  long long p_best = 0, q_best = 1;
  double rem = x;
  long long p_cur = 0, q_cur = 1;
  h_prev = 1; k_prev = 0;  // (p_{-1}, q_{-1}) = (1, 0)
  h = 0; k = 1;            // (p_0, q_0) = (0, 1), a_0 = floor(x) = 0
  p_best = 0; q_best = 1;
  for (int it = 0; it < 64; ++it) {
    if (rem < 1e-15) break;
    rem = 1.0 / rem;
    double a_real = std::floor(rem);
    if (a_real > 9e17) break;
    long long a_i = static_cast<long long>(a_real);
    rem -= a_real;
    long long k_next = a_i * k + k_prev;
    if (k_next > Qmax || k_next <= 0) break;
    long long h_next = a_i * h + h_prev;
    h_prev = h; k_prev = k;
    h = h_next; k = k_next;
    p_best = h; q_best = k;
    p_cur = h; q_cur = k;
  }
  (void)p_cur; (void)q_cur;
  RationalApprox out;
  if (p_best == 0) {
    out.frac = {1, 1};  // the fraction 0 == 1 on the torus
  } else {
    out.frac = {p_best, q_best};
  }
  out.error = torus_norm(x - static_cast<double>(p_best) / static_cast<double>(q_best));
  return out;
}

struct ArcClass {
  bool major = false;
  FareyFraction frac;  // meaningful when major
};

// Major iff some q <= Q, (a,q)=1 has ||alpha - a/q|| <= Q / N^k.
// Deterministic ties: smallest q, then smallest a.
inline ArcClass classify_arc(double alpha, long long Q, long long N, int k) {
  if (Q < 1) throw InvalidRange("classify_arc requires Q >= 1");
  const double width = static_cast<double>(Q) /
                       static_cast<double>(checked_pow(N, k));
  const double x = alpha - std::floor(alpha);
  for (long long q = 1; q <= Q; ++q) {
    long long best_a = 0;
    if (width * q >= 1.0) {
      // Fat arcs: every residue is within reach; scan ascending for ties.
      for (long long a = 1; a <= q; ++a) {
        if (std::gcd(a, q) != 1) continue;
        if (torus_norm(x - static_cast<double>(a) / q) <= width) { best_a = a; break; }
      }
    } else {
      long long a0 = static_cast<long long>(std::llround(x * static_cast<double>(q)));
      for (long long da = -1; da <= 1; ++da) {
        long long a_raw = a0 + da;
        long long a = ((a_raw % q) + q) % q;
        if (a == 0) a = q;
        if (std::gcd(a, q) != 1) continue;
        if (torus_norm(x - static_cast<double>(a) / q) <= width) {
          if (best_a == 0 || a < best_a) best_a = a;
        }
      }
    }
    if (best_a != 0) return {true, {best_a, q}};
  }
  return {false, {}};
}

// ---------------------------------------------------------------------------
// Mollifier family of dyadic arc cutoffs.
//
// kappa is a bump with [-1,1] < kappa < [-2,2].  With scale(s) = 2^s N^{k-1},
//   phi^(s) = kappa(scale(s) .) - kappa(2 scale(s) .)   for 2^s < Ntilde,
//   phi^(s) = kappa(scale(s) .)                         for 2^s = Ntilde,
// and the arc mollifier Phi_{Q,s} places translates of phi^(s) at the
// fractions a/q with q ~ Q (meaning Q <= q < 2Q).  The dyadic sum telescopes:
// sum_{Q <= 2^s <= Ntilde} phi^(s) = kappa(Q N^{k-1} .).

class MollifierFamily {
 public:
  MollifierFamily(int k, long long N, double c1 = 0.125,
                  BumpShape shape = BumpShape::QuinticPlateau)
      : k_(k), N_(N), c1_(c1), kappa_(shape) {
    if (k < 3) throw InvalidRange("mollifiers require k >= 3");
    if (N < 2) throw InvalidRange("mollifiers require N >= 2");
    if (!(c1 > 0.0 && c1 <= 1.0)) throw InvalidRange("c1 must lie in (0,1]");
    N1_ = std::max<long long>(1, static_cast<long long>(std::floor(c1 * static_cast<double>(N))));
    log2N_ = 0;
    while ((2LL << log2N_) <= N) ++log2N_;
    Ntilde_ = 1LL << log2N_;
    Nk1_ = checked_pow(N, k - 1);
    disjoint_ = compute_disjoint();
  }

  int k() const { return k_; }
  long long N() const { return N_; }
  double c1() const { return c1_; }
  long long N1() const { return N1_; }
  long long Ntilde() const { return Ntilde_; }
  const Bump& kappa() const { return kappa_; }
  long long scale_denominator() const { return Nk1_; }

  // Dyadic levels Q = 1, 2, 4, ... <= N1.
  std::vector<long long> dyadic_levels() const {
    std::vector<long long> qs;
    for (long long Q = 1; Q <= N1_; Q *= 2) qs.push_back(Q);
    return qs;
  }

  int s_max() const { return log2N_; }

  double wrap_to_fundamental(double alpha) const {
    double t = alpha - std::floor(alpha);
    if (t <= 1.0 / (2.0 * static_cast<double>(N1_))) t += 1.0;
    return t;
  }

  double phi_s(int s, double x) const {
    check_level(s);
    const double sc = scale(s);
    if ((1LL << s) == Ntilde_) return kappa_(sc * x);
    return kappa_(sc * x) - kappa_(2.0 * sc * x);
  }

  // Phi_{Q,s}(alpha) = sum_{q ~ Q, (a,q)=1} phi^(s)(alpha - a/q).
  double arc_mollifier(long long Q, int s, double alpha) const {
    check_Q_level(Q, s);
    const double x = wrap_to_fundamental(alpha);
    const double radius = 2.0 / scale(s);
    double total = 0.0;
    for (long long q = Q; q < 2 * Q; ++q) {
      for_each_candidate(q, x, radius, [&](long long, double dist_signed) {
        total += phi_s(s, dist_signed);
      });
    }
    return total;
  }

  // lambda = sum_Q sum_{q~Q} kappa(Q N^{k-1} (alpha - a/q)) (collapsed form),
  // rho = 1 - lambda.
  std::pair<double, double> lambda_rho(double alpha) const {
    const double x = wrap_to_fundamental(alpha);
    double lam = 0.0;
    for (long long Q = 1; Q <= N1_; Q *= 2) {
      const double sc = static_cast<double>(Q) * static_cast<double>(Nk1_);
      const double radius = 2.0 / sc;
      for (long long q = Q; q < 2 * Q; ++q) {
        for_each_candidate(q, x, radius, [&](long long, double dist_signed) {
          lam += kappa_(sc * dist_signed);
        });
      }
    }
    return {lam, 1.0 - lam};
  }

  // Max deviation of the telescoping identity over the sample set.
  double partition_check(long long Q, std::span<const double> xs) const {
    if (!is_dyadic(Q) || Q > Ntilde_)
      throw LevelOutOfRange("partition_check: Q must be dyadic <= Ntilde");
    int s0 = 0;
    while ((1LL << s0) < Q) ++s0;
    double worst = 0.0;
    for (double x : xs) {
      double sum = 0.0;
      for (int s = s0; s <= log2N_; ++s) sum += phi_s(s, x);
      double target = kappa_(static_cast<double>(Q) * static_cast<double>(Nk1_) * x);
      worst = std::max(worst, std::abs(sum - target));
    }
    return worst;
  }

  // gamma^(s) = kappa - kappa(2 .) below the top level, kappa at the top;
  // real-line transform via the bump transform.
  double gamma_hat(int s, double xi) const {
    check_level(s);
    if ((1LL << s) == Ntilde_) return kappa_.hat(xi);
    return kappa_.hat(xi) - 0.5 * kappa_.hat(0.5 * xi);
  }

  // Closed-form Fourier coefficient
  //   Phi-hat_{Q,s}(n) = (sum_{q~Q} c_q(n)) gamma-hat^(s)(n/scale) / scale.
  cplx mollifier_fourier(long long Q, int s, long long n) const {
    check_Q_level(Q, s);
    const double sc = scale(s);
    long long csum = 0;
    for (long long q = Q; q < 2 * Q; ++q) csum += ramanujan_sum(q, n);
    return {static_cast<double>(csum) * gamma_hat(s, static_cast<double>(n) / sc) / sc,
            0.0};
  }

  // Average int Phi_{Q,s} = Phi-hat(0).
  double phi_average(long long Q, int s) const {
    return mollifier_fourier(Q, s, 0).real();
  }

  double lambda_average() const {
    double total = 0.0;
    for (long long Q = 1; Q <= N1_; Q *= 2) {
      int s0 = level_of(Q);
      for (int s = s0; s <= log2N_; ++s) total += phi_average(Q, s);
    }
    return total;
  }

  double rho_average() const { return 1.0 - lambda_average(); }

  // rho-hat(n) = 1_{n=0} - lambda-hat(n); the s-sum collapses through the
  // partition identity to kappa-hat(n / (Q N^{k-1})) / (Q N^{k-1}).
  cplx rho_fourier(long long n, double A = 4.0) const {
    double cap = A * std::pow(static_cast<double>(N_), A);
    if (std::abs(static_cast<double>(n)) > cap)
      throw RangeExceeded("rho_fourier frequency above configured A N^A");
    double lam_hat = 0.0;
    for (long long Q = 1; Q <= N1_; Q *= 2) {
      long long csum = 0;
      for (long long q = Q; q < 2 * Q; ++q) csum += ramanujan_sum(q, n);
      const double sc = static_cast<double>(Q) * static_cast<double>(Nk1_);
      lam_hat += static_cast<double>(csum) * kappa_.hat(static_cast<double>(n) / sc) / sc;
    }
    return {(n == 0 ? 1.0 : 0.0) - lam_hat, 0.0};
  }

  bool disjoint() const { return disjoint_; }

  struct Interval {
    long long Q, a, q;
    Rational center, halfwidth;
  };

  // All mollifier intervals a/q +- 2/(Q N^{k-1}), exact endpoints.
  std::vector<Interval> intervals() const {
    std::vector<Interval> out;
    for (long long Q = 1; Q <= N1_; Q *= 2) {
      Rational hw = Rational(2) / (Rational(Q) * Rational(Nk1_));
      for (long long q = Q; q < 2 * Q; ++q) {
        for (long long a = 1; a <= q; ++a) {
          if (std::gcd(a, q) != 1) continue;
          out.push_back({Q, a, q, Rational(a, q), hw});
        }
      }
    }
    return out;
  }

  double scale(int s) const {
    return static_cast<double>(1LL << s) * static_cast<double>(Nk1_);
  }

  int level_of(long long Q) const {
    if (!is_dyadic(Q)) throw LevelOutOfRange("Q must be dyadic");
    int s = 0;
    while ((1LL << s) < Q) ++s;
    return s;
  }

 private:
  static bool is_dyadic(long long Q) { return Q >= 1 && (Q & (Q - 1)) == 0; }

  void check_level(int s) const {
    if (s < 0 || (1LL << s) > Ntilde_)
      throw LevelOutOfRange("shift level outside 1 <= 2^s <= Ntilde");
  }

  void check_Q_level(long long Q, int s) const {
    check_level(s);
    if (!is_dyadic(Q) || Q > N1_ || (1LL << s) < Q)
      throw LevelOutOfRange("require dyadic Q <= N1 and Q <= 2^s <= Ntilde");
  }

  // Visits fractions a/q within `radius` of x (x in the fundamental domain),
  // passing the signed distance x - a/q.
  template <class F>
  void for_each_candidate(long long q, double x, double radius, F&& fn) const {
    long long a0 = static_cast<long long>(std::llround(x * static_cast<double>(q)));
    for (long long a = a0 - 1; a <= a0 + 1; ++a) {
      if (a < 1 || a > q) continue;
      if (std::gcd(a, q) != 1) continue;
      double dist = x - static_cast<double>(a) / static_cast<double>(q);
      if (std::abs(dist) < radius) fn(a, dist);
    }
  }

  bool compute_disjoint() const {
    std::vector<Interval> iv = intervals();
    std::sort(iv.begin(), iv.end(), [](const Interval& l, const Interval& r) {
      return l.center < r.center;
    });
    if (iv.size() < 2) return true;
    for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
      if (!(iv[i].center + iv[i].halfwidth < iv[i + 1].center - iv[i + 1].halfwidth))
        return false;
    }
    // Torus wrap: compare the last interval against the first shifted by 1.
    const Interval& last = iv.back();
    const Interval& first = iv.front();
    if (!(last.center + last.halfwidth < first.center + Rational(1) - first.halfwidth))
      return false;
    return true;
  }

  int k_;
  long long N_;
  double c1_;
  Bump kappa_;
  long long N1_ = 1;
  long long Ntilde_ = 1;
  int log2N_ = 0;
  long long Nk1_ = 1;
  bool disjoint_ = true;
};

inline bool disjointness_check(const MollifierFamily& fam) { return fam.disjoint(); }

}  // namespace circlelab
