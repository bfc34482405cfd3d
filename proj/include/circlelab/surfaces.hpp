#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circlelab/common.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/rational.hpp"
#include "circlelab/rng.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Surface systems P : Z^d -> Z^r.  Three families:
//   KthPowers(k)        P(n) = n^k                      d=1, r=1, K=k
//   KParaboloid(d,k)    P(n) = (n_1..n_d, n_1^k+..+n_d^k)  r=d+1, K=d+k
//   MonomialCurve(k_i)  P(n) = (n^{k_1},..,n^{k_t})      d=1, r=t, K=sum k_i

enum class Family { KthPowers, KParaboloid, MonomialCurve };

inline std::string family_name(Family f) {
  switch (f) {
    case Family::KthPowers: return "kth_powers";
    case Family::KParaboloid: return "k_paraboloid";
    case Family::MonomialCurve: return "monomial_curve";
  }
  return "?";
}

struct SurfaceSystem {
  Family family;
  int d = 1;           // input dimension
  int r = 1;           // output dimension
  long long K = 0;     // total degree
  int k = 0;           // degree parameter (max degree for monomial curves)
  std::vector<int> exponents;  // monomial curve exponents, strictly increasing

  static SurfaceSystem kth_powers(int k) {
    if (k < 2) throw InvalidRange("kth_powers requires k >= 2");
    SurfaceSystem s;
    s.family = Family::KthPowers;
    s.d = 1;
    s.r = 1;
    s.K = k;
    s.k = k;
    return s;
  }

  static SurfaceSystem k_paraboloid(int d, int k) {
    if (d < 1) throw InvalidRange("k_paraboloid requires d >= 1");
    if (k < 2) throw InvalidRange("k_paraboloid requires k >= 2");
    SurfaceSystem s;
    s.family = Family::KParaboloid;
    s.d = d;
    s.r = d + 1;
    s.K = d + k;
    s.k = k;
    return s;
  }

  static SurfaceSystem monomial_curve(std::vector<int> ks) {
    if (ks.empty()) throw InvalidRange("monomial_curve requires exponents");
    for (std::size_t i = 0; i < ks.size(); ++i) {
      if (ks[i] < 1 || (i > 0 && ks[i] <= ks[i - 1]))
        throw InvalidRange("monomial exponents must be strictly increasing positive");
    }
    SurfaceSystem s;
    s.family = Family::MonomialCurve;
    s.d = 1;
    s.r = static_cast<int>(ks.size());
    s.K = 0;
    for (int e : ks) s.K += e;
    s.k = ks.back();
    s.exponents = std::move(ks);
    return s;
  }

  // P(n), exact integer arithmetic, overflow-guarded at 2^62 per component.
  std::vector<long long> evaluate(std::span<const long long> n) const {
    if (static_cast<int>(n.size()) != d)
      throw DimensionMismatch("evaluate_map: argument has wrong dimension");
    std::vector<long long> out;
    out.reserve(r);
    switch (family) {
      case Family::KthPowers:
        out.push_back(checked_pow(n[0], k));
        break;
      case Family::KParaboloid: {
        __int128 sum = 0;
        for (int i = 0; i < d; ++i) out.push_back(n[i]);
        for (int i = 0; i < d; ++i) sum += checked_pow(n[i], k);
        if (sum >= (static_cast<__int128>(1) << 62) ||
            -sum >= (static_cast<__int128>(1) << 62))
          throw OverflowRisk("paraboloid power sum exceeds 2^62");
        out.push_back(static_cast<long long>(sum));
        break;
      }
      case Family::MonomialCurve:
        for (int e : exponents) out.push_back(checked_pow(n[0], e));
        break;
    }
    return out;
  }

  // Per-coordinate frequency extent of P over the support box of radius N
  // (KthPowers support is [1, N]; the other families use [-N, N]^d).
  std::vector<long long> frequency_extent(long long N) const {
    std::vector<long long> ext;
    switch (family) {
      case Family::KthPowers:
        ext.push_back(checked_pow(N, k));
        break;
      case Family::KParaboloid:
        for (int i = 0; i < d; ++i) ext.push_back(N);
        ext.push_back(d * checked_pow(N, k));
        break;
      case Family::MonomialCurve:
        for (int e : exponents) ext.push_back(checked_pow(N, e));
        break;
    }
    return ext;
  }
};

// ---------------------------------------------------------------------------
// Smooth bump eta with [-1,1] < eta < [-2,2].  Two profiles:
//  - QuinticPlateau: C^2 smoothstep transition, exactly evaluable, and its
//    Fourier transform has a closed form (polynomial phase moments).
//  - ExpBump: C-infinity transition, transform by cached quadrature.

enum class BumpShape { QuinticPlateau, ExpBump };

namespace detail {

inline double smoothstep5(double u) {
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

inline double expstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  double s0 = std::exp(-1.0 / u);
  double s1 = std::exp(-1.0 / (1.0 - u));
  return s0 / (s0 + s1);
}

}  // namespace detail

class Bump {
 public:
  explicit Bump(BumpShape shape = BumpShape::QuinticPlateau) : shape_(shape) {}

  BumpShape shape() const { return shape_; }

  double operator()(double x) const {
    double a = std::abs(x);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    double u = 2.0 - a;
    return shape_ == BumpShape::QuinticPlateau ? detail::smoothstep5(u)
                                               : detail::expstep(u);
  }

  // Both transitions satisfy S(u) + S(1-u) = 1, so the mass is exactly 3.
  double mass() const { return 3.0; }

  // Real-line transform hat(xi) = int eta(x) e(-xi x) dx (real, even).
  double hat(double xi) const {
    double a = std::abs(xi);
    if (shape_ == BumpShape::QuinticPlateau) return quintic_hat(a);
    return exp_hat_cached(a);
  }

 private:
  static double quintic_hat(double xi) {
    const double a = kTwoPi * xi;
    std::array<cplx, 6> I = phase_moments(a);
    cplx P = 10.0 * I[3] - 15.0 * I[4] + 6.0 * I[5];
    double plateau = std::abs(a) < 1e-8
                         ? 1.0 - a * a / 6.0
                         : std::sin(a) / a;
    return 2.0 * (plateau + std::cos(2.0 * a) * P.real() +
                  std::sin(2.0 * a) * P.imag());
  }

  double exp_hat_cached(double xi) const {
    static std::mutex mu;
    static std::map<double, double> cache;
    {
      std::scoped_lock lock(mu);
      auto it = cache.find(xi);
      if (it != cache.end()) return it->second;
    }
    const double a = kTwoPi * xi;
    double plateau = std::abs(a) < 1e-8 ? 1.0 - a * a / 6.0 : std::sin(a) / a;
    auto integrand = [a](double x) {
      return detail::expstep(2.0 - x) * std::cos(a * x);
    };
    double tail = oscillatory_quadrature(integrand, 1.0, 2.0, xi, 1e-12);
    double v = 2.0 * (plateau + tail);
    std::scoped_lock lock(mu);
    cache.emplace(xi, v);
    return v;
  }

  BumpShape shape_;
};

// ---------------------------------------------------------------------------
// WeightProfile: omega = eta(./N), tensorized omega_d by coordinate product.

struct WeightProfile {
  double N;
  Bump bump;

  WeightProfile(double scale, BumpShape shape = BumpShape::QuinticPlateau)
      : N(scale), bump(shape) {}

  double operator()(double x) const { return bump(x / N); }

  double weight_multi(std::span<const double> x) const {
    double w = 1.0;
    for (double xi : x) w *= (*this)(xi);
    return w;
  }

  // Sum over |n| <= 2N of omega(n); the plateau alone contributes > 2N.
  double lattice_mass(long long halfwidth = -1) const {
    long long lim = halfwidth < 0 ? static_cast<long long>(std::ceil(2.0 * N)) : halfwidth;
    return pairwise_sum<double>(0, static_cast<std::size_t>(2 * lim + 1),
                                [&](std::size_t i) {
                                  long long n = static_cast<long long>(i) - lim;
                                  return (*this)(static_cast<double>(n));
                                });
  }
};

// ---------------------------------------------------------------------------
// Coefficient sequences a : Z^d -> C supported on [-N, N]^d (KthPowers: [1,N]).
// Stored dense over the box in row-major order for deterministic iteration.

struct CoefficientSequence {
  int d = 1;
  long long N = 0;
  std::vector<cplx> values;  // box side 2N+1, row-major
  double l2_norm = 0.0;

  long long side() const { return 2 * N + 1; }

  std::size_t index(std::span<const long long> n) const {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i) {
      if (n[i] < -N || n[i] > N) throw RangeViolation("lattice point outside box");
      idx = idx * static_cast<std::size_t>(side()) +
            static_cast<std::size_t>(n[i] + N);
    }
    return idx;
  }

  cplx at(std::span<const long long> n) const { return values[index(n)]; }

  void refresh_l2() {
    double s = pairwise_sum<double>(0, values.size(), [&](std::size_t i) {
      return std::norm(values[i]);
    });
    l2_norm = std::sqrt(s);
  }

  double l1_norm() const {
    return pairwise_sum<double>(0, values.size(),
                                [&](std::size_t i) { return std::abs(values[i]); });
  }

  template <class F>
  void for_each(F&& fn) const {
    std::vector<long long> n(d, -N);
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
      fn(std::span<const long long>(n.data(), n.size()), values[idx]);
      for (int i = d - 1; i >= 0; --i) {
        if (++n[i] <= N) break;
        n[i] = -N;
      }
    }
  }

  void scale(double factor) {
    for (cplx& v : values) v *= factor;
    l2_norm *= factor;
  }

  static CoefficientSequence zeros(const SurfaceSystem& sys, long long N) {
    CoefficientSequence a;
    a.d = sys.d;
    a.N = N;
    std::size_t total = 1;
    for (int i = 0; i < sys.d; ++i) {
      total *= static_cast<std::size_t>(2 * N + 1);
      if (total > (static_cast<std::size_t>(1) << 30))
        throw BudgetExceeded("coefficient box too large");
    }
    a.values.assign(total, cplx{});
    return a;
  }

  static CoefficientSequence all_ones(const SurfaceSystem& sys, long long N) {
    CoefficientSequence a = zeros(sys, N);
    fill_support(a, sys, [](std::span<const long long>) { return cplx(1.0, 0.0); });
    a.refresh_l2();
    return a;
  }

  static CoefficientSequence random_unit(const SurfaceSystem& sys, long long N,
                                         CounterRng& rng) {
    CoefficientSequence a = zeros(sys, N);
    fill_support(a, sys, [&rng](std::span<const long long>) {
      // Box-Muller from the counter stream.
      double u1 = rng.next_unit(), u2 = rng.next_unit();
      double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      return cplx(r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2));
    });
    a.refresh_l2();
    if (a.l2_norm > 0) a.scale(1.0 / a.l2_norm);
    a.l2_norm = 1.0;
    return a;
  }

 private:
  template <class F>
  static void fill_support(CoefficientSequence& a, const SurfaceSystem& sys, F&& gen) {
    std::vector<long long> n(a.d, 0);
    if (sys.family == Family::KthPowers) {
      for (long long v = 1; v <= a.N; ++v) {
        n[0] = v;
        a.values[a.index(n)] = gen(std::span<const long long>(n.data(), n.size()));
      }
      return;
    }
    std::fill(n.begin(), n.end(), -a.N);
    for (std::size_t idx = 0; idx < a.values.size(); ++idx) {
      a.values[idx] = gen(std::span<const long long>(n.data(), n.size()));
      for (int i = a.d - 1; i >= 0; --i) {
        if (++n[i] <= a.N) break;
        n[i] = -a.N;
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Exponent calculus from the main truncated/full restriction theorems.

struct ExponentProfile {
  Rational tau;                  // Weyl exponent max(2^{1-k}, 1/(k(k-1)))
  Rational critical;             // 2K/d
  Rational truncated_threshold;  // truncated estimate valid for p > this
  Rational full_threshold;       // full estimate valid for p > this
  Rational zeta_bound;           // truncated estimate valid for zeta < this
  std::optional<bool> lowdim_valid;       // paraboloid: d < (k^2-2k)/(1-k tau)
  std::optional<Rational> lowdim_bound;   // the dimension bound itself
  std::optional<Rational> lowdim_threshold;  // 2(d+k)/d when valid
};

inline Rational weyl_tau(int k) {
  if (k < 2) throw InvalidRange("weyl exponent needs k >= 2");
  if (k - 1 >= 62) throw OverflowRisk("degree too large for exact tau");
  return Rational::max(pow2_rational(1 - k),
                       Rational(1, static_cast<long long>(k) * (k - 1)));
}

inline ExponentProfile exponent_table(const SurfaceSystem& sys) {
  if (sys.family == Family::MonomialCurve)
    throw UnsupportedFamily("exponent_table covers kth_powers and k_paraboloid only");
  ExponentProfile e;
  const int k = sys.k;
  e.tau = weyl_tau(k);
  e.critical = Rational(2 * sys.K, sys.d);
  if (sys.family == Family::KthPowers) {
    e.truncated_threshold = Rational(2 * k);
    e.full_threshold = Rational(2) + Rational(2 * (k - 1)) / e.tau;
    e.zeta_bound = e.tau / Rational(2);
    return e;
  }
  const int d = sys.d;
  e.truncated_threshold = Rational(2 * (d + k) + 2 * k, d);
  e.full_threshold = Rational(2) + Rational(2 * k) / (Rational(d) * e.tau);
  e.zeta_bound = Rational(d) * e.tau / Rational(2);
  Rational denom = Rational(1) - Rational(k) * e.tau;
  Rational bound = Rational(static_cast<long long>(k) * k - 2 * k) / denom;
  e.lowdim_bound = bound;
  e.lowdim_valid = Rational(d) < bound;
  if (*e.lowdim_valid) e.lowdim_threshold = Rational(2 * (d + k), d);
  return e;
}

// Epsilon-removal predicate: a full estimate with eps-loss at exponent p plus
// a truncated estimate at q > p (zeta in (0, d/2)) upgrades to eps-free at q.
inline bool combine_eps_removal(double p, double q, double zeta, int d,
                                long long K) {
  if (!(q > p)) throw InvalidRange("combine_eps_removal requires q > p");
  if (!(zeta > 0.0 && zeta < 0.5 * d))
    throw InvalidRange("combine_eps_removal requires zeta in (0, d/2)");
  return p >= 2.0 * static_cast<double>(K) / static_cast<double>(d);
}

// Completion against a subcritical estimate at p0: the full estimate holds for
// p > max(p1, p0 + (K - d p0/2)/zeta).
inline Rational complete_subcritical(const Rational& p1, const Rational& zeta,
                                     const Rational& p0, int d, long long K) {
  Rational crit(2 * K, d);
  if (!(p1 > crit)) throw InvalidRange("complete_subcritical requires p1 > 2K/d");
  if (!(Rational(0) < zeta && zeta < Rational(d, 2)))
    throw InvalidRange("complete_subcritical requires zeta in (0, d/2)");
  if (!(p0 <= crit)) throw InvalidRange("complete_subcritical requires p0 <= 2K/d");
  Rational gap = (Rational(K) - Rational(d) * p0 / Rational(2)) / zeta;
  return Rational::max(p1, p0 + gap);
}

inline double complete_subcritical(double p1, double zeta, double p0, int d,
                                   long long K) {
  double crit = 2.0 * static_cast<double>(K) / d;
  if (!(p1 > crit)) throw InvalidRange("complete_subcritical requires p1 > 2K/d");
  if (!(zeta > 0.0 && zeta < 0.5 * d))
    throw InvalidRange("complete_subcritical requires zeta in (0, d/2)");
  if (!(p0 <= crit)) throw InvalidRange("complete_subcritical requires p0 <= 2K/d");
  return std::max(p1, p0 + (static_cast<double>(K) - 0.5 * d * p0) / zeta);
}

}  // namespace circlelab
