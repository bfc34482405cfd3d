#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "circlelab/common.hpp"
#include "circlelab/fft.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/surfaces.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Elementary multiplicative machinery.

inline std::vector<std::pair<long long, int>> factorize(long long n) {
  std::vector<std::pair<long long, int>> f;
  if (n < 0) n = -n;
  for (long long p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) { n /= p; ++e; }
    f.emplace_back(p, e);
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline int mobius(long long n) {
  if (n == 1) return 1;
  int m = 1;
  for (auto [p, e] : factorize(n)) {
    if (e > 1) return 0;
    m = -m;
  }
  return m;
}

inline long long totient(long long n) {
  long long t = n;
  for (auto [p, e] : factorize(n)) t -= t / p;
  return t;
}

// Truncated divisor function d(n, Q) = #{1 <= q <= Q : q | n}, d(0, Q) = Q.
inline long long truncated_divisor(long long n, long long Q) {
  if (Q < 1) throw InvalidRange("truncated_divisor requires Q >= 1");
  if (n == 0) return Q;
  if (n < 0) n = -n;
  long long count = 0;
  for (long long q = 1; q <= Q; ++q)
    if (n % q == 0) ++count;
  return count;
}

// Ramanujan sum c_q(n) = sum_{(a,q)=1} e_q(an) = sum_{d | (q,n)} d mu(q/d).
inline long long ramanujan_sum(long long q, long long n) {
  if (q < 1) throw InvalidRange("ramanujan_sum requires q >= 1");
  if (n < 0) n = -n;
  long long g = n == 0 ? q : std::gcd(q, n);
  long long c = 0;
  for (long long d = 1; d * d <= g; ++d) {
    if (g % d) continue;
    c += d * mobius(q / d);
    long long d2 = g / d;
    if (d2 != d) c += d2 * mobius(q / d2);
  }
  return c;
}

// Direct complex-summation route, used as an oracle for the formula above.
inline cplx ramanujan_sum_direct(long long q, long long n) {
  return pairwise_sum<cplx>(1, static_cast<std::size_t>(q) + 1, [&](std::size_t a) {
    if (std::gcd(static_cast<long long>(a), q) != 1) return cplx{};
    return e_q(static_cast<long long>(a) * (n % q), q);
  });
}

// ---------------------------------------------------------------------------
// Complete exponential sums S(a,b;q) = sum_{u mod q} e_q(a u^k + b u).

namespace detail {

inline long long mulmod(long long a, long long b, long long q) {
  return static_cast<long long>(
      static_cast<__int128>(a) * b % q);
}

inline long long powmod(long long base, int exp, long long q) {
  long long r = 1 % q;
  base %= q;
  if (base < 0) base += q;
  for (int i = 0; i < exp; ++i) r = mulmod(r, base, q);
  return r;
}

}  // namespace detail

inline cplx gaussian_sum(long long a, long long b, long long q, int k) {
  if (q < 1) throw InvalidRange("gaussian_sum requires q >= 1");
  return pairwise_sum<cplx>(0, static_cast<std::size_t>(q), [&](std::size_t u) {
    long long uu = static_cast<long long>(u);
    long long ph = detail::mulmod(a % q, detail::powmod(uu, k, q), q) +
                   detail::mulmod(b % q, uu, q);
    return e_q(ph, q);
  });
}

// Empirical constant for Hua's bound |q^{-1} S(a,b;q)| <~ q^{-1/k + eps}:
// the scan reports max over q <= qmax, (a,q)=1, b mod q of
// |q^{-1} S(a,b;q)| q^{1/k - eps}.  All b at once via a length-q DFT.
struct HuaScanReport {
  double max_ratio = 0.0;
  long long arg_q = 1, arg_a = 0, arg_b = 0;
  std::vector<std::pair<long long, double>> per_q_max;
};

inline HuaScanReport hua_constant_scan(int k, long long qmax, double eps) {
  if (qmax < 1 || qmax > 10000)
    throw InvalidRange("hua_constant_scan requires 1 <= qmax <= 10^4");
  HuaScanReport rep;
  rep.max_ratio = 1.0;  // q = 1 term: S(0,0;1) = 1
  rep.per_q_max.emplace_back(1, 1.0);
  for (long long q = 2; q <= qmax; ++q) {
    std::vector<long long> powk(q);
    for (long long u = 0; u < q; ++u) powk[u] = detail::powmod(u, k, q);
    double qnorm = std::pow(static_cast<double>(q), 1.0 / k - eps);
    double qbest = 0.0;
    long long qbest_a = 0, qbest_b = 0;
    std::vector<cplx> x(q);
    for (long long a = 1; a < q; ++a) {
      if (std::gcd(a, q) != 1) continue;
      for (long long u = 0; u < q; ++u) x[u] = e_q(detail::mulmod(a, powk[u], q), q);
      std::vector<cplx> X = x;
      dft_inplace(X, +1);  // X[b] = S(a, b; q)
      for (long long b = 0; b < q; ++b) {
        double ratio = std::abs(X[b]) / static_cast<double>(q) * qnorm;
        if (ratio > qbest) { qbest = ratio; qbest_a = a; qbest_b = b; }
      }
    }
    rep.per_q_max.emplace_back(q, qbest);
    if (qbest > rep.max_ratio) {
      rep.max_ratio = qbest;
      rep.arg_q = q;
      rep.arg_a = qbest_a;
      rep.arg_b = qbest_b;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Exact representation counting via sparse integer convolution.

template <class V>
using SparseTable = std::map<std::vector<long long>, V>;

template <class V>
SparseTable<V> sparse_convolve(const SparseTable<V>& a, const SparseTable<V>& b,
                               std::size_t budget = op_budget()) {
  if (a.size() * b.size() > budget)
    throw BudgetExceeded("sparse convolution over operation budget");
  SparseTable<V> out;
  std::vector<long long> key;
  for (const auto& [ka, va] : a) {
    for (const auto& [kb, vb] : b) {
      key = ka;
      for (std::size_t i = 0; i < key.size(); ++i) key[i] += kb[i];
      out[key] += va * vb;
    }
  }
  return out;
}

// s-fold convolution power by repeated squaring.
template <class V>
SparseTable<V> sparse_power(const SparseTable<V>& base, int s,
                            std::size_t budget = op_budget()) {
  SparseTable<V> acc;
  SparseTable<V> sq = base;
  int e = s;
  bool acc_set = false;
  while (e > 0) {
    if (e & 1) {
      acc = acc_set ? sparse_convolve(acc, sq, budget) : sq;
      acc_set = true;
    }
    e >>= 1;
    if (e) sq = sparse_convolve(sq, sq, budget);
  }
  return acc;
}

struct RepTable {
  SurfaceSystem sys;
  int s = 1;
  long long N = 0;
  SparseTable<long long> counts;

  long long total() const {
    long long t = 0;
    for (const auto& [k, v] : counts) t += v;
    return t;
  }

  long long max_count() const {
    long long m = 0;
    for (const auto& [k, v] : counts) m = std::max(m, v);
    return m;
  }
};

// Level-1 table: one entry per support point of the family.
inline SparseTable<long long> level_one_table(const SurfaceSystem& sys, long long N) {
  SparseTable<long long> t;
  std::vector<long long> n(sys.d);
  if (sys.family == Family::KthPowers) {
    for (long long v = 1; v <= N; ++v) {
      n[0] = v;
      t[sys.evaluate(n)] += 1;
    }
    return t;
  }
  std::fill(n.begin(), n.end(), -N);
  for (;;) {
    t[sys.evaluate(n)] += 1;
    int i = sys.d - 1;
    for (; i >= 0; --i) {
      if (++n[i] <= N) break;
      n[i] = -N;
    }
    if (i < 0) break;
  }
  return t;
}

inline long long support_size(const SurfaceSystem& sys, long long N) {
  if (sys.family == Family::KthPowers) return N;
  long long sz = 1;
  for (int i = 0; i < sys.d; ++i) sz *= 2 * N + 1;
  return sz;
}

inline RepTable representation_table(const SurfaceSystem& sys, int s, long long N,
                                     std::size_t budget = op_budget()) {
  if (s < 1) throw InvalidRange("representation_table requires s >= 1");
  RepTable t;
  t.sys = sys;
  t.s = s;
  t.N = N;
  t.counts = sparse_power(level_one_table(sys, N), s, budget);
  return t;
}

inline RepTable convolve(const RepTable& a, const RepTable& b,
                         std::size_t budget = op_budget()) {
  if (a.N != b.N) throw GridMismatch("rep table range mismatch");
  RepTable out;
  out.sys = a.sys;
  out.s = a.s + b.s;
  out.N = a.N;
  out.counts = sparse_convolve(a.counts, b.counts, budget);
  return out;
}

// ---------------------------------------------------------------------------
// Hypothesis-K style scan: max_{n <= X} R_{s,k}(n) with R the number of
// ordered representations by s positive k-th powers.

struct HypKReport {
  long long max_count = 0;
  std::vector<long long> argmax;
  // (X', max over n <= X') over dyadic truncations.
  std::vector<std::pair<long long, long long>> growth;
};

inline HypKReport hypothesis_k_scan(int k, int s, long long X,
                                    std::size_t budget = op_budget()) {
  if (s < 1 || k < 2) throw InvalidRange("hypothesis_k_scan requires s >= 1, k >= 2");
  long long N = 1;
  while (checked_pow(N + 1, k) <= X) ++N;
  if (checked_pow(N, k) < X) ++N;  // ensure s N^k >= X
  SparseTable<long long> lvl;
  std::vector<long long> key(1);
  for (long long n = 1; n <= N; ++n) {
    key[0] = checked_pow(n, k);
    lvl[key] += 1;
  }
  SparseTable<long long> acc = lvl;
  for (int i = 1; i < s; ++i) {
    acc = sparse_convolve(acc, lvl, budget);
    // prune sums already beyond X; they cannot come back down
    for (auto it = acc.begin(); it != acc.end();)
      it = it->first[0] > X ? acc.erase(it) : std::next(it);
  }
  HypKReport rep;
  for (const auto& [u, c] : acc) {
    if (u[0] > X) continue;
    if (c > rep.max_count) {
      rep.max_count = c;
      rep.argmax = {u[0]};
    } else if (c == rep.max_count && rep.argmax.size() < 16) {
      rep.argmax.push_back(u[0]);
    }
  }
  for (long long Xp = X; Xp >= 1; Xp /= 2) {
    long long m = 0;
    for (const auto& [u, c] : acc)
      if (u[0] <= Xp) m = std::max(m, c);
    rep.growth.emplace_back(Xp, m);
    if (Xp == 1) break;
  }
  std::reverse(rep.growth.begin(), rep.growth.end());
  return rep;
}

// ---------------------------------------------------------------------------
// Vinogradov system counts J_{s,k}(N): solutions of
// sum n_i^j = sum m_i^j, 1 <= j <= k, with all entries in [1, N].

struct VinogradovReport {
  long long J = 0;
  long long diagonal_lower = 0;            // s! * binom(N, s)
  std::optional<long long> diagonal_exact; // permutation-weighted diagonal count
};

inline VinogradovReport vinogradov_count(int s, int k, long long N,
                                         std::size_t budget = op_budget()) {
  if (s < 1 || k < 1) throw InvalidRange("vinogradov_count requires s, k >= 1");
  if (s * k > 8 || N > 64)
    throw BudgetExceeded("vinogradov_count covers s*k <= 8, N <= 64");
  SparseTable<long long> lvl;
  std::vector<long long> key(k);
  for (long long n = 1; n <= N; ++n) {
    for (int j = 1; j <= k; ++j) key[j - 1] = checked_pow(n, j);
    lvl[key] += 1;
  }
  SparseTable<long long> acc = sparse_power(lvl, s, budget);
  VinogradovReport rep;
  for (const auto& [u, c] : acc) rep.J += c * c;
  long long binom = 1;
  for (int i = 0; i < s; ++i) binom = binom * (N - i) / (i + 1);
  long long sfact = 1;
  for (int i = 2; i <= s; ++i) sfact *= i;
  rep.diagonal_lower = sfact * binom;
  // Exact diagonal count: sum over multisets of (s!/prod mult!)^2, feasible
  // for moderate multiset counts.
  double multisets = 1.0;
  for (int i = 0; i < s; ++i) multisets *= static_cast<double>(N + i) / (i + 1);
  if (multisets <= 2e7) {
    long long diag = 0;
    std::vector<long long> tup(s, 1);
    for (;;) {
      long long perms = sfact;
      int run = 1;
      long long runf = 1;
      for (int i = 1; i <= s; ++i) {
        if (i < s && tup[i] == tup[i - 1]) {
          ++run;
          runf *= run;
        } else {
          perms /= runf;
          run = 1;
          runf = 1;
        }
      }
      diag += perms * perms;
      int i = s - 1;
      for (; i >= 0; --i) {
        if (tup[i] < N) {
          ++tup[i];
          for (int j = i + 1; j < s; ++j) tup[j] = tup[i];
          break;
        }
      }
      if (i < 0) break;
    }
    rep.diagonal_exact = diag;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Divisor moments and tails by blocked sieve.

namespace detail {

// Applies fn(n, d(n,Q)) for n = 1..X.
template <class F>
void sieve_truncated_divisors(long long Q, long long X, F&& fn) {
  const long long block = 1 << 22;
  std::vector<std::uint32_t> d;
  for (long long lo = 1; lo <= X; lo += block) {
    long long hi = std::min(X, lo + block - 1);
    d.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    for (long long q = 1; q <= Q; ++q) {
      long long start = ((lo + q - 1) / q) * q;
      for (long long m = start; m <= hi; m += q) ++d[static_cast<std::size_t>(m - lo)];
    }
    for (long long n = lo; n <= hi; ++n) fn(n, static_cast<long long>(d[n - lo]));
  }
}

}  // namespace detail

// sum_{|l| <= X} d(l, Q)^B, exact (d(0,Q) = Q contributes Q^B).
inline unsigned long long divisor_moment(int B, long long Q, long long X) {
  if (B < 1) throw InvalidRange("divisor_moment requires B >= 1");
  if (X < 0 || X > 100000000LL) throw BudgetExceeded("divisor_moment covers X <= 10^8");
  if (Q < 1) throw InvalidRange("divisor_moment requires Q >= 1");
  auto powB = [B](long long v) {
    unsigned __int128 r = 1;
    for (int i = 0; i < B; ++i) r *= static_cast<unsigned long long>(v);
    return r;
  };
  unsigned __int128 total = powB(Q);
  detail::sieve_truncated_divisors(Q, X, [&](long long, long long dv) {
    total += 2 * powB(dv);
  });
  if (total > static_cast<unsigned __int128>(~0ULL))
    throw OverflowRisk("divisor_moment exceeds 64 bits");
  return static_cast<unsigned long long>(total);
}

// #{|n| <= X : d(n, Q) >= D}, exact.
inline long long divisor_tail_count(double D, long long Q, long long X) {
  if (D < 1.0) throw InvalidRange("divisor_tail_count requires D >= 1");
  if (X < 0 || X > 100000000LL) throw BudgetExceeded("divisor_tail_count covers X <= 10^8");
  long long count = (static_cast<double>(Q) >= D) ? 1 : 0;  // n = 0 term
  detail::sieve_truncated_divisors(Q, X, [&](long long, long long dv) {
    if (static_cast<double>(dv) >= D) count += 2;
  });
  return count;
}

// ---------------------------------------------------------------------------
// Truncated singular series for monomial curves:
//   sum_{q <= Qmax} sum_{(a,q)=1} |q^{-1} sum_{u mod q} e_q(a_1 u^{k_1}+...)|^p.

struct SingularSeriesReport {
  double partial = 0.0;
  std::vector<double> per_q;       // per_q[q-1] = block term for modulus q
  double fitted_decay = 0.0;       // slope of log t_q vs log q on the tail
  double tail_estimate = 0.0;      // crude extrapolation beyond Qmax
};

inline SingularSeriesReport singular_series_partial(const std::vector<int>& kvec,
                                                    double p, long long Qmax,
                                                    std::size_t budget = op_budget()) {
  const int t = static_cast<int>(kvec.size());
  if (t < 1 || t > 3) throw InvalidRange("singular_series_partial covers 1 <= t <= 3");
  if (Qmax < 1 || Qmax > 1000)
    throw InvalidRange("singular_series_partial covers Qmax <= 10^3");
  double ops = 0;
  for (long long q = 1; q <= Qmax; ++q) ops += std::pow(static_cast<double>(q), t + 1);
  if (ops > static_cast<double>(budget))
    throw BudgetExceeded("singular series scan over operation budget");

  SingularSeriesReport rep;
  rep.per_q.resize(static_cast<std::size_t>(Qmax), 0.0);
  for (long long q = 1; q <= Qmax; ++q) {
    std::vector<std::vector<long long>> pows(t, std::vector<long long>(q));
    for (int i = 0; i < t; ++i)
      for (long long u = 0; u < q; ++u) pows[i][u] = detail::powmod(u, kvec[i], q);
    std::vector<cplx> roots(q);
    for (long long rphase = 0; rphase < q; ++rphase) roots[rphase] = e_q(rphase, q);
    double term = 0.0;
    std::vector<long long> a(t, 0);
    for (;;) {
      long long g = q;
      for (int i = 0; i < t; ++i) g = std::gcd(g, a[i]);
      if (g == 1 || (q == 1)) {
        cplx inner = pairwise_sum<cplx>(0, static_cast<std::size_t>(q), [&](std::size_t u) {
          long long ph = 0;
          for (int i = 0; i < t; ++i) ph = (ph + detail::mulmod(a[i], pows[i][u], q)) % q;
          return roots[ph];
        });
        term += std::pow(std::abs(inner) / static_cast<double>(q), p);
      }
      int i = t - 1;
      for (; i >= 0; --i) {
        if (++a[i] < q) break;
        a[i] = 0;
      }
      if (i < 0) break;
    }
    rep.per_q[q - 1] = term;
    rep.partial += term;
  }
  // Fit log t_q ~ log C - beta log q on the nonzero upper half of the range.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int npts = 0;
  for (long long q = std::max<long long>(2, Qmax / 4); q <= Qmax; ++q) {
    double tq = rep.per_q[q - 1];
    if (tq <= 0) continue;
    double x = std::log(static_cast<double>(q)), y = std::log(tq);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++npts;
  }
  if (npts >= 2) {
    double beta = -(npts * sxy - sx * sy) / (npts * sxx - sx * sx);
    rep.fitted_decay = beta;
    if (beta > 1.0) {
      double C = std::exp((sy + beta * sx) / npts);
      rep.tail_estimate = C * std::pow(static_cast<double>(Qmax), 1.0 - beta) / (beta - 1.0);
    } else {
      rep.tail_estimate = std::numeric_limits<double>::infinity();
    }
  }
  return rep;
}

// Truncated singular integral over the sup-norm box |xi|_inf <= R:
//   int_{|xi| <= R} | int eta(x) e(xi_1 x^{k_1} + ...) dx |^p dxi.
inline double singular_integral_truncated(const std::vector<int>& kvec, double p,
                                          double R,
                                          const Bump& eta = Bump{}) {
  const int t = static_cast<int>(kvec.size());
  if (t < 1 || t > 2) throw InvalidRange("singular_integral_truncated covers t <= 2");
  if (!(R > 0) || R > 1000.0) throw InvalidRange("singular_integral_truncated covers R <= 10^3");
  auto inner_abs_p = [&](const std::vector<double>& xi) {
    double cycles = 0.0;
    for (int i = 0; i < t; ++i) cycles += std::abs(xi[i]) * std::pow(2.0, kvec[i]);
    cplx J = oscillatory_quadrature(
        [&](double x) {
          long double cyc = 0.0L;
          for (int i = 0; i < t; ++i)
            cyc += static_cast<long double>(xi[i]) * std::pow(static_cast<long double>(x), kvec[i]);
          return eta(x) * unit_phase(cyc);
        },
        -2.0, 2.0, cycles, 1e-9);
    return std::pow(std::abs(J), p);
  };
  if (t == 1) {
    return adaptive_simpson(
        [&](double xi) { return inner_abs_p({xi}); }, -R, R, 1e-7 * (1.0 + R));
  }
  return adaptive_simpson(
      [&](double xi1) {
        return adaptive_simpson(
            [&](double xi2) {
              return inner_abs_p({xi1, xi2});
            },
            -R, R, 1e-6 * (1.0 + R));
      },
      -R, R, 1e-5 * (1.0 + R) * (1.0 + R));
}

}  // namespace circlelab
