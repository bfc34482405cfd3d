#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <numeric>
#include <vector>

#include "circlelab/arith.hpp"

using namespace circlelab;
using Catch::Approx;

TEST_CASE("truncated divisor function", "[arith]") {
  REQUIRE(truncated_divisor(1, 10) == 1);
  REQUIRE(truncated_divisor(0, 5) == 5);
  REQUIRE(truncated_divisor(12, 3) == 3);
  REQUIRE(truncated_divisor(-12, 3) == 3);
  REQUIRE(truncated_divisor(12, 100) == 6);
}

TEST_CASE("ramanujan sums", "[arith]") {
  REQUIRE(ramanujan_sum(1, 12345) == 1);
  REQUIRE(ramanujan_sum(6, 1) == 1);
  REQUIRE(ramanujan_sum(4, 2) == -2);
  REQUIRE(ramanujan_sum(5, 0) == 4);  // c_q(0) = phi(q)

  // Moebius formula equals direct complex summation, exact integers
  for (long long q = 1; q <= 60; ++q) {
    for (long long n : {-500LL, -37LL, 0LL, 1LL, 17LL, 360LL, 499LL}) {
      cplx direct = ramanujan_sum_direct(q, n);
      REQUIRE(std::abs(direct.imag()) < 1e-9);
      REQUIRE(std::abs(direct.real() - static_cast<double>(ramanujan_sum(q, n))) <
              1e-9);
    }
  }
}

TEST_CASE("ramanujan block sums obey the divisor bound", "[arith]") {
  // |sum_{q ~ Q} c_q(n)| <= C Q d(n, 2Q); report the fitted C
  double worst = 0.0;
  for (long long Q = 2; Q <= 128; Q *= 2) {
    for (long long n = 1; n <= 10000; n += 7) {
      long long block = 0;
      for (long long q = Q; q < 2 * Q; ++q) block += ramanujan_sum(q, n);
      double ratio = std::abs(static_cast<double>(block)) /
                     (static_cast<double>(Q) *
                      static_cast<double>(truncated_divisor(n, 2 * Q)));
      worst = std::max(worst, ratio);
    }
  }
  INFO("fitted C in |sum c_q| <= C Q d(n,2Q): " << worst);
  REQUIRE(worst <= 3.0);
}

TEST_CASE("gaussian sums", "[arith]") {
  REQUIRE(std::abs(gaussian_sum(0, 0, 1, 3) - cplx(1.0, 0.0)) < 1e-12);
  REQUIRE(std::abs(gaussian_sum(1, 0, 2, 3)) < 1e-12);
  REQUIRE(std::abs(gaussian_sum(1, 0, 3, 3)) < 1e-12);
  for (long long p : {3LL, 5LL, 7LL, 11LL, 13LL}) {
    REQUIRE(std::abs(gaussian_sum(1, 0, p, 2)) ==
            Approx(std::sqrt(static_cast<double>(p))).margin(1e-9));
  }
}

TEST_CASE("hua constant scan", "[arith]") {
  auto r1 = hua_constant_scan(3, 1, 1e-3);
  REQUIRE(r1.max_ratio == Approx(1.0));

  // quadratic consistency: |p^{-1} S(1,0;p)| p^{1/2} = 1 for primes (eps = 0)
  for (long long p : {5LL, 13LL, 29LL}) {
    double ratio = std::abs(gaussian_sum(1, 0, p, 2)) / static_cast<double>(p) *
                   std::sqrt(static_cast<double>(p));
    REQUIRE(ratio == Approx(1.0).margin(1e-9));
  }

  auto r100 = hua_constant_scan(3, 100, 1e-3);
  auto r200 = hua_constant_scan(3, 200, 1e-3);
  REQUIRE(r100.max_ratio <= r200.max_ratio);  // monotone in qmax
  REQUIRE(r200.max_ratio < 10.0);             // bounded empirical constant
  REQUIRE_THROWS_AS(hua_constant_scan(3, 20000, 1e-3), InvalidRange);
}

TEST_CASE("representation tables for sums of two cubes", "[arith]") {
  auto sys = SurfaceSystem::kth_powers(3);
  RepTable t = representation_table(sys, 2, 12);
  REQUIRE(t.counts.at({2}) == 1);
  REQUIRE(t.counts.at({1729}) == 4);
  REQUIRE(t.counts.count({7}) == 0);
  REQUIRE(t.total() == 12 * 12);  // (#support)^s

  RepTable t1 = representation_table(sys, 1, 12);
  REQUIRE(t1.total() == 12);
}

TEST_CASE("representation table convolution associativity", "[arith]") {
  auto sys = SurfaceSystem::k_paraboloid(1, 3);
  RepTable t2 = representation_table(sys, 2, 4);
  RepTable t4 = representation_table(sys, 4, 4);
  RepTable conv = convolve(t2, t2);
  REQUIRE(conv.counts == t4.counts);
  REQUIRE(t4.total() == 9LL * 9 * 9 * 9);
}

TEST_CASE("hypothesis K scan", "[arith]") {
  auto rep = hypothesis_k_scan(2, 2, 50);
  REQUIRE(rep.max_count == 3);
  REQUIRE(rep.argmax == std::vector<long long>{50});

  auto small = hypothesis_k_scan(3, 2, 2);
  REQUIRE(small.max_count == 1);

  auto big = hypothesis_k_scan(3, 3, 10000);
  auto half = hypothesis_k_scan(3, 3, 5000);
  REQUIRE(half.max_count <= big.max_count);
  REQUIRE(big.growth.front().second <= big.growth.back().second);
}

TEST_CASE("vinogradov counts", "[arith]") {
  for (long long N : {3LL, 10LL, 25LL}) {
    auto rep = vinogradov_count(1, 1, N);
    REQUIRE(rep.J == N);
  }
  REQUIRE(vinogradov_count(2, 1, 3).J == 19);

  // J_{2,2}(N) equals the hash-count of the pair map (n1+n2, n1^2+n2^2)
  long long N = 12;
  std::map<std::pair<long long, long long>, long long> hash;
  for (long long n1 = 1; n1 <= N; ++n1)
    for (long long n2 = 1; n2 <= N; ++n2)
      hash[{n1 + n2, n1 * n1 + n2 * n2}] += 1;
  long long J = 0;
  for (auto& [k, c] : hash) J += c * c;
  auto rep = vinogradov_count(2, 2, N);
  REQUIRE(rep.J == J);
  REQUIRE(rep.J >= rep.diagonal_lower);
  REQUIRE(rep.diagonal_exact.has_value());
  // k >= s: the power sums determine the multiset, so J equals the diagonal
  REQUIRE(rep.J == *rep.diagonal_exact);

  REQUIRE_THROWS_AS(vinogradov_count(5, 2, 10), BudgetExceeded);
}

TEST_CASE("divisor moments", "[arith]") {
  REQUIRE(divisor_moment(1, 1, 10) == 21);       // 2X + 1 at Q = 1
  REQUIRE(divisor_moment(3, 1, 10) == 21);
  REQUIRE(divisor_moment(1, 2, 4) == 14);        // hand enumeration
  // per-n oracle
  long long Q = 6, X = 200;
  for (int B : {1, 2, 3}) {
    unsigned long long direct = 0;
    auto powB = [B](long long v) {
      unsigned long long r = 1;
      for (int i = 0; i < B; ++i) r *= static_cast<unsigned long long>(v);
      return r;
    };
    direct += powB(Q);
    for (long long n = 1; n <= X; ++n) direct += 2 * powB(truncated_divisor(n, Q));
    REQUIRE(divisor_moment(B, Q, X) == direct);
  }
}

TEST_CASE("divisor tail counts and Markov consistency", "[arith]") {
  long long X = 100;
  REQUIRE(divisor_tail_count(1.0, 4, X) == 2 * X + 1);
  REQUIRE(divisor_tail_count(5.0, 4, X) == 0);  // D > Q
  // sieve equals per-n enumeration
  long long direct = (4 >= 3) ? 1 : 0;
  for (long long n = 1; n <= X; ++n)
    if (truncated_divisor(n, 4) >= 3) direct += 2;
  REQUIRE(divisor_tail_count(3.0, 4, X) == direct);

  for (int B : {1, 2, 3}) {
    double moment = static_cast<double>(divisor_moment(B, 4, 1000));
    for (double D : {2.0, 3.0, 4.0}) {
      double tail = static_cast<double>(divisor_tail_count(D, 4, 1000));
      REQUIRE(tail <= moment / std::pow(D, B) + 1e-9);
    }
  }
}

TEST_CASE("singular series partial sums", "[arith]") {
  auto r1 = singular_series_partial({3}, 8.0, 1);
  REQUIRE(r1.partial == Approx(1.0));

  auto r50 = singular_series_partial({3}, 8.0, 50);
  auto r100 = singular_series_partial({3}, 8.0, 100);
  auto r200 = singular_series_partial({3}, 8.0, 200);
  REQUIRE(r50.partial <= r100.partial);
  REQUIRE(r100.partial <= r200.partial);
  // Cauchy differences shrink
  REQUIRE(r200.partial - r100.partial <= r100.partial - r50.partial);

  // k = (1,3): per-q decay faster than q^{-1.01} at p = K + 3
  auto curve = singular_series_partial({1, 3}, 7.0, 60);
  REQUIRE(curve.fitted_decay > 1.01);
}

TEST_CASE("singular integral truncation", "[arith]") {
  Bump eta;
  // inner integral at xi = 0 equals the window mass
  double inner0 = std::abs(oscillatory_quadrature(
      [&](double x) { return eta(x) * cplx(1.0, 0.0); }, -2.0, 2.0, 0.0, 1e-12));
  REQUIRE(inner0 == Approx(3.0).margin(1e-9));

  // constant-phase limit: value ~ mass^p * (2R) for tiny R
  double p = 5.0;
  double tiny = singular_integral_truncated({3}, p, 1e-4);
  REQUIRE(tiny == Approx(std::pow(3.0, p) * 2e-4).epsilon(1e-3));

  double r5 = singular_integral_truncated({3}, p, 5.0);
  double r10 = singular_integral_truncated({3}, p, 10.0);
  double r20 = singular_integral_truncated({3}, p, 20.0);
  REQUIRE(r5 <= r10);
  REQUIRE(r10 <= r20);
  REQUIRE(r20 - r10 <= r10 - r5);  // Cauchy trend
}
