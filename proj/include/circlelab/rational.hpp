#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "circlelab/common.hpp"

namespace circlelab {

// Exact rational over int64 with overflow-checked arithmetic.  Exponent
// thresholds are small fractions, so int64 components are ample.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long n) : num_(n), den_(1) {}
  Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

  long long num() const { return num_; }
  long long den() const { return den_; }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                   i128(a.den_) * b.den_);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw InvalidRange("rational division by zero");
    return from128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a < b || a == b;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  double value() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

  static Rational max(const Rational& a, const Rational& b) {
    return a < b ? b : a;
  }

 private:
  using i128 = __int128;

  static Rational from128(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    const i128 lim = static_cast<i128>(1) << 62;
    if (n >= lim || -n >= lim || d >= lim)
      throw OverflowRisk("rational component exceeds 2^62");
    Rational r;
    r.num_ = static_cast<long long>(n);
    r.den_ = static_cast<long long>(d);
    return r;
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) { i128 t = a % b; a = b; b = t; }
    return a == 0 ? 1 : a;
  }

  void normalize() {
    if (den_ == 0) throw InvalidRange("rational with zero denominator");
    Rational r = from128(num_, den_);
    num_ = r.num_;
    den_ = r.den_;
  }

  long long num_, den_;
};

// 2^e as an exact rational (e may be negative).
inline Rational pow2_rational(int e) {
  if (e >= 0) return Rational(1LL << e);
  return Rational(1, 1LL << (-e));
}

}  // namespace circlelab
