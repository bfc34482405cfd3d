#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "circlelab/common.hpp"

namespace circlelab {

// ---------------------------------------------------------------------------
// Adaptive Simpson with a hard recursion cap (depth 30 -> QuadratureFailure).

namespace detail {

template <class F, class T>
T simpson_step(F& f, double a, T fa, double b, T fb, double m, T fm, T whole,
               double tol, int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  T flm = f(lm), frm = f(rm);
  T left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  T right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  T delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth >= 30) throw QuadratureFailure("adaptive refinement exceeds depth 30");
  return simpson_step<F, T>(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth + 1) +
         simpson_step<F, T>(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth + 1);
}

}  // namespace detail

template <class F>
auto adaptive_simpson(F f, double a, double b, double tol) -> decltype(f(a)) {
  using T = decltype(f(a));
  double m = 0.5 * (a + b);
  T fa = f(a), fb = f(b), fm = f(m);
  T whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step<F, T>(f, a, fa, b, fb, m, fm, whole, tol, 0);
}

// ---------------------------------------------------------------------------
// Composite Gauss-Legendre panels for oscillatory integrands.  The caller
// supplies an estimate of the total phase variation (in cycles); panel count
// scales with it and is doubled until the value stabilizes.

namespace detail {

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirror).
inline constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
inline constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

template <class F>
auto gl_panels(F& f, double a, double b, std::size_t panels)
    -> decltype(f(a)) {
  using T = decltype(f(a));
  double h = (b - a) / static_cast<double>(panels);
  return pairwise_sum<T>(0, panels, [&](std::size_t p) {
    double c = a + (static_cast<double>(p) + 0.5) * h;
    double r = 0.5 * h;
    T acc{};
    for (int i = 0; i < 8; ++i) {
      acc += kGlWeights[i] * (f(c - r * kGlNodes[i]) + f(c + r * kGlNodes[i]));
    }
    return acc * r;
  });
}

}  // namespace detail

template <class F>
auto oscillatory_quadrature(F f, double a, double b, double cycles,
                            double tol = 1e-10) -> decltype(f(a)) {
  using T = decltype(f(a));
  std::size_t panels = 8 + static_cast<std::size_t>(std::ceil(3.0 * std::abs(cycles)));
  T prev = detail::gl_panels(f, a, b, panels);
  for (int it = 0; it < 30; ++it) {
    panels *= 2;
    if (panels > (1u << 24)) throw QuadratureFailure("oscillatory panel budget exhausted");
    T cur = detail::gl_panels(f, a, b, panels);
    if (std::abs(cur - prev) <= tol * (1.0 + std::abs(cur))) return cur;
    prev = cur;
  }
  throw QuadratureFailure("oscillatory quadrature did not stabilize");
}

// ---------------------------------------------------------------------------
// Moment integrals I_m(a) = int_0^1 u^m e^{i a u} du, m <= 5.  Upward
// recurrence for |a| >= 1, Taylor series otherwise (cancellation guard).
// Used for closed-form transforms of polynomial bump transitions.

inline std::array<cplx, 6> phase_moments(double a) {
  std::array<cplx, 6> I{};
  if (std::abs(a) < 1.0) {
    for (int m = 0; m <= 5; ++m) {
      cplx term(1.0 / (m + 1), 0.0), sum = term;
      cplx ia(0.0, a);
      for (int j = 1; j < 40; ++j) {
        term *= ia * (static_cast<double>(m + j) /
                      (static_cast<double>(j) * (m + j + 1)));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      I[m] = sum;
    }
    return I;
  }
  cplx ia(0.0, a);
  cplx eia = std::polar(1.0, a);
  I[0] = (eia - 1.0) / ia;
  for (int m = 1; m <= 5; ++m) I[m] = (eia - static_cast<double>(m) * I[m - 1]) / ia;
  return I;
}

}  // namespace circlelab
