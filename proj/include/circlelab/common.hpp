#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace circlelab {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Errors. Operations throw a specific subclass; the CLI maps classes to
// exit codes (validation -> 2, budget -> 3, tolerance -> 1).

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CIRCLELAB_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

CIRCLELAB_DEFINE_ERROR(DimensionMismatch);
CIRCLELAB_DEFINE_ERROR(OverflowRisk);
CIRCLELAB_DEFINE_ERROR(UnsupportedFamily);
CIRCLELAB_DEFINE_ERROR(BudgetExceeded);
CIRCLELAB_DEFINE_ERROR(InvalidRange);
CIRCLELAB_DEFINE_ERROR(LevelOutOfRange);
CIRCLELAB_DEFINE_ERROR(RangeExceeded);
CIRCLELAB_DEFINE_ERROR(RangeViolation);
CIRCLELAB_DEFINE_ERROR(QuadratureFailure);
CIRCLELAB_DEFINE_ERROR(GridMismatch);
CIRCLELAB_DEFINE_ERROR(MissingPieces);
CIRCLELAB_DEFINE_ERROR(NotMajorArc);
CIRCLELAB_DEFINE_ERROR(IoError);

#undef CIRCLELAB_DEFINE_ERROR

// ---------------------------------------------------------------------------
// e(x) = exp(2*pi*i*x).  Phases are reduced mod 1 in extended precision before
// the trig call so that large integer multiples stay accurate.

inline cplx unit_phase(long double cycles) {
  long double r = cycles - std::floor(cycles);
  double ang = static_cast<double>(r * static_cast<long double>(kTwoPi));
  return {std::cos(ang), std::sin(ang)};
}

inline cplx e_of(double x) { return unit_phase(static_cast<long double>(x)); }

// e(n/q) for integers, exact reduction.
inline cplx e_q(long long n, long long q) {
  long long r = n % q;
  if (r < 0) r += q;
  return unit_phase(static_cast<long double>(r) / static_cast<long double>(q));
}

// Distance to the nearest integer.
inline double torus_norm(double x) {
  double f = x - std::floor(x);
  return std::min(f, 1.0 - f);
}

// ---------------------------------------------------------------------------
// Deterministic pairwise (tree) reduction, fixed chunk size 1024.

inline constexpr std::size_t kPairwiseChunk = 1024;

template <class T, class F>
T pairwise_sum(std::size_t begin, std::size_t end, F&& term) {
  std::size_t n = end - begin;
  if (n <= kPairwiseChunk) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  std::size_t mid = begin + n / 2;
  return pairwise_sum<T>(begin, mid, term) + pairwise_sum<T>(mid, end, term);
}

template <class T>
T pairwise_sum_range(const T* data, std::size_t n) {
  return pairwise_sum<T>(0, n, [data](std::size_t i) { return data[i]; });
}

// ---------------------------------------------------------------------------
// Worker pool controls.  Work is split into fixed-size blocks independent of
// the thread count, so results are bitwise reproducible.

inline int& thread_count() {
  static int n = static_cast<int>(std::thread::hardware_concurrency());
  return n;
}

inline void set_thread_count(int n) { thread_count() = n > 0 ? n : 1; }

// Runs fn(block_index) for blocks [0, nblocks); each block must write only
// its own outputs.
template <class F>
void parallel_blocks(std::size_t nblocks, F&& fn) {
  int nthreads = std::max(1, thread_count());
  if (nthreads == 1 || nblocks <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= nblocks) return;
      fn(b);
    }
  };
  std::vector<std::thread> pool;
  int spawn = static_cast<int>(std::min<std::size_t>(nthreads, nblocks));
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Grid budget: number of sample points a single table may hold.

inline std::size_t default_grid_budget() {
  static std::size_t budget = [] {
    if (const char* env = std::getenv("CIRCLE_LAB_BUDGET")) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(1) << 27;
  }();
  return budget;
}

inline std::size_t& op_budget() {
  static std::size_t budget = 1000000000ULL;  // elementary-operation cap
  return budget;
}

// Checked integer power; throws when |base^exp| would exceed 2^62.
inline long long checked_pow(long long base, int exp) {
  __int128 acc = 1;
  const __int128 limit = static_cast<__int128>(1) << 62;
  for (int i = 0; i < exp; ++i) {
    acc *= base;
    if (acc >= limit || -acc >= limit)
      throw OverflowRisk("integer power exceeds 2^62");
  }
  return static_cast<long long>(acc);
}

}  // namespace circlelab
