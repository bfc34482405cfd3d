#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <vector>

#include "circlelab/expsum.hpp"
#include "circlelab/rng.hpp"

using namespace circlelab;
using Catch::Approx;

namespace {

CoefficientSequence random_complex(const SurfaceSystem& sys, long long N,
                                   std::uint64_t seed) {
  CounterRng rng(seed);
  return CoefficientSequence::random_unit(sys, N, rng);
}

}  // namespace

TEST_CASE("extension operator at alpha = 0 sums the coefficients", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = CoefficientSequence::all_ones(sys, 7);
  std::vector<double> alpha = {0.0};
  REQUIRE(eval_extension(a, sys, alpha).real() == Approx(7.0).margin(1e-12));
  REQUIRE(eval_extension(a, sys, alpha).imag() == Approx(0.0).margin(1e-12));
}

TEST_CASE("extension operator two-term hand sum", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = CoefficientSequence::all_ones(sys, 2);
  std::vector<double> alpha = {0.5};
  // e(1/2) + e(8/2) = -1 + 1 = 0
  REQUIRE(std::abs(eval_extension(a, sys, alpha)) == Approx(0.0).margin(1e-12));
}

TEST_CASE("extension operator conjugation symmetry", "[expsum]") {
  auto sys = SurfaceSystem::k_paraboloid(1, 3);
  auto a = random_complex(sys, 5, 17);
  CoefficientSequence ac = a;
  for (auto& v : ac.values) v = std::conj(v);
  std::vector<double> alpha = {0.31, 0.77};
  std::vector<double> neg = {-0.31, -0.77};
  cplx lhs = std::conj(eval_extension(a, sys, alpha));
  cplx rhs = eval_extension(ac, sys, neg);
  REQUIRE(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("extension respects Cauchy-Schwarz sup bound", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = random_complex(sys, 16, 3);
  CounterRng rng(5);
  for (int i = 0; i < 20; ++i) {
    std::vector<double> alpha = {rng.next_unit()};
    double bound = a.l2_norm * std::sqrt(16.0);
    REQUIRE(std::abs(eval_extension(a, sys, alpha)) <= bound * (1 + 1e-12));
  }
}

TEST_CASE("weyl sum plateau mass and conjugation", "[expsum]") {
  WeightProfile w(16.0);
  cplx t0 = eval_weyl(w, 3, 0.0, 0.0);
  REQUIRE(t0.real() > 2 * 16.0);
  REQUIRE(t0.imag() == Approx(0.0).margin(1e-12));
  cplx t = eval_weyl(w, 3, 0.123, 0.456);
  cplx tr = eval_weyl(w, 3, -0.123, -0.456);
  REQUIRE(std::abs(std::conj(t) - tr) < 1e-12);
}

TEST_CASE("weyl sum real at alpha = 1/2, theta = 0 for k = 3", "[expsum]") {
  WeightProfile w(64.0);
  cplx t = eval_weyl(w, 3, 0.5, 0.0);
  // direct two-sided oracle
  cplx direct{};
  for (long long n = -128; n <= 128; ++n)
    direct += w(static_cast<double>(n)) *
              e_of(0.5 * static_cast<double>(n) * n * n);
  REQUIRE(std::abs(t - direct) < 1e-9);
  REQUIRE(std::abs(t.imag()) < 1e-9);
}

TEST_CASE("kernel splits into a product of weyl sums", "[expsum]") {
  auto sys = SurfaceSystem::k_paraboloid(2, 3);
  WeightProfile w(8.0);
  double alpha = 0.2183, theta = 0.7431;
  cplx f = eval_kernel(w, sys, alpha, std::vector<double>{theta, theta});
  cplx t = eval_weyl(w, 3, alpha, theta);
  REQUIRE(std::abs(f - t * t) < 1e-10 * std::abs(f));

  // F(0, 0) = (sum omega)^d
  cplx f0 = eval_kernel(w, sys, 0.0, std::vector<double>{0.0, 0.0});
  double mass = w.lattice_mass();
  REQUIRE(f0.real() == Approx(mass * mass).epsilon(1e-12));

  // product form vs direct double sum at random phases
  CounterRng rng(11);
  for (int it = 0; it < 3; ++it) {
    double al = rng.next_unit();
    std::vector<double> th = {rng.next_unit(), rng.next_unit()};
    cplx prod = eval_kernel(w, sys, al, th);
    cplx direct{};
    for (long long n1 = -16; n1 <= 16; ++n1)
      for (long long n2 = -16; n2 <= 16; ++n2) {
        double wn = w(static_cast<double>(n1)) * w(static_cast<double>(n2));
        if (wn == 0.0) continue;
        long double cyc = static_cast<long double>(n1 * n1 * n1 + n2 * n2 * n2) * al +
                          n1 * th[0] + n2 * th[1];
        direct += wn * unit_phase(cyc);
      }
    REQUIRE(std::abs(prod - direct) <= 1e-12 * std::max(1.0, std::abs(direct)));
  }

  REQUIRE_THROWS_AS(eval_kernel(w, SurfaceSystem::kth_powers(3), 0.1,
                                std::vector<double>{0.0}),
                    UnsupportedFamily);
}

TEST_CASE("grid sample on a single point grid", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = random_complex(sys, 4, 23);
  TorusGrid g;
  g.dims = {1};
  g.offsets = {0.37};
  FourierTable t = grid_sample(a, sys, g);
  REQUIRE(t.values.size() == 1);
  cplx direct = eval_extension(a, sys, std::vector<double>{0.37});
  REQUIRE(std::abs(t.values[0] - direct) < 1e-12);
}

TEST_CASE("grid sample agrees with direct evaluation", "[expsum]") {
  struct Case {
    SurfaceSystem sys;
    long long N;
  };
  std::vector<Case> cases = {{SurfaceSystem::kth_powers(3), 16},
                             {SurfaceSystem::k_paraboloid(1, 3), 8},
                             {SurfaceSystem::k_paraboloid(2, 3), 3},
                             {SurfaceSystem::monomial_curve({1, 3}), 8}};
  for (const auto& cs : cases) {
    auto a = random_complex(cs.sys, cs.N, 29 + cs.N);
    TorusGrid g = nyquist_grid(cs.sys, cs.N, 1);
    FourierTable t = grid_sample(a, cs.sys, g);
    double l1 = a.l1_norm();
    CounterRng rng(101);
    std::vector<double> alpha(cs.sys.r);
    for (int probe = 0; probe < 24; ++probe) {
      std::size_t idx = rng.next_below(t.values.size());
      t.grid.point(idx, alpha);
      cplx direct = eval_extension(a, cs.sys, alpha);
      REQUIRE(std::abs(t.values[idx] - direct) <= 1e-9 * l1);
    }
    REQUIRE(t.max_abs() <= l1 * (1 + 1e-9));
  }
}

TEST_CASE("grid sample with power-of-two grid and offsets", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = CoefficientSequence::all_ones(sys, 16);
  TorusGrid g;
  g.dims = {65536};
  g.offsets = {0.001};
  FourierTable t = grid_sample(a, sys, g);
  CounterRng rng(7);
  std::vector<double> alpha(1);
  for (int probe = 0; probe < 64; ++probe) {
    std::size_t idx = rng.next_below(t.values.size());
    t.grid.point(idx, alpha);
    cplx direct = eval_extension(a, sys, alpha);
    REQUIRE(std::abs(t.values[idx] - direct) <= 1e-9 * a.l1_norm());
  }
}

TEST_CASE("grid sample satisfies DFT Parseval", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = random_complex(sys, 8, 31);
  TorusGrid g = TorusGrid::uniform({4096});
  FourierTable t = grid_sample(a, sys, g);
  // fold independently
  std::vector<cplx> b(4096, cplx{});
  a.for_each([&](std::span<const long long> n, cplx v) {
    if (v == cplx{}) return;
    long long m = ((n[0] * n[0] * n[0]) % 4096 + 4096) % 4096;
    b[static_cast<std::size_t>(m)] += v;
  });
  double lhs = 0.0, rhs = 0.0;
  for (const cplx& v : t.values) lhs += std::norm(v);
  lhs /= static_cast<double>(t.values.size());
  for (const cplx& v : b) rhs += std::norm(v);
  REQUIRE(lhs == Approx(rhs).epsilon(1e-9));
}

TEST_CASE("grid sampling is bit-reproducible", "[expsum]") {
  auto sys = SurfaceSystem::k_paraboloid(1, 3);
  auto a = random_complex(sys, 6, 37);
  TorusGrid g = nyquist_grid(sys, 6, 1);
  FourierTable t1 = grid_sample(a, sys, g);
  FourierTable t2 = grid_sample(a, sys, g);
  REQUIRE(t1.values.size() == t2.values.size());
  for (std::size_t i = 0; i < t1.values.size(); ++i) {
    REQUIRE(t1.values[i].real() == t2.values[i].real());
    REQUIRE(t1.values[i].imag() == t2.values[i].imag());
  }
}

TEST_CASE("nyquist grids and budget", "[expsum]") {
  auto powers = SurfaceSystem::kth_powers(3);
  TorusGrid g = nyquist_grid(powers, 4, 2);
  REQUIRE(g.dims == std::vector<std::size_t>{257});
  TorusGrid g1 = nyquist_grid(powers, 4, 1);
  REQUIRE(g1.dims == std::vector<std::size_t>{129});

  // theta coordinates come first, the degree-k coordinate is last
  auto parab = SurfaceSystem::k_paraboloid(1, 3);
  TorusGrid gp = nyquist_grid(parab, 4, 1);
  REQUIRE(gp.dims == std::vector<std::size_t>({9, 129}));

  REQUIRE_THROWS_AS(nyquist_grid(powers, 4, 2, 100), BudgetExceeded);
  auto a = CoefficientSequence::all_ones(powers, 4);
  REQUIRE_THROWS_AS(grid_sample(a, powers, g, 100), BudgetExceeded);
}

TEST_CASE("table binary round-trip and CSV export", "[expsum]") {
  auto sys = SurfaceSystem::kth_powers(3);
  auto a = random_complex(sys, 5, 41);
  TorusGrid g = TorusGrid::uniform({64});
  g.offsets = {0.25};
  FourierTable t = grid_sample(a, sys, g);
  t.prov.params = "{\"k\":3,\"N\":5}";
  auto dir = std::filesystem::temp_directory_path();
  auto bin = dir / "circlelab_test_table.clft";
  save_table(t, bin);
  FourierTable u = load_table(bin);
  REQUIRE(u.grid.dims == t.grid.dims);
  REQUIRE(u.grid.offsets == t.grid.offsets);
  REQUIRE(u.prov.kind == "F_a");
  REQUIRE(u.prov.params == t.prov.params);
  REQUIRE(u.prov.l2_norm == t.prov.l2_norm);
  for (std::size_t i = 0; i < t.values.size(); ++i)
    REQUIRE(u.values[i] == t.values[i]);
  auto csv = dir / "circlelab_test_table.csv";
  export_abs_csv(t, csv);
  REQUIRE(std::filesystem::file_size(csv) > 0);
  std::filesystem::remove(bin);
  std::filesystem::remove(csv);
}
