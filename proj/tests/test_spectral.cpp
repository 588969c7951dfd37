#include <cmath>

#include "doctest.h"
#include "hflow/grid.hpp"
#include "hflow/multiplier.hpp"
#include "hflow/spectral_ops.hpp"
#include "test_support.hpp"

using namespace hflow;
using hflow::testing::max_abs_diff;
using hflow::testing::random_band_limited;

namespace {
const PeriodicGrid g256(256);

GridFunction harmonic(const PeriodicGrid& g, double a_cos, double a_sin, int k) {
  return GridFunction::from_function(
      g, [&](double x) { return a_cos * std::cos(k * x) + a_sin * std::sin(k * x); });
}
}  // namespace

TEST_CASE("grid invariants") {
  CHECK_THROWS(PeriodicGrid(100));  // not a power of two
  CHECK_THROWS(PeriodicGrid(4));    // too small
  const PeriodicGrid g(64);
  CHECK(g.spacing() == doctest::Approx(kTwoPi / 64));
  CHECK(g.wavenumber(3) == doctest::Approx(3.0));
  CHECK(g.ring_distance(0.1, kTwoPi - 0.1) == doctest::Approx(0.2));
}

TEST_CASE("values and spectrum round trip") {
  auto f = random_band_limited(g256, 7);
  auto c = f.spectrum();
  auto f2 = GridFunction::from_spectrum(g256, c);
  CHECK(max_abs_diff(f, f2) < 1e-14);
}

TEST_CASE("hilbert transform on harmonics") {
  // constant -> 0
  auto c0 = GridFunction::from_function(g256, [](double) { return 2.5; });
  CHECK(hilbert_transform(c0).sup_norm() < 1e-14);
  // sin(x) -> -cos(x)
  auto f = harmonic(g256, 0.0, 1.0, 1);
  auto expect = harmonic(g256, -1.0, 0.0, 1);
  CHECK(max_abs_diff(hilbert_transform(f), expect) < 1e-13);
  // cos(3x) -> sin(3x)
  auto f3 = harmonic(g256, 1.0, 0.0, 3);
  auto expect3 = harmonic(g256, 0.0, 1.0, 3);
  CHECK(max_abs_diff(hilbert_transform(f3), expect3) < 1e-13);
}

TEST_CASE("hilbert anti-involution on mean-free fields") {
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    auto f = random_band_limited(g256, seed, 40);
    auto hh = hilbert_transform(hilbert_transform(f));
    auto neg = scale(f, -1.0);
    CHECK(max_abs_diff(hh, neg) < 1e-13);
  }
  // With a mean: H(H(f)) = -(f - mean f).
  auto f = add(random_band_limited(g256, 9, 12),
               GridFunction::from_function(g256, [](double) { return 0.7; }));
  auto hh = hilbert_transform(hilbert_transform(f));
  auto want = GridFunction::from_function(g256, [&](double x) { return -(f.sample(x) - 0.7); });
  CHECK(max_abs_diff(hh, want) < 1e-12);
}

TEST_CASE("multiplier symbols") {
  auto frac = Multiplier::fractional(0.25);
  CHECK(frac.symbol(0.0) == 0.0);
  CHECK(frac.symbol(4.0) == doctest::Approx(2.0));
  CHECK(frac.symbol(-4.0) == doctest::Approx(2.0));
  auto lap = Multiplier::laplacian(0.1);
  CHECK(lap.symbol(3.0) == doctest::Approx(0.9));
  auto logm = Multiplier::log_supercritical();
  CHECK(logm.symbol(0.0) == 0.0);
  CHECK(logm.symbol(1.0) == doctest::Approx(1.0 / std::log(2.0)));
  auto comp = Multiplier::composite({frac, lap});
  CHECK(comp.symbol(2.0) == doctest::Approx(frac.symbol(2.0) + lap.symbol(2.0)));
}

TEST_CASE("apply_multiplier eigenfunctions") {
  auto f = harmonic(g256, 1.0, 0.0, 5);  // cos(5x)
  auto out = apply_multiplier(f, Multiplier::fractional(0.25));
  auto expect = scale(f, std::sqrt(5.0));
  CHECK(max_abs_diff(out, expect) < 1e-12);

  auto c0 = GridFunction::from_function(g256, [](double) { return -3.0; });
  CHECK(apply_multiplier(c0, Multiplier::log_supercritical()).sup_norm() < 1e-14);

  auto s1 = harmonic(g256, 0.0, 1.0, 1);
  auto ls = apply_multiplier(s1, Multiplier::log_supercritical());
  auto expect_l = scale(s1, 1.0 / std::log(2.0));
  CHECK(max_abs_diff(ls, expect_l) < 1e-12);
  CHECK(1.0 / std::log(2.0) == doctest::Approx(1.442695040888963));
}

TEST_CASE("multiplier output is mean-free") {
  for (auto m : {Multiplier::fractional(0.3), Multiplier::laplacian(0.2),
                 Multiplier::log_supercritical()}) {
    auto f = add(random_band_limited(g256, 21, 30),
                 GridFunction::from_function(g256, [](double) { return 1.3; }));
    CHECK(std::fabs(apply_multiplier(f, m).mean()) < 1e-13);
  }
}

TEST_CASE("derivative") {
  auto f = harmonic(g256, 0.0, 1.0, 1);
  CHECK(max_abs_diff(derivative(f), harmonic(g256, 1.0, 0.0, 1)) < 1e-13);
  auto c0 = GridFunction::from_function(g256, [](double) { return 4.0; });
  CHECK(derivative(c0).sup_norm() < 1e-14);
  auto f5 = harmonic(g256, 0.0, 1.0, 5);
  CHECK(max_abs_diff(derivative(f5), harmonic(g256, 5.0, 0.0, 5)) < 1e-12);
}

TEST_CASE("dealias") {
  auto f = random_band_limited(g256, 3, 256 / 3);
  CHECK(max_abs_diff(dealias(f), f) < 1e-15);  // band-limited: unchanged
  // A lone Nyquist mode is removed.
  std::vector<std::complex<double>> c(g256.num_modes(), 0.0);
  c[128] = 1.0;
  auto ny = GridFunction::from_spectrum(g256, std::move(c));
  CHECK(dealias(ny).sup_norm() < 1e-15);
  // Projection: idempotent.
  auto wide = random_band_limited(g256, 11, 120);
  CHECK(max_abs_diff(dealias(dealias(wide)), dealias(wide)) < 1e-15);
}

TEST_CASE("parseval after operations") {
  auto f = random_band_limited(g256, 17, 60);
  for (const auto& gf : {f, hilbert_transform(f), derivative(f),
                         apply_multiplier(f, Multiplier::fractional(0.2)), dealias(f)}) {
    const double ev = gf.l2_norm() * gf.l2_norm();
    CHECK(gf.spectral_energy() == doctest::Approx(ev).epsilon(1e-12));
  }
}

TEST_CASE("eventual dominance of the log symbol") {
  auto logm = Multiplier::log_supercritical();
  const long limit = 1L << 40;
  for (double alpha : {0.2, 0.3, 0.4}) {
    const long k0 = dominance_crossover(logm, alpha, limit);
    REQUIRE(k0 > 0);
    for (long k = k0; k < k0 + 1000; ++k) {
      const double kk = static_cast<double>(k);
      CHECK(logm.symbol(kk) >= std::pow(kk, 2.0 * alpha));
    }
    if (k0 > 1) {
      const double kk = static_cast<double>(k0 - 1);
      CHECK(logm.symbol(kk) < std::pow(kk, 2.0 * alpha));
    }
  }
}

TEST_CASE("off-grid sampling matches analytic field") {
  auto f = GridFunction::from_function(
      g256, [](double x) { return std::sin(x) + 0.3 * std::cos(7 * x); });
  for (double x : {0.123, 1.9, 3.7, 6.1}) {
    CHECK(f.sample(x) ==
          doctest::Approx(std::sin(x) + 0.3 * std::cos(7 * x)).epsilon(1e-12));
  }
  // Large grid goes through the interpolation path.
  const PeriodicGrid big(1 << 15);
  auto fb = GridFunction::from_function(
      big, [](double x) { return std::sin(3 * x) - 0.2 * std::cos(40 * x); });
  for (double x : {0.3123, 2.71, 5.55}) {
    CHECK(fb.sample(x) ==
          doctest::Approx(std::sin(3 * x) - 0.2 * std::cos(40 * x)).epsilon(1e-9));
  }
}
