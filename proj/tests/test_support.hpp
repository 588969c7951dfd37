#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hflow/grid.hpp"

namespace hflow::testing {

/// Random real field with modes 1..k_max, decaying amplitudes, zero mean.
inline GridFunction random_band_limited(const PeriodicGrid& grid, std::uint64_t seed,
                                        std::size_t k_max = 8, double amplitude = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::complex<double>> c(grid.num_modes(), 0.0);
  for (std::size_t k = 1; k <= k_max && k < grid.n / 2; ++k) {
    const double decay = 1.0 / (1.0 + static_cast<double>(k * k));
    c[k] = std::complex<double>(unif(rng), unif(rng)) * (0.5 * amplitude * decay);
  }
  return GridFunction::from_spectrum(grid, std::move(c));
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  const auto& va = a.values();
  const auto& vb = b.values();
  double m = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::fabs(va[i] - vb[i]));
  return m;
}

}  // namespace hflow::testing
