#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace hflow {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Uniform periodic grid x_j = j L / n on a torus of circumference L.
/// n must be a power of two, n >= 8. Wavenumbers are integer multiples
/// of 2*pi/L; with the default L = 2*pi they are plain integers.
struct PeriodicGrid {
  std::size_t n = 0;
  double length = kTwoPi;

  PeriodicGrid() = default;
  PeriodicGrid(std::size_t n_, double length_ = kTwoPi);

  double spacing() const { return length / static_cast<double>(n); }
  double point(std::size_t j) const { return spacing() * static_cast<double>(j); }
  /// Physical wavenumber of spectral index m in [0, n/2].
  double wavenumber(std::size_t m) const {
    return kTwoPi * static_cast<double>(m) / length;
  }
  std::size_t num_modes() const { return n / 2 + 1; }
  /// Distance on the ring, reduced to [0, L/2].
  double ring_distance(double a, double b) const;

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;
};

namespace detail {
class FftPlan;  // FFTW wrapper, one immutable plan pair per grid size
std::shared_ptr<const FftPlan> plan_for(std::size_t n);
}  // namespace detail

/// Real scalar field on a PeriodicGrid. Keeps point values and the
/// half-complex Fourier coefficients c_k (k = 0..n/2, conjugate symmetry
/// implied) lazily synchronized: whichever side was written last is
/// authoritative and the other side is materialized on demand.
///
/// Value type with single-writer semantics: concurrent reads of a fully
/// synchronized object are safe, concurrent mutation is not.
class GridFunction {
 public:
  GridFunction() = default;

  static GridFunction zeros(const PeriodicGrid& grid);
  static GridFunction from_values(const PeriodicGrid& grid, std::vector<double> values);
  static GridFunction from_spectrum(const PeriodicGrid& grid,
                                    std::vector<std::complex<double>> spectrum);
  /// Sample an analytic profile at the grid points.
  template <typename F>
  static GridFunction from_function(const PeriodicGrid& grid, F&& f) {
    std::vector<double> v(grid.n);
    for (std::size_t j = 0; j < grid.n; ++j) v[j] = f(grid.point(j));
    return from_values(grid, std::move(v));
  }

  const PeriodicGrid& grid() const { return grid_; }
  bool empty() const { return grid_.n == 0; }

  /// Point values theta(x_j); materializes from the spectrum if needed.
  const std::vector<double>& values() const;
  /// Normalized coefficients c_k = (1/n) sum_j theta_j e^{-2 pi i j k / n}.
  const std::vector<std::complex<double>>& spectrum() const;

  double mean() const { return spectrum()[0].real(); }
  double sup_norm() const;
  /// sqrt( L/n * sum theta_j^2 ), the grid L2 norm.
  double l2_norm() const;
  /// Spectral-side energy, equals l2_norm()^2 by Parseval.
  double spectral_energy() const;

  /// Band-limited evaluation at an arbitrary point. Exact (full Fourier
  /// summation) for small grids; for large grids uses a lazily built
  /// oversampled table with local polynomial interpolation.
  double sample(double x) const;

  /// Largest spectral index with non-negligible coefficient (0 if none).
  std::size_t max_active_mode(double rel_tol = 1e-14) const;

 private:
  enum class State { kEmpty, kValues, kSpectrum, kBoth };

  void ensure_values() const;
  void ensure_spectrum() const;
  void ensure_sample_table() const;

  PeriodicGrid grid_;
  std::shared_ptr<const detail::FftPlan> plan_;
  mutable State state_ = State::kEmpty;
  mutable std::vector<double> values_;
  mutable std::vector<std::complex<double>> spectrum_;
  // Oversampled values for fast off-grid interpolation on large grids.
  mutable std::shared_ptr<const std::vector<double>> sample_table_;
};

/// Exact trigonometric evaluation of the field at x (O(n) per call).
double fourier_eval(const GridFunction& f, double x);

/// 2 f(x) - f(x+y) - f(x-y), evaluated without cancellation: each Fourier
/// mode contributes 4 Re(c_k e^{ikx}) sin^2(k y / 2), which stays accurate
/// even when the difference is many orders below the field magnitude.
/// Falls back to direct sampling on grids too large for the exact sum.
double second_difference(const GridFunction& f, double x, double y);

}  // namespace hflow
