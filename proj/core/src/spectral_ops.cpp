#include "hflow/spectral_ops.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace hflow {

namespace {
using cd = std::complex<double>;
}

GridFunction hilbert_transform(const GridFunction& f) {
  auto c = f.spectrum();
  const std::size_t half = f.grid().n / 2;
  c[0] = 0.0;
  for (std::size_t m = 1; m < half; ++m) c[m] *= cd(0.0, -1.0);
  c[half] = 0.0;
  return GridFunction::from_spectrum(f.grid(), std::move(c));
}

GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m) {
  auto c = f.spectrum();
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= m.symbol(f.grid().wavenumber(j));
  return GridFunction::from_spectrum(f.grid(), std::move(c));
}

GridFunction derivative(const GridFunction& f) {
  auto c = f.spectrum();
  const std::size_t half = f.grid().n / 2;
  for (std::size_t m = 0; m < half; ++m) c[m] *= cd(0.0, f.grid().wavenumber(m));
  c[half] = 0.0;
  return GridFunction::from_spectrum(f.grid(), std::move(c));
}

GridFunction dealias(const GridFunction& f) {
  auto c = f.spectrum();
  const std::size_t cut = f.grid().n / 3;
  for (std::size_t m = cut + 1; m < c.size(); ++m) c[m] = 0.0;
  return GridFunction::from_spectrum(f.grid(), std::move(c));
}

GridFunction add(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("add: grid mismatch");
  auto v = a.values();
  const auto& w = b.values();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] += w[j];
  return GridFunction::from_values(a.grid(), std::move(v));
}

GridFunction scale(const GridFunction& f, double s) {
  auto c = f.spectrum();
  for (auto& z : c) z *= s;
  return GridFunction::from_spectrum(f.grid(), std::move(c));
}

GridFunction multiply(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("multiply: grid mismatch");
  auto v = a.values();
  const auto& w = b.values();
  for (std::size_t j = 0; j < v.size(); ++j) v[j] *= w[j];
  return GridFunction::from_values(a.grid(), std::move(v));
}

double grad_sup_norm(const GridFunction& f) { return derivative(f).sup_norm(); }

double spectrum_tail_fraction(const GridFunction& f) {
  const auto& c = f.spectrum();
  const std::size_t cut = f.grid().n / 3;
  const std::size_t lo = 2 * f.grid().n / 9;
  const std::size_t half = f.grid().n / 2;
  double total = 0.0, tail = 0.0;
  for (std::size_t m = 1; m <= half; ++m) {
    const double e = (m < half ? 2.0 : 1.0) * std::norm(c[m]);
    total += e;
    if (m > lo && m <= cut) tail += e;
  }
  if (total <= 0.0) return 0.0;
  return tail / total;
}

}  // namespace hflow
