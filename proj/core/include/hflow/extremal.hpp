#pragma once

#include <functional>
#include <vector>

#include "hflow/grid.hpp"
#include "hflow/moduli.hpp"
#include "hflow/obedience.hpp"

namespace hflow {

/// Type-erased view of a modulus, so verification code can mix families.
struct ModulusRef {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  std::vector<double> breakpoints;
  double plateau_start = 0.0;
  double plateau_value = 0.0;

  template <ModulusLike M>
  static ModulusRef of(const M& m) {
    ModulusRef r;
    r.value = [&m](double xi) { return m.value(xi); };
    r.slope = [&m](double xi) { return m.slope(xi); };
    r.breakpoints = m.breakpoints();
    r.plateau_start = m.plateau_start();
    r.plateau_value = m.value(m.plateau_start());
    return r;
  }
};

/// A field touching its modulus at one separation: theta obeys omega
/// everywhere, and theta(x) - theta(y) = omega(|x-y|) - slack with
/// slack <= 1e-3 * omega(|x-y|).
struct ExtremalPair {
  GridFunction theta;
  double x = 0.0;
  double y = 0.0;
  double xi = 0.0;
  double slack = 0.0;
  double slope_x = 0.0;
  double slope_y = 0.0;
};

struct ExtremalOptions {
  double center = M_PI;       // midpoint of the pair
  std::size_t min_n = 4096;   // smallest grid
  std::size_t max_n = 1 << 21;
  double pinch_floor = 1e-4;  // relative slack kept at the touching scale
  double pinch_away = 1e-2;   // relative slack away from it
  double mollify_factor = 32.0;  // Gaussian width aimed at xi / this
  double slack_budget = 1e-3;    // accepted slack relative to omega(xi)
  // Relative amplitude of an even-symmetry bump near the lower point; it
  // breaks the odd symmetry that would otherwise null the Hilbert
  // difference across the pair. Zero keeps the pair symmetric.
  double asymmetry = 0.0;
  int max_retries = 16;
  std::size_t n_multiplier = 1;  // grid-doubling studies
};

/// Build a mollified odd-symmetric profile around the midpoint whose
/// increments are pinched against omega at separation xi and strictly below
/// elsewhere. Obedience is certified by the scanner; on a violation the
/// amplitude shrinks and the construction retries. Throws ConstructionFailed
/// when the modulus is degenerate or retries run out.
ExtremalPair make_extremal_pair(const ModulusRef& mod, double xi,
                                const ExtremalOptions& opts = {});

template <ModulusLike M>
ExtremalPair make_extremal_pair(const M& mod, double xi, const ExtremalOptions& opts = {}) {
  return make_extremal_pair(ModulusRef::of(mod), xi, opts);
}

}  // namespace hflow
