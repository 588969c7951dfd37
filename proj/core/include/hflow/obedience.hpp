#pragma once

#include <functional>

#include "hflow/grid.hpp"
#include "hflow/moduli.hpp"

namespace hflow {

enum class ObedienceStatus { kObeys, kCritical, kViolated };

/// The maximizing configuration of theta(x) - theta(y) - omega(|x-y|):
/// the pair, its separation, the signed gap, and grid slopes at both points.
struct BreakthroughReport {
  double x = 0.0;
  double y = 0.0;
  double xi = 0.0;
  double gap = 0.0;
  double slope_x = 0.0;
  double slope_y = 0.0;
  ObedienceStatus status = ObedienceStatus::kObeys;
};

/// Exhaustive max of theta(x)-theta(y)-omega(d(x,y)) over grid pairs
/// (distances reduced to [0, L/2]), pruned by a block max/min pyramid so
/// large grids stay tractable, then polished by golden-section refinement
/// along the separation through the maximizing midpoint.
BreakthroughReport check_obedience_fn(const GridFunction& theta,
                                      const std::function<double(double)>& omega,
                                      double tolerance);

template <ModulusLike M>
BreakthroughReport check_obedience(const GridFunction& theta, const M& mod,
                                   double tolerance) {
  return check_obedience_fn(theta, [&](double d) { return mod.value(d); }, tolerance);
}

/// sup over grid pairs of |theta(x)-theta(y)| / d(x,y)^beta.
double holder_seminorm(const GridFunction& theta, double beta);

}  // namespace hflow
