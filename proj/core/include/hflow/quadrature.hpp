#pragma once

#include <functional>
#include <vector>

#include "hflow/grid.hpp"

namespace hflow {

/// Adaptive Gauss-Kronrod integration of f over [a, b] to an absolute
/// tolerance. Throws QuadratureNonconvergence when the refinement budget
/// is exhausted before the error estimate meets the tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 15);

/// Integrate over consecutive panels [edges[0], edges[1], ...]; the
/// tolerance is split across panels. Edges must be increasing.
double integrate_panels(const std::function<double(double)>& f,
                        const std::vector<double>& edges, double abs_tol);

/// Panel edges from a to b with the first panel [a, a + first] and
/// geometrically growing widths; used to resolve integrable endpoint
/// singularities at a.
std::vector<double> graded_edges(double a, double b, double first, double growth = 4.0);

/// Normalization making the fractional Laplacian PV integral match the
/// Fourier symbol |k|^{2 alpha}:  Gamma(1+2a) * sin(pi a) / pi.
double pv_constant(double alpha);

/// Periodization of the kernel |u|^{-1-2 alpha} over torus images:
///   W(y) = sum_{j>=0} (jL+y)^{-1-2a} + sum_{j>=1} (jL-y)^{-1-2a},
/// evaluated with an Euler-Maclaurin tail so the image sum is exact to
/// round-off. Valid for y in (0, L).
class PeriodizedPowerKernel {
 public:
  PeriodizedPowerKernel(double alpha, double period);
  double operator()(double y) const;
  double alpha() const { return alpha_; }

 private:
  double tail(double c) const;
  double alpha_;
  double period_;
  int direct_terms_ = 64;
};

/// Principal-value evaluation of the fractional Laplacian at one point,
/// summing the kernel over periodic images:
///   (-Delta)^a f(x) = c(a) * int_0^{L/2} (2f(x)-f(x+y)-f(x-y)) W(y) dy.
/// Converges to the spectral value as tol -> 0.
double pv_fractional_laplacian(const GridFunction& f, double alpha, double x,
                               double abs_tol = 1e-8);

}  // namespace hflow
