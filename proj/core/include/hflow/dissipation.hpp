#pragma once

#include "hflow/moduli.hpp"
#include "hflow/quadrature.hpp"

namespace hflow {

/// Second-difference integrals of a modulus against the fractional kernel:
///   D(xi) = c * [ int_0^{xi/2} (w(xi+2e)+w(xi-2e)-2w(xi)) / e^{1+2a} de
///               + int_{xi/2}^inf (w(xi+2e)-w(2e-xi)-2w(xi)) / e^{1+2a} de ].
/// Nonpositive for concave moduli; identically zero for linear ones. The
/// tail past the plateau integrates in closed form. `c_scale` multiplies
/// the calibrated normalization pv_constant(alpha) * 2^{-2 alpha}.
template <ModulusLike M>
double dissipation_alpha(const M& mod, double alpha, double xi, double c_scale = 1.0,
                         double abs_tol = 1e-10);

/// The analogous functional for the log-supercritical kernel minorant:
///   D(xi) = A * [ int_0^{xi/2} (2w(xi)-w(xi+2e)-w(xi-2e)) m(2e)/e de
///               + int_{xi/2}^{sigma} (2w(xi)-w(xi+2e)+w(2e-xi)) m(2e)/e de ].
/// Nonnegative for concave moduli (opposite sign convention: it lower-bounds
/// the near-field operator difference at a touching pair).
template <ModulusLike M>
double dissipation_log(const M& mod, const Minorant& minorant, double xi,
                       double a_scale = 1.0, double abs_tol = 1e-10);

namespace detail {
double dissipation_alpha_impl(const std::function<double(double)>& omega,
                              const std::function<double(double)>& slope,
                              const std::vector<double>& omega_breaks,
                              double plateau_start, double alpha, double xi,
                              double c_scale, double abs_tol);
double dissipation_log_impl(const std::function<double(double)>& omega,
                            const std::function<double(double)>& slope,
                            const std::vector<double>& omega_breaks, const Minorant& mn,
                            double xi, double a_scale, double abs_tol);
}  // namespace detail

template <ModulusLike M>
double dissipation_alpha(const M& mod, double alpha, double xi, double c_scale,
                         double abs_tol) {
  return detail::dissipation_alpha_impl(
      [&](double s) { return mod.value(s); }, [&](double s) { return mod.slope(s); },
      mod.breakpoints(), mod.plateau_start(), alpha, xi, c_scale, abs_tol);
}

template <ModulusLike M>
double dissipation_log(const M& mod, const Minorant& minorant, double xi, double a_scale,
                       double abs_tol) {
  return detail::dissipation_log_impl(
      [&](double s) { return mod.value(s); }, [&](double s) { return mod.slope(s); },
      mod.breakpoints(), minorant, xi, a_scale, abs_tol);
}

}  // namespace hflow
