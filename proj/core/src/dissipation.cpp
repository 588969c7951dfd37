#include "hflow/dissipation.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

namespace hflow {
namespace detail {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

// Panel edges on (lo, hi) pinned at every eta where xi +- 2 eta or 2 eta - xi
// crosses a modulus branch point. Panels are graded toward both endpoints:
// moduli with power-law branches have unbounded slope where an argument of
// omega crosses zero, which can sit at either end of the range.
std::vector<double> pinned_edges(double lo, double hi, double xi,
                                 const std::vector<double>& breaks) {
  std::vector<double> e;
  const double width = hi - lo;
  const double first = std::max(width * 1e-9, lo * 1e-9 + 1e-300);
  const double mid = lo + 0.5 * width;
  for (double x : graded_edges(lo, mid, first))
    if (x < mid) e.push_back(x);
  for (double x : graded_edges(0.0, mid - lo, first))
    if (x > 0.0) e.push_back(hi - x);
  e.push_back(mid);
  e.push_back(hi);
  e.push_back(lo);
  for (double b : breaks) {
    for (double eta : {(b - xi) / 2.0, (xi - b) / 2.0, (xi + b) / 2.0}) {
      if (eta > lo && eta < hi) e.push_back(eta);
    }
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

// omega(xi+s) + omega(xi-s) - 2 omega(xi) as int_0^s [w'(xi+u) - w'(xi-u)] du,
// split at branch crossings. Direct evaluation cancels catastrophically when
// the true value is far below omega; the slope form never subtracts
// near-equal magnitudes larger than the result scale.
double slope_second_diff(const std::function<double(double)>& slope,
                         const std::vector<double>& breaks, double xi, double s) {
  std::vector<double> cuts{0.0, s};
  for (double b : breaks) {
    for (double u : {b - xi, xi - b}) {
      if (u > 0.0 && u < s) cuts.push_back(u);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += GK::integrate([&](double u) { return slope(xi + u) - slope(xi - u); },
                           cuts[i], cuts[i + 1], 0);
  }
  return total;
}

}  // namespace

double dissipation_alpha_impl(const std::function<double(double)>& omega,
                              const std::function<double(double)>& slope,
                              const std::vector<double>& omega_breaks,
                              double plateau_start, double alpha, double xi,
                              double c_scale, double abs_tol) {
  const double c = c_scale * pv_constant(alpha) * std::pow(2.0, -2.0 * alpha);
  const double w_xi = omega(xi);

  const auto near = [&](double eta) {
    return slope_second_diff(slope, omega_breaks, xi, 2.0 * eta) *
           std::pow(eta, -1.0 - 2.0 * alpha);
  };
  const double i1 =
      integrate_panels(near, pinned_edges(xi * 1e-9, 0.5 * xi, xi, omega_breaks),
                       abs_tol);

  double i2 = 0.0;
  const auto far = [&](double eta) {
    return (omega(xi + 2.0 * eta) - omega(2.0 * eta - xi) - 2.0 * w_xi) *
           std::pow(eta, -1.0 - 2.0 * alpha);
  };
  if (std::isfinite(plateau_start)) {
    // Both omega arguments sit on the plateau once 2 eta - xi passes it.
    const double eta_pl = 0.5 * (plateau_start + xi) * (1.0 + 1e-12);
    i2 = integrate_panels(far, pinned_edges(0.5 * xi, eta_pl, xi, omega_breaks), abs_tol);
    i2 += -2.0 * w_xi * std::pow(eta_pl, -2.0 * alpha) / (2.0 * alpha);
  } else {
    // No plateau: integrate a long range directly, then the remaining tail
    // through u = 1/eta (the integrand decays but never vanishes).
    const double eta_max = std::max(10.0 * xi, 100.0);
    i2 = integrate_panels(far, pinned_edges(0.5 * xi, eta_max, xi, omega_breaks), abs_tol);
    // Tail through eta = t^{-1/(2 alpha)}, which absorbs the kernel exactly
    // and leaves a bounded smooth integrand on (0, eta_max^{-2 alpha}).
    const double inv2a = 1.0 / (2.0 * alpha);
    const auto tail = [&](double t) {
      const double eta = std::pow(t, -inv2a);
      return (omega(xi + 2.0 * eta) - omega(2.0 * eta - xi) - 2.0 * w_xi) * inv2a;
    };
    i2 += integrate_adaptive(tail, 0.0, std::pow(eta_max, -2.0 * alpha), abs_tol);
  }
  return c * (i1 + i2);
}

double dissipation_log_impl(const std::function<double(double)>& omega,
                            const std::function<double(double)>& slope,
                            const std::vector<double>& omega_breaks, const Minorant& mn,
                            double xi, double a_scale, double abs_tol) {
  const double sigma = mn.cutoff.sigma;
  const double w_xi = omega(xi);

  auto breaks = omega_breaks;
  breaks.push_back(sigma);        // m(2 eta) support edge at eta = sigma
  breaks.push_back(0.5 * sigma);  // cutoff kink of m(2 eta)

  const auto near = [&](double eta) {
    return -slope_second_diff(slope, omega_breaks, xi, 2.0 * eta) * mn(2.0 * eta) / eta;
  };
  // m(2 eta) vanishes for eta >= sigma, so both integrals truncate there.
  const double hi1 = std::min(0.5 * xi, sigma);
  double total = integrate_panels(near, pinned_edges(xi * 1e-9, hi1, xi, breaks), abs_tol);

  if (0.5 * xi < sigma) {
    const auto far = [&](double eta) {
      return (2.0 * w_xi - omega(xi + 2.0 * eta) + omega(2.0 * eta - xi)) *
             mn(2.0 * eta) / eta;
    };
    total += integrate_panels(far, pinned_edges(0.5 * xi, sigma, xi, breaks), abs_tol);
  }
  return a_scale * total;
}

}  // namespace detail
}  // namespace hflow
