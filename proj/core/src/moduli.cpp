#include "hflow/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hflow/errors.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/spectral_ops.hpp"

namespace hflow {

HolderModulus::HolderModulus(double h_amp, double delta, double beta, double xi0)
    : h_amp_(h_amp), delta_(delta), beta_(beta), xi0_(xi0) {
  if (!(h_amp > 0.0)) throw std::invalid_argument("HolderModulus: h_amp must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("HolderModulus: delta must be positive");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("HolderModulus: beta must lie in (0,1)");
  if (!(xi0 >= 0.0 && xi0 <= delta))
    throw std::invalid_argument("HolderModulus: xi0 must lie in [0, delta]");
}

double HolderModulus::value(double xi) const {
  if (xi <= 0.0) return xi0_ > 0.0 ? (1.0 - beta_) * h_amp_ * std::pow(xi0_ / delta_, beta_) : 0.0;
  if (xi < xi0_) {
    const double a = h_amp_ * std::pow(delta_, -beta_);
    return beta_ * a * std::pow(xi0_, beta_ - 1.0) * xi + (1.0 - beta_) * a * std::pow(xi0_, beta_);
  }
  if (xi <= delta_) return h_amp_ * std::pow(xi / delta_, beta_);
  return h_amp_;
}

double HolderModulus::slope(double xi) const {
  if (xi < xi0_) return beta_ * h_amp_ * std::pow(delta_, -beta_) * std::pow(xi0_, beta_ - 1.0);
  if (xi <= delta_) return beta_ * h_amp_ * std::pow(xi / delta_, beta_) / xi;
  return 0.0;
}

double HolderModulus::inner_scale_sensitivity(double xi) const {
  if (!(xi0_ > 0.0) || xi >= xi0_) return 0.0;
  return beta_ * (1.0 - beta_) * h_amp_ * std::pow(delta_, -beta_) *
         std::pow(xi0_, beta_ - 2.0) * (xi0_ - xi);
}

std::vector<double> HolderModulus::breakpoints() const {
  std::vector<double> b;
  if (xi0_ > 0.0) b.push_back(xi0_);
  b.push_back(delta_);
  return b;
}

double inner_scale_zero_time(double delta, double alpha, double c2) {
  return std::pow(delta, 2.0 * alpha) / (2.0 * alpha * c2);
}

double inner_scale_at(double delta, double alpha, double c2, double t) {
  if (!(alpha > 0.0 && alpha < 0.5) || !(c2 > 0.0))
    throw std::invalid_argument("inner_scale_at: need 0 < alpha < 1/2 and c2 > 0");
  const double arg = std::pow(delta, 2.0 * alpha) - 2.0 * alpha * c2 * t;
  if (arg <= 0.0) return 0.0;
  return std::pow(arg, 1.0 / (2.0 * alpha));
}

namespace {

// Fritsch-Carlson monotone tangents for piecewise-cubic interpolation.
std::vector<double> pchip_tangents(const std::vector<double>& x,
                                   const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  std::vector<double> s(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) s[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
  d[0] = s[0];
  d[n - 1] = s[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (s[i - 1] * s[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double w0 = 2.0 * h1 + h0, w1 = h1 + 2.0 * h0;
      d[i] = (w0 + w1) / (w0 / s[i - 1] + w1 / s[i]);
    }
  }
  return d;
}

double pchip_eval(const std::vector<double>& x, const std::vector<double>& y,
                  const std::vector<double>& d, double t) {
  const std::size_t n = x.size();
  auto it = std::upper_bound(x.begin(), x.end(), t);
  const std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
      it - x.begin() - 1, 0, static_cast<std::ptrdiff_t>(n) - 2));
  const double h = x[i + 1] - x[i];
  const double u = (t - x[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
}

}  // namespace

SupercriticalModulus::SupercriticalModulus(const Minorant& minorant, double kappa,
                                           double gamma, double b)
    : minorant_(minorant), kappa_(kappa), gamma_(gamma), b_(b) {
  if (!(kappa > 0.0 && gamma > 0.0))
    throw std::invalid_argument("SupercriticalModulus: kappa, gamma must be positive");
  if (!(b >= 1.0)) throw std::invalid_argument("SupercriticalModulus: need B >= 1");
  const double a = minorant_.a;
  c_a_ = (1.0 + 3.0 * a) / (a * a);

  // delta(B): the unique root of m(delta) = B / kappa on (0, 2 sigma).
  const double target = b_ / kappa_;
  double lo = 1e-14, hi = 2.0 * sigma();
  if (!(minorant_(lo) > target))
    throw std::invalid_argument("SupercriticalModulus: B/kappa below minorant range");
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    (minorant_(mid) > target ? lo : hi) = mid;
  }
  delta_b_ = std::sqrt(lo * hi);
  if (!(delta_b_ <= 0.5 * sigma() * (1.0 + 1e-9)))
    throw std::invalid_argument(
        "SupercriticalModulus: delta(B) exceeds sigma/2; decrease kappa");

  // Slope must stay positive through the inner branch; it is decreasing, so
  // the endpoint decides.
  if (!(slope_integral(delta_b_) * b_ * b_ / (2.0 * c_a_ * kappa_) < b_))
    throw std::invalid_argument(
        "SupercriticalModulus: slope turns negative before delta(B); decrease kappa");

  // Inner value table: omega(xi) = B xi - B^2/(2 C_a kappa) D(xi) with
  // D(xi) = int_0^xi (xi - u) F(u) du, F(u) = (3 + log(dB/u)) / (u m(u)).
  const std::size_t n_in = 512;
  lx_in_.resize(n_in);
  v_in_.resize(n_in);
  const double l0 = std::log(delta_b_) - 20.0, l1 = std::log(delta_b_);
  for (std::size_t i = 0; i < n_in; ++i) {
    const double lx = l0 + (l1 - l0) * static_cast<double>(i) / (n_in - 1);
    const double xi = std::exp(lx);
    // u = dB e^{-s}: D(xi) = int_{s0}^inf (xi - dB e^{-s}) (3+s) / m(dB e^{-s}) ds.
    const double s0 = std::log(delta_b_ / xi);
    const auto f = [&](double s) {
      const double u = delta_b_ * std::exp(-s);
      return (xi - u) * (3.0 + s) / minorant_(u);
    };
    const double d = integrate_panels(f, {s0, s0 + 2.0, s0 + 8.0, s0 + 20.0, s0 + 60.0},
                                      1e-11 * b_ * xi);
    lx_in_[i] = lx;
    v_in_[i] = b_ * xi - b_ * b_ / (2.0 * c_a_ * kappa_) * d;
  }

  // Outer value table on [delta_b, sigma]: cumulative gamma * int m(2 eta).
  const std::size_t n_out = 512;
  lx_out_.resize(n_out);
  v_out_.resize(n_out);
  const double m0 = std::log(delta_b_), m1 = std::log(sigma());
  double acc = v_in_.back();
  double prev = delta_b_;
  for (std::size_t i = 0; i < n_out; ++i) {
    const double lx = m0 + (m1 - m0) * static_cast<double>(i) / (n_out - 1);
    const double xi = std::exp(lx);
    if (xi > prev) {
      std::vector<double> edges{prev};
      if (prev < 0.5 * sigma() && xi > 0.5 * sigma()) edges.push_back(0.5 * sigma());
      edges.push_back(xi);
      acc += gamma_ * integrate_panels([&](double e) { return minorant_(2.0 * e); }, edges,
                                       1e-11 * (std::fabs(acc) + 1e-6));
      prev = xi;
    }
    lx_out_[i] = lx;
    v_out_[i] = acc;
  }
  d_in_ = pchip_tangents(lx_in_, v_in_);
  d_out_ = pchip_tangents(lx_out_, v_out_);

  // Tabulate the slope integral so slope() is a lookup, not a quadrature.
  j_in_.resize(n_in);
  for (std::size_t i = 0; i < n_in; ++i) j_in_[i] = slope_integral(std::exp(lx_in_[i]));
  dj_in_ = pchip_tangents(lx_in_, j_in_);
}

double SupercriticalModulus::slope_integral(double xi) const {
  const double s0 = std::log(delta_b_ / xi);
  const auto f = [&](double s) {
    return (3.0 + s) / minorant_(delta_b_ * std::exp(-s));
  };
  // Value scale: a few kappa/B worth of inverse-minorant mass.
  const double tol = 1e-10 * kappa_ / b_;
  return integrate_panels(f, {s0, s0 + 2.0, s0 + 8.0, s0 + 20.0, s0 + 60.0}, tol);
}

double SupercriticalModulus::value(double xi) const {
  if (xi <= 0.0) return 0.0;
  const double lx = std::log(xi);
  if (lx <= lx_in_.front()) return b_ * xi;
  if (xi <= delta_b_) return pchip_eval(lx_in_, v_in_, d_in_, lx);
  if (xi >= sigma()) return v_out_.back();
  return pchip_eval(lx_out_, v_out_, d_out_, lx);
}

double SupercriticalModulus::slope(double xi) const {
  if (xi <= 0.0) return b_;
  if (xi <= delta_b_) {
    const double lx = std::log(xi);
    const double j = lx <= lx_in_.front() ? 0.0 : pchip_eval(lx_in_, j_in_, dj_in_, lx);
    return b_ - b_ * b_ / (2.0 * c_a_ * kappa_) * j;
  }
  return gamma_ * minorant_(2.0 * xi);
}

std::vector<double> SupercriticalModulus::breakpoints() const {
  return {delta_b_, 0.5 * sigma(), sigma()};
}

double select_initial_b(const GridFunction& theta0, double m_bound,
                        const Minorant& minorant, double kappa, double gamma) {
  if (!(m_bound >= theta0.sup_norm()))
    throw std::invalid_argument("select_initial_b: M must dominate ||theta0||_inf");
  const double grad = grad_sup_norm(theta0);
  // The coverage target is min(xi * grad, 2M); with a flat field it is zero
  // and the family minimum already works.
  if (grad == 0.0) return 1.0;
  const double target = 2.0 * m_bound;
  const double bb = 2.0 * m_bound / grad;
  for (double b = 1.0; b <= std::ldexp(1.0, 60); b *= 2.0) {
    try {
      SupercriticalModulus omega(minorant, kappa, gamma, b);
      const double at_b = omega.value(std::min(bb, omega.sigma()));
      if (b >= grad && at_b >= target && omega.value(omega.sigma()) >= target) return b;
    } catch (const std::invalid_argument&) {
      // delta(B) fell below the representable range: growing B further
      // cannot help, the plateau value only shrinks.
      break;
    }
  }
  throw SearchExhausted("select_initial_b: no B <= 2^60 covers the data");
}

}  // namespace hflow
