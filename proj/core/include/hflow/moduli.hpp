#pragma once

#include <concepts>
#include <vector>

#include "hflow/kernel_table.hpp"

namespace hflow {

/// Anything evaluable as a modulus of continuity: value and one-sided slope
/// at positive separations, branch points for quadrature splitting, and the
/// scale beyond which the modulus is constant (+inf when it never is).
template <typename M>
concept ModulusLike = requires(const M& m, double xi) {
  { m.value(xi) } -> std::convertible_to<double>;
  { m.slope(xi) } -> std::convertible_to<double>;
  { m.breakpoints() } -> std::convertible_to<std::vector<double>>;
  { m.plateau_start() } -> std::convertible_to<double>;
};

/// Degenerate linear modulus c*xi; both dissipation functionals vanish on
/// it identically, which makes it the natural null test case.
struct LinearModulus {
  double c = 1.0;
  double value(double xi) const { return c * xi; }
  double slope(double) const { return c; }
  std::vector<double> breakpoints() const { return {}; }
  double plateau_start() const { return std::numeric_limits<double>::infinity(); }
};

/// Test modulus sqrt(xi): strictly concave with no plateau.
struct SqrtModulus {
  double value(double xi) const { return std::sqrt(xi); }
  double slope(double xi) const { return 0.5 / std::sqrt(xi); }
  std::vector<double> breakpoints() const { return {}; }
  double plateau_start() const { return std::numeric_limits<double>::infinity(); }
};

/// Piecewise modulus with a linear inner branch, a Holder middle branch and
/// a flat outer branch:
///   omega(xi) = b A xi0^{b-1} xi + (1-b) A xi0^b   on (0, xi0),
///             = A xi^b                              on [xi0, delta],
///             = A delta^b = H                       on (delta, inf),
/// where A = H delta^{-b}. Continuously differentiable at xi0, kink at
/// delta. The inner scale xi0 shrinks along the regularization schedule.
class HolderModulus {
 public:
  HolderModulus(double h_amp, double delta, double beta, double xi0);

  double value(double xi) const;
  double slope(double xi) const;  // one-sided, from the defining branch
  /// Sensitivity to the inner scale, nonzero only on the inner branch.
  double inner_scale_sensitivity(double xi) const;
  std::vector<double> breakpoints() const;
  double plateau_start() const { return delta_; }
  double plateau_value() const { return h_amp_; }

  double h_amp() const { return h_amp_; }
  double delta() const { return delta_; }
  double beta() const { return beta_; }
  double xi0() const { return xi0_; }
  HolderModulus with_inner_scale(double xi0) const {
    return HolderModulus(h_amp_, delta_, beta_, xi0);
  }

 private:
  double h_amp_, delta_, beta_, xi0_;
};

/// Inner-scale schedule xi0(t) solving d xi0/dt = -c2 xi0^{1-2 alpha},
/// xi0(0) = delta: the separable closed form
///   xi0(t) = (delta^{2 alpha} - 2 alpha c2 t)^{1/(2 alpha)},
/// clamped to zero from t* = delta^{2 alpha} / (2 alpha c2) onward.
double inner_scale_at(double delta, double alpha, double c2, double t);
double inner_scale_zero_time(double delta, double alpha, double c2);

/// The log-supercritical modulus family: omega_B(0) = 0 with
///   omega_B'(xi) = B - B^2/(2 C_a kappa) * int_0^xi (3+log(dB/eta))/(eta m(eta)) deta
/// on (0, dB), omega_B'(xi) = gamma m(2 xi) beyond, where dB solves
/// m(dB) = B / kappa and C_a = (1+3a)/a^2. Constant past sigma since m
/// vanishes there. Values come from a dense table built at construction.
class SupercriticalModulus {
 public:
  SupercriticalModulus(const Minorant& minorant, double kappa, double gamma, double b);

  double value(double xi) const;
  double slope(double xi) const;
  std::vector<double> breakpoints() const;
  double plateau_start() const { return sigma(); }
  double plateau_value() const { return value(sigma()); }

  double b() const { return b_; }
  double kappa() const { return kappa_; }
  double gamma() const { return gamma_; }
  double delta_b() const { return delta_b_; }
  double sigma() const { return minorant_.cutoff.sigma; }
  double c_a_coefficient() const { return c_a_; }
  const Minorant& minorant() const { return minorant_; }

 private:
  double slope_integral(double xi) const;  // J(xi) on (0, delta_b]
  Minorant minorant_;
  double kappa_, gamma_, b_;
  double delta_b_ = 0.0;
  double c_a_ = 0.0;
  // Log-spaced value tables on (0, delta_b] and [delta_b, sigma] with
  // monotone-cubic tangents, plus the tabulated slope integral J.
  std::vector<double> lx_in_, v_in_, d_in_, lx_out_, v_out_, d_out_;
  std::vector<double> j_in_, dj_in_;
};

/// Smallest B = 2^k (doubling search from 1) whose modulus covers the
/// initial data: omega_B(b) >= 2M and omega_B(sigma) >= 2M with
/// b = 2M / ||grad theta0||_inf, plus B >= ||grad theta0||_inf so the
/// concavity reduction applies. Throws SearchExhausted past 2^60.
double select_initial_b(const GridFunction& theta0, double m_bound,
                        const Minorant& minorant, double kappa, double gamma);

}  // namespace hflow
