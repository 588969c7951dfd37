#pragma once

#include <cstddef>
#include <vector>

#include "hflow/grid.hpp"
#include "hflow/multiplier.hpp"

namespace hflow {

/// Smooth radially non-increasing cutoff: identically 1 on [0, sigma],
/// identically 0 on [2 sigma, inf), smoothstep with vanishing first
/// derivatives at both ends in between.
struct CutoffFunction {
  double sigma = 0.1;

  explicit CutoffFunction(double sigma_ = 0.1);
  double operator()(double r) const;
  double slope(double r) const;
};

/// Tabulated real-space kernel K(y) of the log-supercritical dissipation
/// operator on the torus, with its cutoff split K1 = K*phi, K2 = K*(1-phi)
/// and the fitted two-sided comparison constant against (1/y) P(1/y).
class KernelTable {
 public:
  struct BuildOptions {
    std::size_t num_radii = 512;
    double r_min = 1e-4;
    double period = kTwoPi;
    double comparison_cap = 1e6;
  };

  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& k_values() const { return k_; }
  double c_bound() const { return c_bound_; }
  double sigma() const { return cutoff_.sigma; }
  const CutoffFunction& cutoff() const { return cutoff_; }
  double period() const { return period_; }
  double r_min() const { return radii_.front(); }

  /// Interpolated kernel value at radius y in [r_min, L/2].
  double k_at(double y) const;
  double k1_at(double y) const { return k_at(y) * cutoff_(y); }
  double k2_at(double y) const { return k_at(y) * (1.0 - cutoff_(y)); }

  /// Minorant m(r) = (1/C) P(1/r) phi(r); zero for r >= 2 sigma.
  double minorant(double r) const;

  /// int_0^{r_min} y^2 K(y) dy under the near-origin asymptote, used as the
  /// curvature correction for quadrature below the table.
  double near_field_moment() const { return mu2_; }

  friend KernelTable build_kernel_table(const Multiplier&, const CutoffFunction&,
                                        const KernelTable::BuildOptions&);

 private:
  std::vector<double> radii_;   // log-spaced
  std::vector<double> k_;       // K(y)
  std::vector<double> slopes_;  // d K / d log y, monotone-limited
  CutoffFunction cutoff_{0.1};
  Multiplier symbol_ = Multiplier::log_supercritical();
  double c_bound_ = 0.0;
  double period_ = kTwoPi;
  double mu2_ = 0.0;
};

/// Invert the multiplier into its real-space kernel: evaluate the operator
/// on Gaussian approximate identities of shrinking width at each tabulated
/// radius and extrapolate the width to zero. Fits the smallest comparison
/// constant validating the two-sided kernel bounds (lower bound enforced
/// only below 2 sigma); throws ComparisonFailure when none below the cap
/// exists.
KernelTable build_kernel_table(const Multiplier& p, const CutoffFunction& cutoff,
                               const KernelTable::BuildOptions& opts = {});

/// Structural constants of the minorant: c0 = sup r m(r) on (0, 2 sigma)
/// and the largest exponent a in (0, 1] with r^a m(r) non-increasing,
/// both certified on a scan grid 10x finer than the table.
struct Minorant {
  double c_norm = 0.0;  // comparison constant C the minorant inherits
  double c0 = 0.0;
  double a = 0.0;
  CutoffFunction cutoff{0.1};

  double operator()(double r) const;
};

Minorant minorant_constants(const KernelTable& table, const CutoffFunction& cutoff);

enum class KernelPart { kFull, kNearField, kFarField };

/// Quadrature of the chosen kernel piece at a point:
///   int (theta(x) - theta(x+y)) K_part(y) dy
/// over the torus, with the below-table curvature correction for the parts
/// containing the near-origin singularity.
double apply_nonlocal(const GridFunction& f, const KernelTable& table, KernelPart part,
                      double x, double abs_tol = 1e-8);

/// Same, against the minorant kernel m(|y|)/|y| (the lower envelope of K1).
double apply_minorant_kernel(const GridFunction& f, const KernelTable& table, double x,
                             double abs_tol = 1e-8);

}  // namespace hflow
