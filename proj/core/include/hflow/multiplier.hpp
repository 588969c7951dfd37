#pragma once

#include <string>
#include <vector>

namespace hflow {

/// A nonnegative, even Fourier symbol k -> P(|k|) defining a dissipative
/// multiplier operator. P(0) = 0 always: the formula |k|/log(1+k^2) is 0/0
/// at k = 0 and is defined as 0 there; on the torus the smallest nonzero
/// wavenumber is 2*pi/L, so the continuum divergence of that symbol as
/// k -> 0+ never enters.
class Multiplier {
 public:
  enum class Kind { kFractional, kLaplacian, kLogSupercritical, kComposite };

  /// |k|^{2 alpha}, 0 <= alpha < 1/2 in the supercritical study.
  static Multiplier fractional(double alpha);
  /// eps * k^2 (viscous regularization).
  static Multiplier laplacian(double eps);
  /// |k| / log(1 + k^2), the logarithmically weakened half-Laplacian.
  static Multiplier log_supercritical();
  /// Sum of component symbols.
  static Multiplier composite(std::vector<Multiplier> parts);

  double symbol(double k) const;
  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double epsilon() const { return eps_; }
  std::string describe() const;

 private:
  Multiplier() = default;
  Kind kind_ = Kind::kFractional;
  double alpha_ = 0.25;
  double eps_ = 0.0;
  std::vector<Multiplier> parts_;
};

/// Smallest integer k0 <= k_limit with P(k) >= k^{2 alpha} for every integer
/// k in [k0, k_limit], or 0 if none exists. Used to exhibit the eventual
/// dominance of the log-weakened symbol over |k|^{2 alpha}; the crossover
/// for alpha near 1/2 sits far beyond any resolvable band, hence the
/// symbol-level scan.
long dominance_crossover(const Multiplier& log_multiplier, double alpha, long k_limit);

}  // namespace hflow
