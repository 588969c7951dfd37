#include "hflow/multiplier.hpp"

#include <cmath>
#include <stdexcept>

namespace hflow {

Multiplier Multiplier::fractional(double alpha) {
  if (!(alpha >= 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("Multiplier::fractional: need 0 <= alpha < 1");
  Multiplier m;
  m.kind_ = Kind::kFractional;
  m.alpha_ = alpha;
  return m;
}

Multiplier Multiplier::laplacian(double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("Multiplier::laplacian: need eps >= 0");
  Multiplier m;
  m.kind_ = Kind::kLaplacian;
  m.eps_ = eps;
  return m;
}

Multiplier Multiplier::log_supercritical() {
  Multiplier m;
  m.kind_ = Kind::kLogSupercritical;
  return m;
}

Multiplier Multiplier::composite(std::vector<Multiplier> parts) {
  Multiplier m;
  m.kind_ = Kind::kComposite;
  m.parts_ = std::move(parts);
  return m;
}

double Multiplier::symbol(double k) const {
  const double a = std::fabs(k);
  if (a == 0.0) return 0.0;
  switch (kind_) {
    case Kind::kFractional:
      return std::pow(a, 2.0 * alpha_);
    case Kind::kLaplacian:
      return eps_ * a * a;
    case Kind::kLogSupercritical:
      return a / std::log1p(a * a);
    case Kind::kComposite: {
      double s = 0.0;
      for (const auto& p : parts_) s += p.symbol(a);
      return s;
    }
  }
  return 0.0;
}

std::string Multiplier::describe() const {
  switch (kind_) {
    case Kind::kFractional:
      return "fractional(alpha=" + std::to_string(alpha_) + ")";
    case Kind::kLaplacian:
      return "laplacian(eps=" + std::to_string(eps_) + ")";
    case Kind::kLogSupercritical:
      return "log_supercritical";
    case Kind::kComposite:
      return "composite";
  }
  return "?";
}

long dominance_crossover(const Multiplier& log_multiplier, double alpha, long k_limit) {
  if (!(alpha < 0.5)) return 0;
  auto dominated = [&](long k) {
    const double kk = static_cast<double>(k);
    return log_multiplier.symbol(kk) >= std::pow(kk, 2.0 * alpha);
  };
  // The ratio k^{1-2a}/log(1+k^2) is unimodal on k >= 1: decreasing while
  // 2k^2/((1+k^2)log(1+k^2)) > 1-2a, increasing afterwards. So the failure
  // set {P(k) < k^{2a}} is a contiguous interval; locate the ratio minimum
  // first, then resolve both ends of the interval.
  auto slope_term = [](double k) {
    return 2.0 * k * k / ((1.0 + k * k) * std::log1p(k * k));
  };
  long lo = 1, hi = 2;
  while (hi < k_limit && slope_term(static_cast<double>(hi)) > 1.0 - 2.0 * alpha) hi *= 2;
  while (lo + 1 < hi) {
    long mid = lo + (hi - lo) / 2;
    (slope_term(static_cast<double>(mid)) > 1.0 - 2.0 * alpha ? lo : hi) = mid;
  }
  const long k_min = std::min(hi, k_limit);
  if (dominated(k_min)) {
    // Minimum already dominates; any failures sit below it.
    long last_fail = 0;
    for (long k = 1; k <= k_min; ++k)
      if (!dominated(k)) last_fail = k;
    return last_fail + 1;
  }
  if (!dominated(k_limit)) return 0;
  // Increasing branch: binary search the first dominated k past the minimum.
  lo = k_min;
  hi = k_limit;
  while (lo + 1 < hi) {
    long mid = lo + (hi - lo) / 2;
    (dominated(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace hflow
