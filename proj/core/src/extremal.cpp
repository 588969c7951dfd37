#include "hflow/extremal.hpp"

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"
#include "hflow/spectral_ops.hpp"

namespace hflow {

namespace {

// Grid fine enough for the Gaussian mollifier width aimed at xi/factor.
std::size_t pick_grid_size(double xi, const ExtremalOptions& opts, double length) {
  const double h_needed = xi / opts.mollify_factor / 2.5;
  std::size_t n = opts.min_n;
  while (n < opts.max_n && length / static_cast<double>(n) > h_needed) n *= 2;
  return n;
}

}  // namespace

ExtremalPair make_extremal_pair(const ModulusRef& mod, double xi,
                                const ExtremalOptions& opts) {
  const double L = kTwoPi;
  if (!(xi > 0.0 && xi < 0.5 * L))
    throw ConstructionFailed("make_extremal_pair: xi outside (0, L/2)");
  const double w_xi = mod.value(xi);
  if (!(w_xi > 0.0))
    throw ConstructionFailed("make_extremal_pair: modulus vanishes at xi");

  const std::size_t n =
      std::min(opts.max_n, pick_grid_size(xi, opts, L) * opts.n_multiplier);
  const PeriodicGrid grid(n);
  const double h = grid.spacing();
  // Positive-kernel mollification preserves obedience exactly; its width
  // trades the touching slack against grid size.
  const double w_g = std::max(2.5 * h, xi / opts.mollify_factor);

  // Pinched modulus: full slack away from xi, a whisker of it at xi.
  const double eps0 = opts.pinch_floor, eps1 = opts.pinch_away;
  const double pinch_w = 0.7 * xi;
  const auto pinched = [&](double z) {
    const double d = (z - xi) / pinch_w;
    const double eps = eps1 - (eps1 - eps0) * std::exp(-d * d);
    return (1.0 - eps) * mod.value(z);
  };
  // Steep entry ramp bridges the jump when omega(0+) > 0; for moduli that
  // vanish at 0 the profile is already continuous and a ramp would out-climb
  // the modulus at small separations.
  const double omega0 = mod.value(xi * 1e-12);
  const double ramp = omega0 > 1e-10 * w_xi ? 4.0 * w_xi / xi
                                            : std::numeric_limits<double>::infinity();

  // Profile: odd ramp up to the modulus plateau, cosine descent to zero at
  // the antipode so the field is periodic.
  const double s_descent = L / 2.0 - L / 8.0;
  const double plateau =
      std::min(pinched(std::min(mod.plateau_start, 2.0 * s_descent)),
               ramp * std::min(mod.plateau_start, 2.0 * s_descent));
  const auto profile = [&](double s) {
    const double a = std::fabs(s);
    double v;
    if (2.0 * a < mod.plateau_start && a < s_descent) {
      v = 0.5 * std::min(pinched(2.0 * a), ramp * 2.0 * a);
    } else if (a < s_descent) {
      v = 0.5 * plateau;
    } else {
      const double t = (a - s_descent) / (0.5 * L - s_descent);
      v = 0.5 * plateau * 0.5 * (1.0 + std::cos(M_PI * t));
    }
    return s >= 0.0 ? v : -v;
  };

  // Even-symmetry bump near the lower point of the pair; it breaks the odd
  // symmetry that nulls the Hilbert difference. Close to the plateau knee
  // the far-field margin is pinched away, so switch it off there. The
  // amplitude ladder degrades toward a symmetric pair when the maximizer
  // relocation overshoot cannot fit inside the slack window.
  const double bump_base =
      (xi <= 0.6 * mod.plateau_start) ? opts.asymmetry * eps1 * w_xi : 0.0;
  const double bump_w = 1.2 * xi;

  const double tol = 0.25 * eps0 * w_xi;
  const double budget = std::max(opts.slack_budget, 0.0);
  for (double bump_scale : {1.0, 0.35, 0.12, 0.04, 0.0}) {
    const double bump_amp = bump_base * bump_scale;
    if (bump_base == 0.0 && bump_scale != 0.0) continue;
  double amplitude = 1.0;
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    std::vector<double> vals(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double s = std::remainder(grid.point(j) - opts.center, L);
      double v = amplitude * profile(s);
      if (bump_amp != 0.0) {
        const double d = (s + 0.5 * xi) / bump_w;
        v += amplitude * bump_amp * std::exp(-d * d);
      }
      vals[j] = v;
    }
    auto raw = GridFunction::from_values(grid, std::move(vals));
    // Gaussian mollifier (positive kernel: increments can only shrink),
    // then the 2/3-rule truncation, whose ripple is negligible against the
    // mollified spectrum.
    auto c = raw.spectrum();
    for (std::size_t m = 0; m < c.size(); ++m) {
      const double k = grid.wavenumber(m);
      c[m] *= std::exp(-0.5 * k * k * w_g * w_g);
    }
    auto theta = dealias(GridFunction::from_spectrum(grid, std::move(c)));

    auto rep = check_obedience_fn(theta, mod.value, tol);
    if (rep.status == ObedienceStatus::kViolated) {
      amplitude *= 1.0 - 4.0 * (rep.gap + tol) / std::max(w_xi, 1e-300);
      continue;
    }
    const double slack = -rep.gap;
    // The maximizer may drift along near-flat stretches of the modulus;
    // that is still a touching configuration, so accept position drift as
    // long as the modulus value stayed put.
    const bool near_xi = std::fabs(rep.xi - xi) <= 0.3 * xi ||
                         std::fabs(mod.value(rep.xi) - w_xi) <= 0.1 * w_xi;
    if (slack > budget * mod.value(rep.xi) || !near_xi) {
      // Undershoot of the diagonal increment at the target separation; the
      // global maximizer is unreliable while the pinch undershoots (for
      // power-law moduli the sup of the gap sits structurally at zero
      // separation), so the boost decision measures the pinch itself.
      const double touch = theta.sample(opts.center + 0.5 * xi) -
                           theta.sample(opts.center - 0.5 * xi);
      const double undershoot = w_xi - touch;
      if (undershoot > 0.0 && undershoot < 0.8 * w_xi &&
          attempt + 1 < opts.max_retries) {
        amplitude *= 1.0 + 0.9 * undershoot / w_xi;
        continue;
      }
      throw ConstructionFailed(
          "make_extremal_pair: slack " +
          std::to_string(slack / mod.value(rep.xi)) +
          " of omega at xi=" + std::to_string(rep.xi) + " outside budget");
    }
    ExtremalPair pair;
    pair.theta = std::move(theta);
    pair.x = std::fmod(rep.x + L, L);
    pair.y = std::fmod(rep.y + L, L);
    pair.xi = rep.xi;
    pair.slack = slack;
    pair.slope_x = rep.slope_x;
    pair.slope_y = rep.slope_y;
    return pair;
  }
  }
  throw ConstructionFailed("make_extremal_pair: retries exhausted at xi=" +
                           std::to_string(xi));
}

}  // namespace hflow
