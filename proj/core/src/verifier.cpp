#include "hflow/verifier.hpp"

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>

#include "hflow/errors.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/spectral_ops.hpp"

namespace hflow {

InequalityRecord make_record(std::string name, double lhs, double rhs, double tol,
                             std::map<std::string, double> params) {
  InequalityRecord r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.params = std::move(params);
  r.pass = r.margin >= -tol;
  return r;
}

void VerifyReport::add(InequalityRecord r) {
  (r.pass ? passed : failed) += 1;
  records.push_back(std::move(r));
}

Calibration default_calibration() { return Calibration{}; }

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> g;
  const double l0 = std::log10(lo), l1 = std::log10(hi);
  const int steps = std::max(1, static_cast<int>(std::ceil((l1 - l0) * per_decade)));
  for (int i = 0; i <= steps; ++i)
    g.push_back(std::pow(10.0, l0 + (l1 - l0) * i / steps));
  g.front() = lo;
  g.back() = hi;
  return g;
}

void check_pointwise_sign(VerifyReport& rep, double xi, double alpha,
                          std::size_t z_points) {
  // 1/z + xi^{2a}/|z|^{1+2a} >= 0 on 0 < |z| < xi; only z < 0 can fail.
  double worst = std::numeric_limits<double>::infinity();
  const double p = std::pow(xi, 2.0 * alpha);
  for (std::size_t i = 1; i <= z_points; ++i) {
    const double z = -xi * static_cast<double>(i) / static_cast<double>(z_points + 1);
    const double v = 1.0 / z + p / std::pow(-z, 1.0 + 2.0 * alpha);
    worst = std::min(worst, v * std::pow(-z, 1.0 + 2.0 * alpha));  // scaled, stays finite
  }
  rep.add(make_record("pointwise-sign", -worst, 0.0, 1e-12,
                      {{"xi", xi}, {"alpha", alpha}}));
}

namespace {

// int_{|x-z| >= xi} theta(z)/(x-z) dz on the torus: the image sum collapses
// to a single-period integral against the digamma function,
//   -(1/L) int_xi^{xi+L} [theta(x-u) - theta(x+u)] psi(u/L) du.
double far_hilbert_piece(const GridFunction& theta, double x, double xi) {
  const double L = theta.grid().length;
  const auto f = [&](double u) {
    return (theta.sample(x - u) - theta.sample(x + u)) *
           boost::math::digamma(u / L);
  };
  const auto edges = graded_edges(xi, xi + L, std::max(xi * 0.25, 1e-6));
  return -(1.0 / L) * integrate_panels(f, edges, 1e-9 * (1.0 + theta.sup_norm()));
}

// xi * int_{xi/2}^inf omega(r)/r^2 dr with the plateau tail in closed form.
double tail_term(const ModulusRef& mod, double xi) {
  const double pl = mod.plateau_start;
  double v = 0.0;
  if (0.5 * xi < pl) {
    v += integrate_panels([&](double r) { return mod.value(r) / (r * r); },
                          graded_edges(0.5 * xi, pl, 0.25 * xi), 1e-10);
  }
  v += mod.plateau_value / std::max(pl, 0.5 * xi);
  return xi * v;
}

}  // namespace

HilbertBenchSample hilbert_bound_sample(const ExtremalPair& pair, const ModulusRef& mod,
                                        double alpha, const Calibration& cal) {
  HilbertBenchSample out;
  const auto& theta = pair.theta;
  const double xi = pair.xi;

  const auto ht = hilbert_transform(theta);
  const double omega_diff = ht.sample(pair.x) - ht.sample(pair.y);

  const auto lam = apply_multiplier(theta, Multiplier::fractional(alpha));
  const double dlam = lam.sample(pair.x) - lam.sample(pair.y);

  const double tail = tail_term(mod, xi);
  const double bracket = std::pow(xi, 2.0 * alpha) * dlam + tail;
  out.ratio = bracket > 0.0 ? omega_diff / bracket
                            : std::numeric_limits<double>::infinity();

  const double far = far_hilbert_piece(theta, pair.x, xi) -
                     far_hilbert_piece(theta, pair.y, xi);
  out.far_ratio = std::fabs(far) / tail;

  // Dissipation ordering at the touching pair:
  //   -L^a theta(x) + L^a theta(y) <= D_alpha(xi).
  const double d_alpha = detail::dissipation_alpha_impl(
      mod.value, mod.slope, mod.breakpoints, mod.plateau_start, alpha, xi,
      cal.c_alpha_scale, 1e-10);
  out.ordering = make_record("dissipation-ordering", -dlam, d_alpha,
                             cal.tol_fitted * (1.0 + std::fabs(d_alpha)),
                             {{"xi", xi}, {"alpha", alpha}});
  out.ordering.params["slack"] = pair.slack;
  return out;
}

namespace {

struct PairKey {
  double beta, xi0_frac, xi;
};

struct HolderBenchContext {
  const VerifyOptions& opts;
  double alpha;
  double beta;
  double h_amp;
  double delta;
};

HolderModulus bench_modulus(const HolderBenchContext& c, double xi0_frac) {
  return HolderModulus(c.h_amp, c.delta, c.beta, xi0_frac * c.delta);
}

}  // namespace

void run_hilbert_bench(VerifyReport& rep, const VerifyOptions& opts) {
  const Calibration& cal = opts.cal;
  double fit_c = 0.0;
  double fit_far = 0.0;
  double fit_c_alpha = std::numeric_limits<double>::infinity();
  std::size_t samples = 0;

  const double xi_lo = cal.delta * std::pow(10.0, -opts.xi_decades);
  const auto xis = log_grid(xi_lo, 0.98 * cal.delta, opts.xi_per_decade);

  for (double alpha : opts.alphas) {
    const double beta = 1.0 - alpha;
    HolderBenchContext ctx{opts, alpha, beta,
                           cal.c1 * std::pow(cal.delta, 1.0 - 2.0 * alpha), cal.delta};
    for (double frac : opts.xi0_fractions) {
      HolderModulus mod = bench_modulus(ctx, frac);
      const ModulusRef ref = ModulusRef::of(mod);
      for (double xi : xis) {
        check_pointwise_sign(rep, xi, alpha);
        std::map<std::string, double> where{
            {"xi", xi}, {"alpha", alpha}, {"xi0_frac", frac}};
        // Asymmetric loosely pinched pair: nonzero Hilbert difference.
        ExtremalOptions eo;
        eo.max_n = opts.pair_grid_cap;
        eo.asymmetry = 0.35;
        eo.pinch_away = 0.4;
        ExtremalPair pair;
        try {
          pair = make_extremal_pair(ref, xi, eo);
        } catch (const ConstructionFailed&) {
          rep.add(make_record("pair-construction", 1.0, 0.0, 0.0, where));
          continue;
        }
        auto s = hilbert_bound_sample(pair, ref, alpha, cal);
        ++samples;
        fit_c = std::max(fit_c, s.ratio);
        fit_far = std::max(fit_far, s.far_ratio);
        rep.add(make_record("hilbert-diff-bound", s.ratio,
                            opts.fit_constants ? s.ratio : cal.c_hilbert,
                            cal.tol_fitted * cal.c_hilbert, where));
        rep.records.back().params["slack"] = pair.slack;
        rep.add(make_record("far-field-bound", s.far_ratio,
                            opts.fit_constants ? s.far_ratio : cal.c_hilbert,
                            cal.tol_fitted * cal.c_hilbert, where));
        rep.add(s.ordering);
        if (!opts.fit_constants) {
          // PV route cross-check of the fractional Laplacian at the pair.
          const auto lam = apply_multiplier(pair.theta, Multiplier::fractional(alpha));
          for (double pt : {pair.x, pair.y}) {
            const double sv = lam.sample(pt);
            const double pv = pv_fractional_laplacian(pair.theta, alpha, pt, 1e-8);
            rep.add(make_record("pv-vs-spectral", std::fabs(pv - sv),
                                1e-6 * (1.0 + std::fabs(sv)), 0.0, where));
          }
        }
        // Tightly pinched symmetric pair: near-saturated dissipation ordering
        // plus the slope consistency of true touching extremals.
        if (frac == 0.0 || frac == 0.5) {
          ExtremalOptions tight;
          tight.max_n = opts.pair_grid_cap;
          try {
            ExtremalPair tp = make_extremal_pair(ref, xi, tight);
            auto ts = hilbert_bound_sample(tp, ref, alpha, cal);
            rep.add(ts.ordering);
            if (ts.ordering.rhs < 0.0)
              fit_c_alpha = std::min(fit_c_alpha, ts.ordering.lhs / ts.ordering.rhs);
            const double wp = ref.slope(tp.xi);
            rep.add(make_record("slope-consistency",
                                std::max(std::fabs(tp.slope_x - wp),
                                         std::fabs(tp.slope_y - wp)),
                                1e-2 * wp, 0.0, where));
          } catch (const ConstructionFailed&) {
            rep.add(make_record("pair-construction", 1.0, 0.0, 0.0, where));
          }
        }
      }
    }
  }
  rep.fitted["c_hilbert"] = fit_c;
  rep.fitted["c_far_field"] = fit_far;
  rep.fitted["c_alpha_ratio"] = fit_c_alpha;
  rep.fitted["hilbert_samples"] = static_cast<double>(samples);

  // Stability of the fitted constant under grid doubling, on the middle
  // alpha with the pure Holder modulus.
  {
    const double alpha = opts.alphas[opts.alphas.size() / 2];
    const double beta = 1.0 - alpha;
    HolderBenchContext ctx{opts, alpha, beta,
                           cal.c1 * std::pow(cal.delta, 1.0 - 2.0 * alpha), cal.delta};
    HolderModulus mod = bench_modulus(ctx, 0.0);
    const ModulusRef ref = ModulusRef::of(mod);
    double fit_a = 0.0, fit_b = 0.0;
    for (double xi : log_grid(xi_lo, 0.98 * cal.delta, 3)) {
      ExtremalOptions eo;
      eo.max_n = opts.pair_grid_cap;
      auto p1 = make_extremal_pair(ref, xi, eo);
      eo.n_multiplier = 2;
      auto p2 = make_extremal_pair(ref, xi, eo);
      fit_a = std::max(fit_a, hilbert_bound_sample(p1, ref, alpha, cal).ratio);
      fit_b = std::max(fit_b, hilbert_bound_sample(p2, ref, alpha, cal).ratio);
    }
    const double rel = std::fabs(fit_a - fit_b) / std::max(fit_a, fit_b);
    rep.add(make_record("fit-grid-stability", rel, 0.05, 0.0, {{"alpha", alpha}}));
    rep.fitted["c_hilbert_refined"] = fit_b;
  }
}

void run_breakthrough_bench(VerifyReport& rep, const VerifyOptions& opts) {
  const Calibration& cal = opts.cal;
  const double xi_lo = cal.delta * std::pow(10.0, -opts.xi_decades);
  const auto xis = log_grid(xi_lo, 0.98 * cal.delta, opts.xi_per_decade);

  for (double alpha : opts.alphas) {
    const double beta = 1.0 - alpha;
    const double h_amp = cal.c1 * std::pow(cal.delta, 1.0 - 2.0 * alpha);
    for (double frac : opts.xi0_fractions) {
      if (frac == 0.0) continue;  // the schedule starts at xi0 = delta > 0
      const double xi0 = frac * cal.delta;
      HolderModulus mod(h_amp, cal.delta, beta, xi0);
      const ModulusRef ref = ModulusRef::of(mod);
      // Slope bound by the inner-branch slope at the matching point.
      for (double xi : xis) {
        const double slope = mod.slope(xi);
        // The slope-amplitude estimate peaks on the Holder branch.
        const double amp_bound = cal.c_hilbert * beta *
                                 (h_amp / std::pow(cal.delta, 1.0 - 2.0 * alpha)) *
                                 std::pow(std::max(xi, xi0) / cal.delta,
                                          2.0 * alpha + beta - 1.0);
        rep.add(make_record("slope-amplitude", amp_bound, 0.5, 0.0,
                            {{"xi", xi}, {"alpha", alpha}, {"xi0", xi0}}));

        const double d_alpha =
            dissipation_alpha(mod, alpha, xi, cal.c_alpha_scale, 1e-10);
        rep.add(make_record("slope-dissipation",
                            cal.c_hilbert * mod.value(xi) * slope, -0.25 * d_alpha,
                            cal.tol_fitted * std::fabs(d_alpha),
                            {{"xi", xi}, {"alpha", alpha}, {"xi0", xi0}}));

        // d xi0/dt = -c2 xi0^{1-2a} shrinks the modulus where xi < xi0.
        const double dt_omega = mod.inner_scale_sensitivity(xi) *
                                (-cal.c2 * std::pow(xi0, 1.0 - 2.0 * alpha));
        rep.add(make_record("shrink-vs-dissipation", 0.25 * d_alpha, dt_omega,
                            cal.tol_fitted * std::fabs(d_alpha),
                            {{"xi", xi}, {"alpha", alpha}, {"xi0", xi0}}));

        ExtremalOptions eo;
        eo.max_n = opts.pair_grid_cap;
        eo.asymmetry = 0.35;
        eo.pinch_away = 0.4;
        ExtremalPair pair;
        try {
          pair = make_extremal_pair(ref, xi, eo);
        } catch (const ConstructionFailed&) {
          rep.add(make_record("pair-construction", 1.0, 0.0, 0.0,
                              {{"xi", xi}, {"alpha", alpha}, {"xi0", xi0}}));
          continue;
        }
        const auto ht = hilbert_transform(pair.theta);
        const double omega_big = ht.sample(pair.x) - ht.sample(pair.y);
        const auto lam = apply_multiplier(pair.theta, Multiplier::fractional(alpha));
        const double dlam = lam.sample(pair.x) - lam.sample(pair.y);
        const double xi_p = pair.xi;
        const double d_alpha_p =
            dissipation_alpha(mod, alpha, xi_p, cal.c_alpha_scale, 1e-10);
        const double d_small = 0.5 * (-dlam) + 0.5 * d_alpha_p;
        const double dt_omega_p = mod.inner_scale_sensitivity(xi_p) *
                                  (-cal.c2 * std::pow(xi0, 1.0 - 2.0 * alpha));
        const double numerator = omega_big * mod.slope(xi_p) + d_small - dt_omega_p;
        auto r = make_record("breakthrough-numerator", numerator, 0.0,
                             1e-12 * (1.0 + std::fabs(d_alpha_p)),
                             {{"xi", xi_p}, {"alpha", alpha}, {"xi0", xi0}});
        r.params["slack"] = pair.slack;
        rep.add(std::move(r));
      }
    }
  }
}

void run_supercritical_bench(VerifyReport& rep, const VerifyOptions& opts,
                             const KernelTable& table, const Minorant& minorant) {
  const Calibration& cal = opts.cal;
  const double sigma = minorant.cutoff.sigma;
  const double a = minorant.a;
  const double c_norm = minorant.c_norm;
  SupercriticalModulus wb(minorant, cal.kappa, cal.gamma, opts.b_slope);
  const ModulusRef ref = ModulusRef::of(wb);
  const double db = wb.delta_b();

  // Family-level sign condition combining the fitted Hilbert constant with
  // the dissipation lower bound.
  const double c_a = 1.0 + std::pow(1.5, -a);
  rep.add(make_record(
      "net-sign",
      cal.c_hilbert * cal.gamma * (a + 2.0) / a - (2.0 - c_a) / (4.0 * cal.c_hilbert),
      0.0, 0.0, {{"a", a}, {"gamma", cal.gamma}}));

  const auto xis = log_grid(sigma * 1e-3, 0.98 * sigma, opts.xi_per_decade);
  for (double xi : xis) {
    std::map<std::string, double> base{{"xi", xi}, {"b", opts.b_slope}};

    if (xi >= db) {
      // Tail bound: int_xi^inf m(2 eta)/eta d eta <= m(2 xi)/a.
      double tail_m = 0.0;
      if (xi < sigma) {
        tail_m = integrate_panels([&](double e) { return minorant(2.0 * e) / e; },
                                  graded_edges(xi, sigma, 0.1 * xi), 1e-11);
      }
      rep.add(make_record("tail-integral-bound", tail_m, minorant(2.0 * xi) / a,
                          cal.tol_fitted * (minorant(2.0 * xi) / a + 1e-12), base));

      // Integration-by-parts identity for xi >= delta(B).
      double lhs_ibp = 0.0;
      if (xi < sigma) {
        lhs_ibp = integrate_panels([&](double e) { return wb.value(e) / (e * e); },
                                   graded_edges(xi, sigma, 0.1 * xi), 1e-12);
      }
      lhs_ibp += wb.value(sigma) / sigma;
      lhs_ibp *= xi;
      const double rhs_ibp = wb.value(xi) + cal.gamma * xi * tail_m;
      rep.add(make_record("ibp-identity", std::fabs(lhs_ibp - rhs_ibp),
                          1e-6 * (1.0 + std::fabs(rhs_ibp)), 0.0, base));

      if (xi <= 2.0 * db) {
        rep.add(make_record("near-lower-bound", cal.gamma * xi * minorant(2.0 * xi) / a,
                            wb.value(xi), cal.tol_fitted * wb.value(xi), base));
      } else {
        rep.add(make_record("far-lower-bound", cal.gamma * xi * minorant(2.0 * xi) / 2.0,
                            wb.value(xi), cal.tol_fitted * wb.value(xi), base));
      }

      // Dissipation lower bound with c_a = 1 + (3/2)^{-a}.
      const double diss = dissipation_log(wb, minorant, xi, cal.a_scale, 1e-10);
      rep.add(make_record("dissipation-lower-bound",
                          (2.0 - c_a) / c_norm * wb.value(xi) * minorant(2.0 * xi), diss,
                          cal.tol_fitted * (std::fabs(diss) + 1e-12), base));

      // Novel-step sign: gamma m(2 xi) - m(z)/4 < 0 on -2 xi < z < 0.
      double worst = -std::numeric_limits<double>::infinity();
      for (int i = 1; i <= 256; ++i) {
        const double z = 2.0 * xi * i / 257.0;
        worst = std::max(worst, cal.gamma * minorant(2.0 * xi) - 0.25 * minorant(z));
      }
      rep.add(make_record("novel-step-sign", worst, 0.0, 0.0, base));
    }

    // Assembled negativity on an extremal pair, all xi in (0, sigma).
    ExtremalOptions eo;
    eo.max_n = opts.pair_grid_cap;
    eo.asymmetry = 0.35;
    eo.pinch_away = 0.4;
    ExtremalPair pair;
    try {
      pair = make_extremal_pair(ref, xi, eo);
    } catch (const ConstructionFailed&) {
      rep.add(make_record("pair-construction", 1.0, 0.0, 0.0, base));
      continue;
    }
    const auto ht = hilbert_transform(pair.theta);
    const double omega_big = ht.sample(pair.x) - ht.sample(pair.y);
    const double diss_p = dissipation_log(wb, minorant, pair.xi, cal.a_scale, 1e-10);
    auto shown = make_record("assembled-negativity",
                             omega_big * wb.slope(pair.xi) - 0.5 * diss_p, 0.0, 0.0,
                             base);
    shown.params["xi_pair"] = pair.xi;
    shown.params["slack"] = pair.slack;
    rep.add(std::move(shown));

    // Far-kernel modulus bound on the same pair:
    // |L2 theta(x) - L2 theta(y)| <= D_B(xi) / 2.
    const double l2x = apply_nonlocal(pair.theta, table, KernelPart::kFarField, pair.x);
    const double l2y = apply_nonlocal(pair.theta, table, KernelPart::kFarField, pair.y);
    rep.add(make_record("far-kernel-modulus-bound", std::fabs(l2x - l2y), 0.5 * diss_p,
                        cal.tol_fitted * (std::fabs(diss_p) + 1e-12), base));

    // Near-kernel dissipation ordering (the Lemma-3.5 direction):
    // L1 theta(x) - L1 theta(y) >= D_B(xi).
    const double l1x = apply_nonlocal(pair.theta, table, KernelPart::kNearField, pair.x);
    const double l1y = apply_nonlocal(pair.theta, table, KernelPart::kNearField, pair.y);
    rep.add(make_record("near-kernel-ordering", diss_p, l1x - l1y,
                        cal.tol_fitted * (std::fabs(diss_p) + 1e-12), base));
  }
}

ObedienceMonitor::ObedienceMonitor(HolderModulus base, double alpha, double c2,
                                   double tolerance)
    : base_(std::move(base)), alpha_(alpha), c2_(c2), tol_(tolerance) {}

ObedienceMonitor::ObedienceMonitor(SupercriticalModulus fixed, double tolerance)
    : fixed_(std::move(fixed)), tol_(tolerance) {}

void ObedienceMonitor::observe(const TimeStepReport& r, const GridFunction& theta) {
  Entry e;
  e.t = r.t;
  if (base_) {
    const double xi0 = inner_scale_at(base_->delta(), alpha_, c2_, r.t);
    e.xi0 = xi0;
    auto mod = base_->with_inner_scale(xi0);
    e.report = check_obedience(theta, mod, tol_);
  } else {
    e.xi0 = std::numeric_limits<double>::quiet_NaN();
    e.report = check_obedience(theta, *fixed_, tol_);
  }
  worst_gap_ = std::max(worst_gap_, e.report.gap);
  history_.push_back(std::move(e));
}

}  // namespace hflow
