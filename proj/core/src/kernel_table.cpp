#include "hflow/kernel_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hflow/errors.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/spectral_ops.hpp"

namespace hflow {

CutoffFunction::CutoffFunction(double sigma_) : sigma(sigma_) {
  if (!(sigma > 0.0)) throw std::invalid_argument("CutoffFunction: sigma must be positive");
}

double CutoffFunction::operator()(double r) const {
  r = std::fabs(r);
  if (r <= sigma) return 1.0;
  if (r >= 2.0 * sigma) return 0.0;
  const double s = (r - sigma) / sigma;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double CutoffFunction::slope(double r) const {
  r = std::fabs(r);
  if (r <= sigma || r >= 2.0 * sigma) return 0.0;
  const double s = (r - sigma) / sigma;
  return -6.0 * s * (1.0 - s) / sigma;
}

namespace {

// Natural cubic spline on an increasing abscissa; plain tridiagonal solve.
struct CubicSpline {
  std::vector<double> x, y, m;  // m = second derivatives

  void build(std::vector<double> xs, std::vector<double> ys) {
    x = std::move(xs);
    y = std::move(ys);
    const std::size_t n = x.size();
    m.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      a[i] = h0 / 6.0;
      b[i] = (h0 + h1) / 3.0;
      c[i] = h1 / 6.0;
      d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
    }
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
      if (i == 1) break;
    }
  }

  double eval(double t) const {
    const std::size_t n = x.size();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(
        it - x.begin() - 1, 0, static_cast<std::ptrdiff_t>(n) - 2));
    const double h = x[i + 1] - x[i];
    const double u = (x[i + 1] - t) / h, v = (t - x[i]) / h;
    return u * y[i] + v * y[i + 1] +
           ((u * u * u - u) * m[i] + (v * v * v - v) * m[i + 1]) * h * h / 6.0;
  }
};

// Operator applied to a Gaussian approximate identity of width w, evaluated
// at y; equals the (Gaussian-smoothed) negated kernel away from the bump.
double smoothed_kernel_sum(const Multiplier& p, double y, double w, double period) {
  const double k1 = kTwoPi / period;
  const double wk = w * k1;
  const double q2 = std::exp(-2.0 * wk * wk);
  // Stop once the Gaussian weight is ~1e-22.
  const long m_max = static_cast<long>(std::ceil(7.0 / (w * k1)));
  double gauss = std::exp(-wk * wk);     // e^{-(w k_m)^2} at m = 1
  double up = std::exp(-3.0 * wk * wk);  // ratio g(m+1)/g(m) at m = 1
  const double cs = std::cos(k1 * y), sn = std::sin(k1 * y);
  double c = cs, s = sn;
  double acc = 0.0;
  for (long m = 1; m <= m_max; ++m) {
    if ((m & 511) == 0) {
      const double ang = k1 * y * static_cast<double>(m);
      c = std::cos(ang);
      s = std::sin(ang);
      const double wkm = wk * static_cast<double>(m);
      gauss = std::exp(-wkm * wkm);
      up = std::exp(-(2.0 * static_cast<double>(m) + 1.0) * wk * wk);
    }
    acc += p.symbol(k1 * static_cast<double>(m)) * gauss * c;
    const double cn = c * cs - s * sn;
    s = s * cs + c * sn;
    c = cn;
    gauss *= up;
    up *= q2;
  }
  return -(2.0 / period) * acc;
}

double kernel_at_radius(const Multiplier& p, double y, double period) {
  // Three widths, Richardson in w^2 (the smoothing expands in even powers).
  const double ka = smoothed_kernel_sum(p, y, y / 8.0, period);
  const double kb = smoothed_kernel_sum(p, y, y / 16.0, period);
  const double kc = smoothed_kernel_sum(p, y, y / 32.0, period);
  const double r_ab = (4.0 * kb - ka) / 3.0;
  const double r_bc = (4.0 * kc - kb) / 3.0;
  return (16.0 * r_bc - r_ab) / 15.0;
}

// int_0^r dy / log(1 + y^-2); the integrand vanishes at 0 with a log-slow
// derivative. Panels are graded from r*1e-10; the truncated piece is below
// 1e-12 * r and ignored.
double detail_log_weight_integral(double r) {
  const auto f = [](double y) {
    return y > 0.0 ? 1.0 / std::log1p(1.0 / (y * y)) : 0.0;
  };
  return integrate_panels(f, graded_edges(r * 1e-10, r, r * 1e-10), 1e-13);
}

}  // namespace

KernelTable build_kernel_table(const Multiplier& p, const CutoffFunction& cutoff,
                               const KernelTable::BuildOptions& opts) {
  if (p.kind() != Multiplier::Kind::kLogSupercritical)
    throw std::invalid_argument("build_kernel_table: only the log-supercritical symbol");
  KernelTable t;
  t.cutoff_ = cutoff;
  t.symbol_ = p;
  t.period_ = opts.period;
  const double r_max = 0.5 * opts.period;
  t.radii_.resize(opts.num_radii);
  t.k_.resize(opts.num_radii);
  const double lr0 = std::log(opts.r_min), lr1 = std::log(r_max);
  for (std::size_t i = 0; i < opts.num_radii; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(opts.num_radii - 1);
    t.radii_[i] = std::exp(lr0 + f * (lr1 - lr0));
  }
  t.radii_.back() = r_max;
  for (std::size_t i = 0; i < opts.num_radii; ++i)
    t.k_[i] = kernel_at_radius(p, t.radii_[i], opts.period);

  // Fit the smallest two-sided comparison constant; the lower bound is only
  // required below the cutoff support edge.
  double c_up = 1.0, c_lo = 1.0;
  for (std::size_t i = 0; i < opts.num_radii; ++i) {
    const double y = t.radii_[i];
    const double comp = p.symbol(1.0 / y) / y;
    const double ratio = t.k_[i] / comp;
    if (ratio > 0.0) c_up = std::max(c_up, ratio);
    if (y < 2.0 * cutoff.sigma) {
      if (!(ratio > 0.0))
        throw ComparisonFailure("kernel not positive below 2*sigma at y=" +
                                std::to_string(y));
      c_lo = std::max(c_lo, 1.0 / ratio);
    }
  }
  t.c_bound_ = std::max(c_up, c_lo);
  if (!(t.c_bound_ <= opts.comparison_cap))
    throw ComparisonFailure("comparison constant exceeds cap: " +
                            std::to_string(t.c_bound_));

  // Spline moments in log-radius for interpolated evaluation.
  {
    std::vector<double> lr(t.radii_.size());
    for (std::size_t i = 0; i < lr.size(); ++i) lr[i] = std::log(t.radii_[i]);
    CubicSpline sp;
    sp.build(std::move(lr), t.k_);
    t.slopes_ = std::move(sp.m);
  }

  // Near-origin asymptote moment: K ~ c2 / (y^2 log(1+y^-2)) below the table.
  const double rm = t.radii_.front();
  const double c2 = t.k_.front() * rm * rm * std::log1p(1.0 / (rm * rm));
  t.mu2_ = c2 * detail_log_weight_integral(rm);
  return t;
}

double KernelTable::k_at(double y) const {
  y = std::fabs(y);
  if (y < radii_.front() * (1.0 - 1e-12) || y > radii_.back() * (1.0 + 1e-12))
    throw std::out_of_range("KernelTable::k_at: radius outside table");
  const double t = std::log(std::clamp(y, radii_.front(), radii_.back()));
  // Cubic spline segment evaluation in log-radius.
  const double lr0 = std::log(radii_.front());
  const double lr1 = std::log(radii_.back());
  const std::size_t n = radii_.size();
  const double step = (lr1 - lr0) / static_cast<double>(n - 1);
  std::size_t i = static_cast<std::size_t>(
      std::clamp((t - lr0) / step, 0.0, static_cast<double>(n - 2)));
  double xi = lr0 + step * static_cast<double>(i);
  // Guard against rounding at segment boundaries.
  if (t < xi && i > 0) {
    --i;
    xi -= step;
  } else if (t > xi + step && i < n - 2) {
    ++i;
    xi += step;
  }
  const double u = (xi + step - t) / step, v = (t - xi) / step;
  return u * k_[i] + v * k_[i + 1] +
         ((u * u * u - u) * slopes_[i] + (v * v * v - v) * slopes_[i + 1]) * step * step /
             6.0;
}

double KernelTable::minorant(double r) const {
  r = std::fabs(r);
  const double phi = cutoff_(r);
  if (phi == 0.0 || r == 0.0) return 0.0;
  return symbol_.symbol(1.0 / r) * phi / c_bound_;
}

double Minorant::operator()(double r) const {
  r = std::fabs(r);
  const double phi = cutoff(r);
  if (phi == 0.0 || r == 0.0) return 0.0;
  return Multiplier::log_supercritical().symbol(1.0 / r) * phi / c_norm;
}

Minorant minorant_constants(const KernelTable& table, const CutoffFunction& cutoff) {
  Minorant m;
  m.c_norm = table.c_bound();
  m.cutoff = cutoff;
  const double hi = 2.0 * cutoff.sigma;
  const double lo = table.r_min() / 10.0;
  const std::size_t n_scan = table.radii().size() * 10;
  std::vector<double> r(n_scan);
  const double l0 = std::log(lo), l1 = std::log(hi);
  for (std::size_t i = 0; i < n_scan; ++i)
    r[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) /
                             static_cast<double>(n_scan - 1));

  double c0 = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < n_scan; ++i) {
    const double v = r[i] * m(r[i]);
    if (v > c0) {
      c0 = v;
      arg = i;
    }
  }
  // Polish the grid maximum by golden-section between its neighbors.
  {
    double a = r[arg > 0 ? arg - 1 : arg];
    double b = r[std::min(arg + 1, n_scan - 1)];
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    for (int it = 0; it < 60; ++it) {
      if (x1 * m(x1) < x2 * m(x2)) {
        a = x1;
        x1 = x2;
        x2 = a + gr * (b - a);
      } else {
        b = x2;
        x2 = x1;
        x1 = b - gr * (b - a);
      }
    }
    c0 = std::max(c0, 0.5 * (a + b) * m(0.5 * (a + b)));
  }
  m.c0 = c0;

  auto non_increasing = [&](double a) {
    double prev = std::pow(r[0], a) * m(r[0]);
    for (std::size_t i = 1; i < n_scan; ++i) {
      const double cur = std::pow(r[i], a) * m(r[i]);
      if (cur > prev * (1.0 + 1e-12) + 1e-300) return false;
      prev = cur;
    }
    return true;
  };
  if (!non_increasing(1e-3))
    throw NoValidExponent("even a = 1e-3 fails; cutoff scale too large");
  if (non_increasing(1.0)) {
    m.a = 1.0;
    return m;
  }
  double good = 1e-3, bad = 1.0;
  while (bad - good > 1e-4) {
    const double mid = 0.5 * (good + bad);
    (non_increasing(mid) ? good : bad) = mid;
  }
  m.a = good;
  return m;
}

namespace {

double nonlocal_quadrature(const GridFunction& f, const KernelTable& table,
                           KernelPart part, double x, double abs_tol) {
  const double L = f.grid().length;
  if (std::fabs(L - table.period()) > 1e-12 * L)
    throw std::invalid_argument("apply_nonlocal: table period does not match grid");
  const auto kp = [&](double y) {
    switch (part) {
      case KernelPart::kFull:
        return table.k_at(y);
      case KernelPart::kNearField:
        return table.k1_at(y);
      case KernelPart::kFarField:
        return table.k2_at(y);
    }
    return 0.0;
  };
  const auto g = [&](double y) { return second_difference(f, x, y) * kp(y); };
  const double sigma = table.sigma();
  std::vector<double> edges;
  double w = table.r_min();
  double pos = w;
  edges.push_back(table.r_min());
  // Start one panel above r_min, growing geometrically; pin the cutoff kinks.
  while (pos < 0.5 * L) {
    w *= 4.0;
    pos = std::min(pos + w, 0.5 * L);
    edges.push_back(pos);
  }
  for (double brk : {sigma, 2.0 * sigma}) {
    if (brk > edges.front() && brk < edges.back()) edges.push_back(brk);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  double total = integrate_panels(g, edges, abs_tol);
  if (part != KernelPart::kFarField) {
    // Below-table correction: second differences ~ -f''(x) y^2.
    const GridFunction fxx = derivative(derivative(f));
    total += -fxx.sample(x) * table.near_field_moment();
  }
  return total;
}

}  // namespace

double apply_nonlocal(const GridFunction& f, const KernelTable& table, KernelPart part,
                      double x, double abs_tol) {
  return nonlocal_quadrature(f, table, part, x, abs_tol);
}

double apply_minorant_kernel(const GridFunction& f, const KernelTable& table, double x,
                             double abs_tol) {
  const auto g = [&](double y) { return second_difference(f, x, y) * table.minorant(y) / y; };
  const double sigma = table.sigma();
  std::vector<double> edges{table.r_min()};
  double w = table.r_min(), pos = w;
  while (pos < 2.0 * sigma) {
    w *= 4.0;
    pos = std::min(pos + w, 2.0 * sigma);
    edges.push_back(pos);
  }
  if (sigma > edges.front()) edges.push_back(sigma);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  double total = integrate_panels(g, edges, abs_tol);
  const GridFunction fxx = derivative(derivative(f));
  total += -fxx.sample(x) * detail_log_weight_integral(table.r_min()) / table.c_bound();
  return total;
}

}  // namespace hflow
