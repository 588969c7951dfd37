#include "hflow/obedience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "hflow/spectral_ops.hpp"

namespace hflow {

namespace {

// Max/min over blocks of 2^level consecutive samples, all levels.
struct Pyramid {
  std::size_t n = 0;
  std::vector<std::vector<double>> maxs, mins;

  explicit Pyramid(const std::vector<double>& v) : n(v.size()) {
    maxs.push_back(v);
    mins.push_back(v);
    while (maxs.back().size() > 1) {
      const auto& pm = maxs.back();
      const auto& pn = mins.back();
      const std::size_t m = (pm.size() + 1) / 2;
      std::vector<double> nm(m), nn(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t a = 2 * i, b = std::min(2 * i + 1, pm.size() - 1);
        nm[i] = std::max(pm[a], pm[b]);
        nn[i] = std::min(pn[a], pn[b]);
      }
      maxs.push_back(std::move(nm));
      mins.push_back(std::move(nn));
    }
  }
};

struct Block {
  std::size_t start;  // sample index of first element
  int level;          // block spans 2^level samples
};

struct ScanState {
  const Pyramid& pyr;
  const std::function<double(double)>& omega;
  double h;
  double length;
  std::size_t n;
  double best_gap;
  std::size_t best_i, best_j;

  double ring_dist(double a, double b) const {
    double d = std::fabs(a - b);
    return std::min(d, length - d);
  }

  // Smallest ring distance between indices of two blocks, at least h for
  // distinct indices.
  double block_min_dist(const Block& a, const Block& b) const {
    const double wa = static_cast<double>(std::size_t{1} << a.level) - 1.0;
    const double wb = static_cast<double>(std::size_t{1} << b.level) - 1.0;
    const double ca = static_cast<double>(a.start) + 0.5 * wa;
    const double cb = static_cast<double>(b.start) + 0.5 * wb;
    double d = std::fabs(ca - cb);
    d = std::min(d, static_cast<double>(n) - d);
    const double gap = d - 0.5 * wa - 0.5 * wb;
    return h * std::max(gap, 1.0);
  }

  double block_max(const Block& b) const { return pyr.maxs[b.level][b.start >> b.level]; }
  double block_min(const Block& b) const { return pyr.mins[b.level][b.start >> b.level]; }

  void leaf(std::size_t i, std::size_t j) {
    if (i == j) return;
    const double d = ring_dist(h * static_cast<double>(i), h * static_cast<double>(j));
    const double g = pyr.maxs[0][i] - pyr.maxs[0][j] - omega(d);
    if (g > best_gap) {
      best_gap = g;
      best_i = i;
      best_j = j;
    }
  }

  void visit(const Block& a, const Block& b) {
    if (a.level == 0 && b.level == 0) {
      leaf(a.start, b.start);
      return;
    }
    const double ub = block_max(a) - block_min(b) - omega(block_min_dist(a, b));
    if (ub <= best_gap) return;
    // Split the larger block; prefer children with the better bound first.
    if (a.level >= b.level) {
      const std::size_t half = std::size_t{1} << (a.level - 1);
      Block a1{a.start, a.level - 1};
      Block a2{a.start + half, a.level - 1};
      if (a2.start >= n) {
        visit(a1, b);
        return;
      }
      if (block_max(a1) >= block_max(a2)) {
        visit(a1, b);
        visit(a2, b);
      } else {
        visit(a2, b);
        visit(a1, b);
      }
    } else {
      const std::size_t half = std::size_t{1} << (b.level - 1);
      Block b1{b.start, b.level - 1};
      Block b2{b.start + half, b.level - 1};
      if (b2.start >= n) {
        visit(a, b1);
        return;
      }
      if (block_min(b1) <= block_min(b2)) {
        visit(a, b1);
        visit(a, b2);
      } else {
        visit(a, b2);
        visit(a, b1);
      }
    }
  }
};

}  // namespace

BreakthroughReport check_obedience_fn(const GridFunction& theta,
                                      const std::function<double(double)>& omega,
                                      double tolerance) {
  const auto& v = theta.values();
  const std::size_t n = v.size();
  const double h = theta.grid().spacing();
  const double L = theta.grid().length;
  Pyramid pyr(v);

  ScanState st{pyr, omega, h, L, n, -std::numeric_limits<double>::infinity(), 0, 0};

  // Seed with a sweep over a geometric set of lags plus the global extrema
  // pair; a good seed makes the pyramid pruning bite immediately.
  for (std::size_t m = 1; m <= n / 2; m = std::max(m + 1, m + m / 4)) {
    const double w = omega(std::min(h * static_cast<double>(m),
                                    L - h * static_cast<double>(m)));
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + m < n ? i + m : i + m - n;
      if (v[j] - v[i] - w > st.best_gap) {
        st.best_gap = v[j] - v[i] - w;
        st.best_i = j;
        st.best_j = i;
      }
      if (v[i] - v[j] - w > st.best_gap) {
        st.best_gap = v[i] - v[j] - w;
        st.best_i = i;
        st.best_j = j;
      }
    }
  }

  int top = 0;
  while ((std::size_t{1} << (top + 1)) <= n) ++top;
  st.visit(Block{0, top}, Block{0, top});

  // Refine in the separation through the fixed midpoint, then midpoint.
  const double x0 = h * static_cast<double>(st.best_i);
  const double y0 = h * static_cast<double>(st.best_j);
  const double dx = std::remainder(x0 - y0, L);  // signed ring offset
  const double sgn = dx >= 0.0 ? 1.0 : -1.0;
  double xi = std::fabs(dx);
  double mid = y0 + 0.5 * dx;

  const auto pair_gap = [&](double m_, double xi_) {
    return theta.sample(m_ + sgn * 0.5 * xi_) - theta.sample(m_ - sgn * 0.5 * xi_) -
           omega(xi_);
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int round = 0; round < 3; ++round) {
    // Golden-section maximize over xi in [xi-2h, xi+2h] (clamped).
    double a = std::max(0.25 * h, xi - 2.0 * h), b = std::min(0.5 * L, xi + 2.0 * h);
    for (int it = 0; it < 48; ++it) {
      const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      if (pair_gap(mid, x1) < pair_gap(mid, x2))
        a = x1;
      else
        b = x2;
    }
    xi = 0.5 * (a + b);
    // Same over the midpoint.
    a = mid - h;
    b = mid + h;
    for (int it = 0; it < 48; ++it) {
      const double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
      if (pair_gap(x1, xi) < pair_gap(x2, xi))
        a = x1;
      else
        b = x2;
    }
    mid = 0.5 * (a + b);
  }

  BreakthroughReport rep;
  const double refined = pair_gap(mid, xi);
  if (refined >= st.best_gap) {
    rep.x = mid + sgn * 0.5 * xi;
    rep.y = mid - sgn * 0.5 * xi;
    rep.gap = refined;
    rep.xi = xi;
  } else {
    rep.x = h * static_cast<double>(st.best_i);
    rep.y = h * static_cast<double>(st.best_j);
    rep.gap = st.best_gap;
    rep.xi = theta.grid().ring_distance(rep.x, rep.y);
  }
  const GridFunction dtheta = derivative(theta);
  rep.slope_x = dtheta.sample(std::fmod(rep.x + L, L));
  rep.slope_y = dtheta.sample(std::fmod(rep.y + L, L));
  rep.status = rep.gap < -tolerance ? ObedienceStatus::kObeys
               : rep.gap <= tolerance ? ObedienceStatus::kCritical
                                      : ObedienceStatus::kViolated;
  return rep;
}

double holder_seminorm(const GridFunction& theta, double beta) {
  const auto& v = theta.values();
  const std::size_t n = v.size();
  const double h = theta.grid().spacing();
  const double L = theta.grid().length;
  double best = 0.0;
  for (std::size_t m = 1; m <= n / 2; ++m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + m < n ? i + m : i + m - n;
      worst = std::max(worst, std::fabs(v[j] - v[i]));
    }
    const double d = std::min(h * static_cast<double>(m), L - h * static_cast<double>(m));
    best = std::max(best, worst / std::pow(d, beta));
  }
  return best;
}

}  // namespace hflow
