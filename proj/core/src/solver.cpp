#include "hflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "hflow/errors.hpp"
#include "hflow/spectral_ops.hpp"

namespace hflow {

namespace {

using cd = std::complex<double>;
using Spec = std::vector<cd>;

struct Stepper {
  const SolverConfig& cfg;
  std::vector<double> lambda;  // dissipation + viscous symbol per mode

  explicit Stepper(const SolverConfig& c) : cfg(c) {
    const std::size_t modes = cfg.grid.num_modes();
    lambda.resize(modes);
    for (std::size_t m = 0; m < modes; ++m) {
      const double k = cfg.grid.wavenumber(m);
      lambda[m] = cfg.dissipation.symbol(k) + cfg.epsilon * k * k;
    }
  }

  // Nonlinear term N(u) = dealias(F[(H theta) theta_x]) (+ forcing), as a
  // spectrum; optionally reports sup |H theta| for the CFL clock.
  Spec nonlinear(const Spec& u, double t, double* transport_sup) const {
    const std::size_t modes = u.size();
    Spec out(modes, cd(0.0));
    GridFunction hv;
    if (cfg.nonlinear) {
      Spec hu(modes), du(modes);
      const std::size_t half = cfg.grid.n / 2;
      for (std::size_t m = 0; m < modes; ++m) {
        const double k = cfg.grid.wavenumber(m);
        hu[m] = (m == 0 || m == half) ? cd(0.0) : u[m] * cd(0.0, -1.0);
        du[m] = (m == half) ? cd(0.0) : u[m] * cd(0.0, k);
      }
      hv = GridFunction::from_spectrum(cfg.grid, std::move(hu));
      auto dv = GridFunction::from_spectrum(cfg.grid, std::move(du));
      auto prod = dealias(multiply(hv, dv));
      out = prod.spectrum();
      if (transport_sup) *transport_sup = hv.sup_norm();
    } else if (transport_sup) {
      *transport_sup = 0.0;
    }
    if (cfg.forcing) {
      auto f = GridFunction::from_function(cfg.grid,
                                           [&](double x) { return cfg.forcing(x, t); });
      const auto& fs = f.spectrum();
      for (std::size_t m = 0; m < modes; ++m) out[m] += fs[m];
    }
    return out;
  }

  // One Lawson-RK4 step; the linear flow enters only through exponentials,
  // so disabling the nonlinearity decays each mode by exactly exp(-lambda dt).
  Spec advance(const Spec& u, double t, double dt, double* transport_sup) const {
    const std::size_t modes = u.size();
    std::vector<double> e_half(modes), e_full(modes);
    for (std::size_t m = 0; m < modes; ++m) {
      e_half[m] = std::exp(-0.5 * dt * lambda[m]);
      e_full[m] = e_half[m] * e_half[m];
    }
    const Spec k1 = nonlinear(u, t, transport_sup);
    Spec stage(modes);
    for (std::size_t m = 0; m < modes; ++m)
      stage[m] = e_half[m] * (u[m] + 0.5 * dt * k1[m]);
    const Spec k2 = nonlinear(stage, t + 0.5 * dt, nullptr);
    for (std::size_t m = 0; m < modes; ++m)
      stage[m] = e_half[m] * u[m] + 0.5 * dt * k2[m];
    const Spec k3 = nonlinear(stage, t + 0.5 * dt, nullptr);
    for (std::size_t m = 0; m < modes; ++m)
      stage[m] = e_full[m] * u[m] + dt * e_half[m] * k3[m];
    const Spec k4 = nonlinear(stage, t + dt, nullptr);
    Spec out(modes);
    for (std::size_t m = 0; m < modes; ++m) {
      out[m] = e_full[m] * u[m] +
               dt / 6.0 *
                   (e_full[m] * k1[m] + 2.0 * e_half[m] * (k2[m] + k3[m]) + k4[m]);
    }
    return out;
  }
};

bool finite(const Spec& u) {
  for (const auto& z : u)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

TimeStepReport make_report(const GridFunction& theta, double t, double dt,
                           double grad_l1t) {
  TimeStepReport r;
  r.t = t;
  r.dt = dt;
  r.sup_norm = theta.sup_norm();
  r.l2_norm = theta.l2_norm();
  r.grad_sup = grad_sup_norm(theta);
  r.grad_l1t = grad_l1t;
  r.tail_fraction = spectrum_tail_fraction(theta);
  return r;
}

}  // namespace

GridFunction step(const GridFunction& theta, const SolverConfig& cfg, double t,
                  double dt) {
  Stepper st(cfg);
  auto out = st.advance(theta.spectrum(), t, dt, nullptr);
  if (!finite(out)) throw StepRejected("step: non-finite state");
  return GridFunction::from_spectrum(cfg.grid, std::move(out));
}

RunOutput run(const GridFunction& theta0, const SolverConfig& cfg,
              const DiagnosticHook& hook) {
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw std::invalid_argument("run: cfl in (0,1)");
  if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("run: t_end must be >= 0");
  Stepper st(cfg);

  RunOutput out;
  Spec u = theta0.spectrum();
  double t = 0.0;
  double grad_l1t = 0.0;
  double prev_grad = grad_sup_norm(theta0);

  auto record = [&](double dt_used) {
    auto g = GridFunction::from_spectrum(cfg.grid, u);
    out.reports.push_back(make_report(g, t, dt_used, grad_l1t));
    if (hook) hook(out.reports.back(), g);
  };

  record(0.0);
  if (cfg.t_end == 0.0) {
    out.final_state = GridFunction::from_spectrum(cfg.grid, u);
    out.completed = true;
    return out;
  }

  const double h = cfg.grid.spacing();
  double next_report = cfg.record_dt > 0.0 ? cfg.record_dt : cfg.t_end;
  int rejections = 0;
  double dt_cap = cfg.dt_initial;

  while (t < cfg.t_end - 1e-14 * cfg.t_end) {
    double transport = 0.0;
    // CFL clock from the current transport speed, floored at 1.
    {
      GridFunction g = GridFunction::from_spectrum(cfg.grid, u);
      transport = cfg.nonlinear ? hilbert_transform(g).sup_norm() : 0.0;
    }
    double dt = cfg.adaptive ? cfg.cfl * h / std::max(1.0, transport) : cfg.dt_initial;
    dt = std::min(dt, dt_cap * 16.0);  // halvings decay geometrically
    dt = std::min(dt, next_report - t);
    dt = std::min(dt, cfg.t_end - t);
    if (!(dt > 0.0)) dt = 1e-15;

    Spec candidate = st.advance(u, t, dt, nullptr);
    bool ok = finite(candidate);
    while (!ok && rejections < 60) {
      ++rejections;
      dt *= 0.5;
      if (dt < 1e-15) break;
      candidate = st.advance(u, t, dt, nullptr);
      ok = finite(candidate);
    }
    if (!ok) {
      out.blowup_time = t;
      out.completed = false;
      out.final_state = GridFunction::from_spectrum(cfg.grid, u);
      // Final report at the stall point so callers see the last finite state.
      record(dt);
      return out;
    }
    dt_cap = dt;
    u = std::move(candidate);
    t += dt;
    {
      GridFunction g = GridFunction::from_spectrum(cfg.grid, u);
      const double cur_grad = grad_sup_norm(g);
      grad_l1t += 0.5 * dt * (prev_grad + cur_grad);
      prev_grad = cur_grad;
    }
    if (t >= next_report - 1e-12 * std::max(1.0, cfg.t_end)) {
      record(dt);
      next_report += cfg.record_dt > 0.0 ? cfg.record_dt : cfg.t_end;
    }
  }
  out.final_state = GridFunction::from_spectrum(cfg.grid, u);
  out.completed = true;
  if (out.reports.empty() || out.reports.back().t < t - 1e-12)
    out.reports.push_back(make_report(out.final_state, t, 0.0, grad_l1t));
  return out;
}

GradMonitor grad_sup_monitor(const Trajectory& traj) {
  GradMonitor m;
  for (const auto& r : traj) {
    m.max_grad_sup = std::max(m.max_grad_sup, r.grad_sup);
    m.grad_l1t = std::max(m.grad_l1t, r.grad_l1t);
  }
  return m;
}

}  // namespace hflow
