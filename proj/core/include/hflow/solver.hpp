#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hflow/grid.hpp"
#include "hflow/multiplier.hpp"

namespace hflow {

/// Time integration setup for theta_t = (H theta) theta_x - L theta + eps
/// theta_xx. The dissipation symbol and the viscous term are integrated
/// exactly in Fourier space; the transport term advances with a 4-stage
/// Runge-Kutta rule inside the exponential (Lawson) framework.
struct SolverConfig {
  PeriodicGrid grid{1024};
  Multiplier dissipation = Multiplier::fractional(0.25);
  double epsilon = 0.0;    // viscous regularization coefficient
  double dt_initial = 1e-3;
  double cfl = 0.4;        // Courant factor in (0,1)
  double t_end = 1.0;
  double record_dt = 0.05;  // diagnostic cadence (time units)
  bool adaptive = true;     // false: fixed dt_initial steps (testing)
  bool nonlinear = true;    // false: pure linear decay (testing)
  /// Optional forcing f(x, t) added to the right-hand side.
  std::function<double(double, double)> forcing;
};

struct TimeStepReport {
  double t = 0.0;
  double dt = 0.0;
  double sup_norm = 0.0;
  double l2_norm = 0.0;
  double grad_sup = 0.0;
  double grad_l1t = 0.0;       // running integral of ||theta_x||_inf dt
  double tail_fraction = 0.0;  // spectral energy fraction near the cutoff
};

using Trajectory = std::vector<TimeStepReport>;

struct RunOutput {
  Trajectory reports;
  GridFunction final_state;
  bool completed = false;
  std::optional<double> blowup_time;  // set when dt collapsed to nothing
};

/// Report + state callback invoked at every diagnostic time.
using DiagnosticHook = std::function<void(const TimeStepReport&, const GridFunction&)>;

/// One Lawson step of size dt from time t. Throws StepRejected if the
/// result is not finite.
GridFunction step(const GridFunction& theta, const SolverConfig& cfg, double t,
                  double dt);

/// Advance theta0 to t_end with CFL-adaptive steps clipped to the diagnostic
/// grid. On persistent step rejection the run stops early and the output
/// carries the last finite state and the rejection time.
RunOutput run(const GridFunction& theta0, const SolverConfig& cfg,
              const DiagnosticHook& hook = {});

/// Running maximum and time-integral of ||theta_x||_inf over a trajectory.
struct GradMonitor {
  double max_grad_sup = 0.0;
  double grad_l1t = 0.0;
};
GradMonitor grad_sup_monitor(const Trajectory& traj);

}  // namespace hflow
