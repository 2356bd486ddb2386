#pragma once

#include "hamport/discretize.hpp"
#include "hamport/signals.hpp"

#include <Eigen/LU>

#include <map>
#include <optional>
#include <vector>

namespace hamport {

struct SimulateOptions {
  double newton_tol = 1e-12;  // relative to (1 + |x|_inf)
  int newton_max_iter = 25;
  int max_halvings = 10;
  int snapshot_stride = 1;  // full-state snapshots every this many steps
};

// Implicit midpoint step with Newton iteration. The Jacobian differs from the
// constant I - dt/2 A only in the mc controller rows, so each iteration costs
// one back-substitution plus a small Woodbury correction.
class ImplicitMidpointStepper {
 public:
  ImplicitMidpointStepper(const FiniteModel& model, double dt,
                          SimulateOptions opts = {});

  // Advances x from t to t + dt; returns Newton iterations used. Internally
  // halves the step (up to max_halvings) if Newton fails to converge.
  int step(Vec& x, double t, const DisturbanceSignal& d);

  double dt() const { return dt_; }

 private:
  struct Level {
    Eigen::PartialPivLU<Mat> lu;   // I - dt/2 A
    Mat W;                         // lu^{-1} * controller-row selector
  };
  const Level& level(int halvings);
  int single_step(Vec& x, double t, double dt, const Level& lv);
  int attempt(Vec& x, double t, double dt, int halvings);

  const FiniteModel& model_;
  double dt_;
  SimulateOptions opts_;
  std::map<int, Level> levels_;
  const DisturbanceSignal* signal_ = nullptr;
};

struct Trajectory {
  enum class Status { Ok, StepFailure };

  Vec times;
  Vec energy_total, energy_plant, energy_ctrl, norm_state;
  Mat outputs;   // k x (steps+1), y at sample times
  Mat dvalues;   // k x (steps+1), d at sample times
  Vec dnorm_sq;  // exact ||d||^2_{[0,t_i]}
  Vec dy_step;   // per-step midpoint quadrature of d^T y (size steps)
  Vec dy_cum;    // cumulative integral of d^T y at samples
  Vec balance_residual;  // per-step energy identity residual (index i+1)

  std::vector<Vec> snapshots;      // full states every snapshot_stride steps
  std::vector<int> snapshot_steps;
  Vec final_state;

  long newton_total = 0;
  int newton_max = 0;
  Status status = Status::Ok;
  double failure_time = 0.0;

  int steps() const { return static_cast<int>(times.size()) - 1; }
  double dt() const { return times[1] - times[0]; }
  // Snapshot of the state at a step index (must be on the stride).
  const Vec& state_at_step(int step) const;
};

// Integrates the semidiscrete closed loop on the uniform grid t_i = i dt,
// i = 0..round(T/dt), with midpoint sampling of the disturbance.
Trajectory simulate(const FiniteModel& model, const Vec& x0,
                    const DisturbanceSignal& d, double T, double dt,
                    const SimulateOptions& opts = {});

// Flow-composition discrepancy |x(t+s; x0, d) - x(t; x(s; x0, d), d(s+.))|_M.
// s and t must be multiples of dt.
double cocycle_check(const FiniteModel& model, const Vec& x0,
                     const DisturbanceSignal& d, double s, double t, double dt,
                     const SimulateOptions& opts = {});

// Trajectory CSV with the full 17-significant-digit rendering:
// t, E_total, E_plant, E_ctrl, norm_state, y_1..y_k, d_1..d_k,
// balance_residual.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace hamport
