#include "hamport/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace hamport {

ImplicitMidpointStepper::ImplicitMidpointStepper(const FiniteModel& model,
                                                 double dt,
                                                 SimulateOptions opts)
    : model_(model), dt_(dt), opts_(opts) {
  require(dt > 0.0, "stepper: dt must be positive");
}

const ImplicitMidpointStepper::Level& ImplicitMidpointStepper::level(
    int halvings) {
  auto it = levels_.find(halvings);
  if (it != levels_.end()) return it->second;
  const double dt = dt_ / std::pow(2.0, halvings);
  Level lv;
  const int dim = model_.dim();
  lv.lu = Eigen::PartialPivLU<Mat>(Mat::Identity(dim, dim) -
                                   0.5 * dt * model_.A);
  if (model_.mc > 0) {
    Mat E = Mat::Zero(dim, model_.mc);
    E.bottomRows(model_.mc).setIdentity();
    lv.W = lv.lu.solve(E);
  }
  return levels_.emplace(halvings, std::move(lv)).first->second;
}

int ImplicitMidpointStepper::single_step(Vec& x, double t, double dt,
                                         const Level& lv) {
  const Vec d_mid = signal_->value(t + 0.5 * dt);
  const double scale = 1.0 + x.cwiseAbs().maxCoeff();
  const int nm = model_.nm();
  const int mc = model_.mc;

  Vec X = x;  // initial guess: previous state
  for (int iter = 0; iter < opts_.newton_max_iter; ++iter) {
    const Vec mid = 0.5 * (x + X);
    const Vec g = X - x - dt * model_.rhs(mid, d_mid);
    if (g.cwiseAbs().maxCoeff() <= opts_.newton_tol * scale) {
      x = X;
      return iter;
    }

    Vec b = lv.lu.solve(-g);
    if (mc > 0) {
      // Woodbury correction for the controller-row Jacobian block.
      const Mat Jr = model_.nonlinear_jacobian_rows(mid);  // mc x 2mc
      const double c = 0.5 * dt;
      Mat small = Mat::Identity(mc, mc);
      small -= c * Jr * lv.W.middleRows(nm, 2 * mc);
      const Vec rhs_small = c * (Jr * b.segment(nm, 2 * mc));
      b += lv.W * small.partialPivLu().solve(rhs_small);
    }
    X += b;
    if (!all_finite(X))
      throw step_failure("integrator: Newton iterate became non-finite");
  }
  // Final residual check after the last correction.
  const Vec mid = 0.5 * (x + X);
  const Vec g = X - x - dt * model_.rhs(mid, d_mid);
  if (g.cwiseAbs().maxCoeff() <= opts_.newton_tol * scale) {
    x = X;
    return opts_.newton_max_iter;
  }
  throw step_failure("integrator: Newton did not converge");
}

int ImplicitMidpointStepper::attempt(Vec& x, double t, double dt,
                                     int halvings) {
  try {
    Vec xloc = x;
    const int it = single_step(xloc, t, dt, level(halvings));
    x = xloc;
    return it;
  } catch (const step_failure&) {
    if (halvings >= opts_.max_halvings) throw;
    const int i1 = attempt(x, t, 0.5 * dt, halvings + 1);
    const int i2 = attempt(x, t + 0.5 * dt, 0.5 * dt, halvings + 1);
    return i1 + i2;
  }
}

int ImplicitMidpointStepper::step(Vec& x, double t, const DisturbanceSignal& d) {
  signal_ = &d;
  int iters = attempt(x, t, dt_, 0);
  // The converged state carries farther than the local truncation error; the
  // midpoint update is accepted as-is.
  signal_ = nullptr;
  return iters;
}

namespace {

void mid_step_bookkeeping(const FiniteModel& model, const Vec& x_prev,
                          const Vec& x_next, double t, double dt,
                          const DisturbanceSignal& d, double& dy,
                          double& residual) {
  const Vec mid = 0.5 * (x_prev + x_next);
  const Vec d_mid = d.value(t + 0.5 * dt);
  const Vec y_mid = model.output(mid);
  dy = dt * d_mid.dot(y_mid);
  residual = model.energy(x_next) - model.energy(x_prev) -
             dt * model.closed_form_rate(mid, d_mid);
}

}  // namespace

Trajectory simulate(const FiniteModel& model, const Vec& x0,
                    const DisturbanceSignal& d, double T, double dt,
                    const SimulateOptions& opts) {
  require(T > 0.0 && dt > 0.0 && dt <= T, "simulate: need 0 < dt <= T");
  require(x0.size() == model.dim(), "simulate: initial state size mismatch");
  require(d.channels() == model.k, "simulate: signal channel mismatch");
  const int steps = static_cast<int>(std::llround(T / dt));
  require(steps >= 1 && std::abs(steps * dt - T) <= 1e-9 * T,
          "simulate: T must be a multiple of dt");

  Trajectory traj;
  traj.times.resize(steps + 1);
  traj.energy_total.resize(steps + 1);
  traj.energy_plant.resize(steps + 1);
  traj.energy_ctrl.resize(steps + 1);
  traj.norm_state.resize(steps + 1);
  traj.outputs.resize(model.k, steps + 1);
  traj.dvalues.resize(model.k, steps + 1);
  traj.dnorm_sq.resize(steps + 1);
  traj.dy_step = Vec::Zero(steps);
  traj.dy_cum = Vec::Zero(steps + 1);
  traj.balance_residual = Vec::Zero(steps + 1);

  ImplicitMidpointStepper stepper(model, dt, opts);
  Vec x = x0;
  auto record = [&](int i) {
    traj.times[i] = i * dt;
    traj.energy_plant[i] = model.plant_energy(x);
    traj.energy_ctrl[i] = model.controller_energy(x);
    traj.energy_total[i] = traj.energy_plant[i] + traj.energy_ctrl[i];
    traj.norm_state[i] = model.norm_M(x);
    traj.outputs.col(i) = model.output(x);
    traj.dvalues.col(i) = d.value(traj.times[i]);
    traj.dnorm_sq[i] = d.norm_sq(traj.times[i]);
    if (opts.snapshot_stride > 0 && i % opts.snapshot_stride == 0) {
      traj.snapshots.push_back(x);
      traj.snapshot_steps.push_back(i);
    }
  };
  record(0);

  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    Vec x_prev = x;
    try {
      const int iters = stepper.step(x, t, d);
      traj.newton_total += iters;
      traj.newton_max = std::max(traj.newton_max, iters);
    } catch (const step_failure&) {
      traj.status = Trajectory::Status::StepFailure;
      traj.failure_time = t;
      traj.times.conservativeResize(i + 1);
      traj.energy_total.conservativeResize(i + 1);
      traj.energy_plant.conservativeResize(i + 1);
      traj.energy_ctrl.conservativeResize(i + 1);
      traj.norm_state.conservativeResize(i + 1);
      traj.outputs.conservativeResize(model.k, i + 1);
      traj.dvalues.conservativeResize(model.k, i + 1);
      traj.dnorm_sq.conservativeResize(i + 1);
      traj.dy_step.conservativeResize(i);
      traj.dy_cum.conservativeResize(i + 1);
      traj.balance_residual.conservativeResize(i + 1);
      break;
    }
    double dy = 0.0, residual = 0.0;
    mid_step_bookkeeping(model, x_prev, x, t, dt, d, dy, residual);
    traj.dy_step[i] = dy;
    traj.dy_cum[i + 1] = traj.dy_cum[i] + dy;
    traj.balance_residual[i + 1] = residual;
    record(i + 1);
  }
  traj.final_state = x;
  return traj;
}

const Vec& Trajectory::state_at_step(int step) const {
  for (std::size_t i = 0; i < snapshot_steps.size(); ++i)
    if (snapshot_steps[i] == step) return snapshots[i];
  throw input_error("trajectory: no snapshot stored at the requested step");
}

double cocycle_check(const FiniteModel& model, const Vec& x0,
                     const DisturbanceSignal& d, double s, double t, double dt,
                     const SimulateOptions& opts) {
  require(dt > 0.0 && s >= 0.0 && t >= 0.0, "cocycle: bad times");
  const auto steps_of = [&](double u) {
    const auto n = static_cast<long long>(std::llround(u / dt));
    if (std::abs(n * dt - u) > 1e-9 * std::max(1.0, u))
      throw alignment_error("cocycle: times must be multiples of dt");
    return n;
  };
  const long long ns = steps_of(s);
  const long long nt = steps_of(t);

  ImplicitMidpointStepper stepA(model, dt, opts);
  Vec x = x0;
  Vec x_at_s = x0;
  for (long long i = 0; i < ns + nt; ++i) {
    if (i == ns) x_at_s = x;
    stepA.step(x, i * dt, d);
  }
  if (nt == 0) x_at_s = x;

  const DisturbanceSignal dshift = d.shifted(s);
  ImplicitMidpointStepper stepB(model, dt, opts);
  Vec xb = x_at_s;
  for (long long j = 0; j < nt; ++j) stepB.step(xb, j * dt, dshift);

  Vec diff = xb - x;
  return model.norm_M(diff);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("trajectory csv: cannot open " + path);
  const int k = static_cast<int>(traj.outputs.rows());
  out << "t,E_total,E_plant,E_ctrl,norm_state";
  for (int c = 1; c <= k; ++c) out << ",y_" << c;
  for (int c = 1; c <= k; ++c) out << ",d_" << c;
  out << ",balance_residual\n";
  char buf[32];
  auto put = [&](double v, bool lead_comma = true) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (lead_comma) out << ',';
    out << buf;
  };
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    put(traj.times[i], false);
    put(traj.energy_total[i]);
    put(traj.energy_plant[i]);
    put(traj.energy_ctrl[i]);
    put(traj.norm_state[i]);
    for (int c = 0; c < k; ++c) put(traj.outputs(c, i));
    for (int c = 0; c < k; ++c) put(traj.dvalues(c, i));
    put(traj.balance_residual[i]);
    out << '\n';
  }
}

}  // namespace hamport
