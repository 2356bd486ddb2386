// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are pinned in the assertions below.

#include "hamport/conditions.hpp"
#include "hamport/diagnostics.hpp"
#include "hamport/models.hpp"
#include "hamport/rng.hpp"
#include "support/oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

using namespace hamport;
namespace cond = hamport::conditions;

namespace {

struct Criterion {
  int number;
  std::string label;
  bool pass = false;
  std::string details;
  double seconds = 0.0;
};

double elapsed(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

char buf[512];

// ---------------------------------------------------------------- criterion 1
Criterion structural_certification() {
  Criterion c{1, "structural certification (string and beam presets)"};
  const auto t0 = std::chrono::steady_clock::now();

  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  const auto beam = timoshenko_beam(1.0, 1.0, 1.0, 1.0, 0.0, 1.0);

  const auto ss = cond::check_structure(string);
  const auto sb = cond::check_structure(beam);
  const auto rs = cond::check_surjectivity(string);
  const auto rb = cond::check_surjectivity(beam);
  const auto is = cond::check_impedance_passivity(string, 12, 400, 101, 1e-6);
  const auto ib = cond::check_impedance_passivity(beam, 12, 400, 103, 1e-6);

  c.seconds = elapsed(t0);
  const bool ok = ss.verdict == cond::Verdict::Pass &&
                  sb.verdict == cond::Verdict::Pass && rs.rank == 3 &&
                  rb.rank == 6 && is.energy_preserving &&
                  ib.energy_preserving && is.max_abs_residual < 1e-6 &&
                  ib.max_abs_residual < 1e-6;
  c.pass = ok && c.seconds < 5.0;
  std::snprintf(buf, sizeof buf,
                "ranks %d/%d, preserving residuals %.2e/%.2e, %.2fs", rs.rank,
                rb.rank, is.max_abs_residual, ib.max_abs_residual, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 2
Criterion observability_oracle() {
  Criterion c{2, "boundary observability constant vs brute-force oracle"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);

  const double kb =
      cond::boundary_observability_constant(string, cond::Endpoint::Right);
  const double ka =
      cond::boundary_observability_constant(string, cond::Endpoint::Left);
  const double kb_bf =
      test_oracles::kappa_bruteforce(string, true, 100000, 211);
  const double ka_bf =
      test_oracles::kappa_bruteforce(string, false, 100000, 211);

  c.seconds = elapsed(t0);
  const bool ok = std::abs(kb - 1.0) < 1e-9 && std::abs(ka) < 1e-9 &&
                  std::abs(kb - kb_bf) < 1e-6 && std::abs(ka - ka_bf) < 1e-6;
  c.pass = ok && c.seconds < 2.0;
  std::snprintf(buf, sizeof buf,
                "kappa_b=%.9f (oracle %.9f), kappa_a=%.2e (oracle %.2e), %.2fs",
                kb, kb_bf, ka, ka_bf, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 3
Criterion spectrum_oracle() {
  Criterion c{3, "detached-string spectrum vs analytic frequencies"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  const auto model = discretize_plant(string, 200);
  const auto ev = discrete_generator_spectrum(model);

  std::vector<double> freqs;
  for (const auto& l : ev)
    if (std::abs(l.real()) < 1e-3 && l.imag() > 1e-6)
      freqs.push_back(l.imag());
  std::sort(freqs.begin(), freqs.end());

  bool ok = freqs.size() >= 5;
  double worst = 0.0;
  for (int j = 0; j < 5 && ok; ++j) {
    const double exact = (2 * j + 1) * M_PI / 2.0;
    worst = std::max(worst, std::abs(freqs[j] - exact) / exact);
  }
  ok = ok && worst < 0.01;
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 10.0;
  std::snprintf(buf, sizeof buf, "worst relative error %.3e over j=1..5, %.2fs",
                worst, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 4
Criterion discrete_dissipation_identity() {
  Criterion c{4, "semidiscrete balance and trajectory dissipation"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);

  double worst_balance = 0.0;
  double worst_ratio = 0.0;
  bool ok = true;
  int seed = 400;
  for (const char* name :
       {"linear_pd", "quartic_pd", "saturating_damper_pd"}) {
    ControllerParams params;
    params.mc = params.k = 1;
    const auto ctrl = controller_library(name, params);
    const auto model = discretize_closed_loop(string, ctrl, 200);

    const auto bal = verify_semidiscrete_balance(model, 50, ++seed);
    worst_balance = std::max(worst_balance, bal.boundary_residual);
    ok = ok && bal.boundary_residual < 1e-10;

    const Vec x0 = random_smooth_state(model, ++seed, 1.0);
    SimulateOptions opts;
    opts.snapshot_stride = 0;
    const auto traj =
        simulate(model, x0, DisturbanceSignal::zero(1), 20.0, 1e-3, opts);
    const double res = dissipation_residual(traj);
    const double e0 = traj.energy_total[0];
    worst_ratio = std::max(worst_ratio, res / e0);
    ok = ok && traj.status == Trajectory::Status::Ok && res < 1e-8 * e0;
  }
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 60.0;
  std::snprintf(buf, sizeof buf,
                "max balance residual %.2e, max dissipation/E0 %.2e, %.1fs",
                worst_balance, worst_ratio, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 5
Criterion ugs_energy_bound() {
  Criterion c{5, "energy growth bound E(0) + ||d||^2/4 at sigma = 1"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  const char* names[3] = {"linear_pd", "quartic_pd", "saturating_damper_pd"};

  const int n = 64;
  const double dt = 2e-3;
  const double T = 8.0;
  Rng rng(500);
  double worst_margin = 1e300;
  bool ok = true;

  std::vector<FiniteModel> models;
  for (int i = 0; i < 3; ++i) {
    ControllerParams params;
    params.mc = params.k = 1;  // S_c defaults to 1, so sigma = 1
    models.push_back(discretize_closed_loop(
        string, controller_library(names[i], params), n));
  }

  for (int run = 0; run < 100; ++run) {
    const FiniteModel& model = models[run % 3];
    const Vec x0 =
        random_smooth_state(model, rng.fork_seed(), rng.uniform(0.2, 1.5));
    DisturbanceSignal d = DisturbanceSignal::zero(1);
    const double amp = rng.uniform(0.2, 2.0);
    // durations snap to the step grid so the exact prefix norm dominates the
    // midpoint quadrature of the injected power
    const double dur =
        std::max(1, static_cast<int>(rng.uniform(100, 1000))) * dt;
    switch (run % 5) {
      case 0:
        break;  // zero signal
      case 1:
        d = DisturbanceSignal::truncated_step((Vec(1) << amp).finished(), dur);
        break;
      case 2:
        d = DisturbanceSignal::exp_decay((Vec(1) << amp).finished(),
                                         rng.uniform(0.5, 3.0));
        break;
      case 3: {
        const double cell = 10.0 * dt;
        const int cells = std::max(1, static_cast<int>(rng.uniform(10, 100)));
        d = DisturbanceSignal::windowed_noise(1, amp, 0.0, cells * cell, cell,
                                              rng.fork_seed());
        break;
      }
      case 4: {
        const double cell = 10.0 * dt;
        const int cells = std::max(1, static_cast<int>(rng.uniform(10, 50)));
        d = DisturbanceSignal::concat(
            DisturbanceSignal::truncated_step((Vec(1) << amp).finished(), dur),
            DisturbanceSignal::windowed_noise(1, 0.5 * amp, 0.0, cells * cell,
                                              cell, rng.fork_seed()),
            dur);
        break;
      }
    }
    SimulateOptions opts;
    opts.snapshot_stride = 0;
    const auto traj = simulate(model, x0, d, T, dt, opts);
    const double margin = ugs_margin(traj, 1.0);
    const double scale = traj.energy_total[0] + d.norm_sq_total() / 4.0 + 1.0;
    worst_margin = std::min(worst_margin, margin / scale);
    ok = ok && traj.status == Trajectory::Status::Ok &&
         margin >= -1e-8 * scale;
  }
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 300.0;
  std::snprintf(buf, sizeof buf, "100 runs, worst margin/scale %.2e, %.1fs",
                worst_margin, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 6
Criterion iss_contraction_regime() {
  Criterion c{6, "contraction and combined transient/gain bound"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  ControllerParams params;
  params.mc = params.k = 1;
  const auto ctrl = controller_library("linear_pd", params);

  cond::ConditionOptions copts;
  copts.seed = 600;
  const auto report = cond::run_all_conditions(string, ctrl, copts);
  bool ok = report.uniform_iss_hypotheses;

  const int n = 100;
  const double dt = 1e-3;
  const double horizon = 40.0;
  const double tau = 5.0;
  const auto model = discretize_closed_loop(string, ctrl, n);

  std::vector<Vec> x0s;
  for (int i = 0; i < 20; ++i)
    x0s.push_back(random_smooth_state(model, 601 + i, 1.0));

  const auto fit = fit_contraction(model, x0s, horizon, tau, dt);
  ok = ok && fit.contracting && fit.runs == 20;
  for (double b : fit.per_run_beta) ok = ok && b < 1.0;

  // undisturbed energy must fall below 1e-6 E(0) within the horizon
  SimulateOptions opts;
  opts.snapshot_stride = 0;
  double worst_tail = 0.0;
  for (const Vec& x0 : x0s) {
    const auto traj =
        simulate(model, x0, DisturbanceSignal::zero(1), horizon, dt, opts);
    const double floor_ratio =
        traj.energy_total.minCoeff() / traj.energy_total[0];
    worst_tail = std::max(worst_tail, floor_ratio);
  }
  ok = ok && worst_tail < 1e-6;

  // disturbed runs against the combined transient + gain bound
  Vec radii(7);
  radii << 0.1, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0;
  const auto eq = norm_equivalence(model, 300, radii, 631);
  const double C = 1.0 / (4.0 * ctrl.sigma) + 0.01;
  Rng rng(641);
  double worst_margin = 1e300;
  for (const Vec& x0 : x0s) {
    const double amp = rng.uniform(0.3, 1.5);
    const double dur =
        std::max(1, static_cast<int>(rng.uniform(250, 2000))) * dt;
    const auto d =
        DisturbanceSignal::truncated_step((Vec(1) << amp).finished(), dur);
    const auto traj = simulate(model, x0, d, horizon, dt, opts);
    const double margin = iss_bound_margin(traj, fit.beta, fit.tau, eq, C);
    const double scale = 1.0 + traj.norm_state[0];
    worst_margin = std::min(worst_margin, margin / scale);
    ok = ok && margin >= -1e-6 * scale;
  }
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 600.0;
  std::snprintf(
      buf, sizeof buf,
      "beta=%.3g tau=%.1f, worst undisturbed tail %.2e, worst margin %.2e, "
      "%.1fs",
      fit.beta, fit.tau, worst_tail, worst_margin, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 7
Criterion weak_iss_regime() {
  Criterion c{7, "weak regime: convergence to zero with saturating damper"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  ControllerParams params;
  params.mc = params.k = 1;
  const auto ctrl = controller_library("saturating_damper_pd", params);

  cond::ConditionOptions copts;
  copts.seed = 700;
  const auto report = cond::run_all_conditions(string, ctrl, copts);
  bool ok = report.weak_iss_hypotheses;

  const int n = 100;
  const double dt = 2e-3;
  const double horizon = 80.0;
  const auto model = discretize_closed_loop(string, ctrl, n);
  SimulateOptions opts;
  opts.snapshot_stride = 0;

  Rng rng(701);
  int converged = 0;
  double worst_time = 0.0;
  for (int run = 0; run < 20; ++run) {
    const Vec x0 = random_smooth_state(model, rng.fork_seed(), 1.0);
    DisturbanceSignal d = DisturbanceSignal::zero(1);
    const double amp = rng.uniform(0.2, 1.0);
    const double dur =
        std::max(1, static_cast<int>(rng.uniform(100, 500))) * dt;
    switch (run % 3) {
      case 0:
        d = DisturbanceSignal::truncated_step((Vec(1) << amp).finished(), dur);
        break;
      case 1:
        d = DisturbanceSignal::exp_decay((Vec(1) << amp).finished(),
                                         rng.uniform(1.0, 3.0));
        break;
      case 2: {
        const double cell = 10.0 * dt;
        const int cells = std::max(1, static_cast<int>(rng.uniform(5, 50)));
        d = DisturbanceSignal::windowed_noise(1, amp, 0.0, cells * cell, cell,
                                              rng.fork_seed());
        break;
      }
    }
    const auto traj = simulate(model, x0, d, horizon, dt, opts);
    const auto tc = convergence_time(traj, 1e-3 * traj.norm_state[0]);
    if (traj.status == Trajectory::Status::Ok && tc) {
      ++converged;
      worst_time = std::max(worst_time, *tc);
    }
  }
  ok = ok && converged == 20;
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 600.0;
  std::snprintf(buf, sizeof buf, "%d/20 converged, worst time %.1f, %.1fs",
                converged, worst_time, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 8
Criterion solution_map_contracts() {
  Criterion c{8, "cocycle, causality, and continuity of the solution map"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  ControllerParams params;
  params.mc = params.k = 1;
  const auto model = discretize_closed_loop(
      string, controller_library("linear_pd", params), 64);
  const double dt = 1e-3;
  Rng rng(800);

  bool ok = true;
  double worst_cocycle = 0.0;
  double worst_ratio_growth = 0.0;
  for (int run = 0; run < 10; ++run) {
    const Vec x0 = random_smooth_state(model, rng.fork_seed(), 1.0);
    const auto noise = DisturbanceSignal::windowed_noise(
        1, rng.uniform(0.3, 1.0), 0.0, 1.0, dt, rng.fork_seed());

    // cocycle on the aligned tabulated signal
    const double disc = cocycle_check(model, x0, noise, 1.0, 1.0, dt);
    worst_cocycle = std::max(worst_cocycle, disc);
    ok = ok && disc < 1e-12;

    // causality: truncating the future leaves [0, tc] bit-exact
    SimulateOptions sopts;
    sopts.snapshot_stride = 100;
    const double tc = 1.0;
    const auto t1 = simulate(model, x0, noise, 2.0, dt, sopts);
    const auto t2 = simulate(model, x0, noise.truncated(tc), 2.0, dt, sopts);
    for (std::size_t s = 0; s < t1.snapshots.size(); ++s) {
      if (t1.snapshot_steps[s] * dt > tc + 1e-12) break;
      ok = ok && std::memcmp(t1.snapshots[s].data(), t2.snapshots[s].data(),
                             sizeof(double) * model.dim()) == 0;
    }

    // continuity: ratio distance/perturbation stays bounded under 10x shrink
    const Vec dx = random_smooth_state(model, rng.fork_seed(), 1.0);
    auto ratio = [&](double eps) {
      const auto d1 = DisturbanceSignal::truncated_step(
          (Vec(1) << 1.0).finished(), 0.5);
      const auto d2 = DisturbanceSignal::truncated_step(
          (Vec(1) << 1.0 + eps).finished(), 0.5);
      const auto ta = simulate(model, x0, d1, 1.0, dt, sopts);
      const auto tb = simulate(model, Vec(x0 + eps * dx), d2, 1.0, dt, sopts);
      double dist = 0.0;
      for (int i = 0; i <= ta.steps(); ++i)
        dist = std::max(dist, std::abs(ta.norm_state[i] - tb.norm_state[i]));
      return dist / (eps * dx.norm() + eps * std::sqrt(0.5));
    };
    const double r1 = ratio(1e-3);
    const double r2 = ratio(1e-4);
    worst_ratio_growth = std::max(worst_ratio_growth, r2 / r1);
    ok = ok && r2 < 2.0 * r1 + 1e-9;
  }
  c.seconds = elapsed(t0);
  c.pass = ok && c.seconds < 120.0;
  std::snprintf(buf, sizeof buf,
                "worst cocycle %.2e, worst continuity-ratio growth %.3f, %.1fs",
                worst_cocycle, worst_ratio_growth, c.seconds);
  c.details = buf;
  return c;
}

// ---------------------------------------------------------------- criterion 9
Criterion convergence_order() {
  Criterion c{9, "self-convergence order of the coupled scheme"};
  const auto t0 = std::chrono::steady_clock::now();
  const auto string = vibrating_string(1.0, 1.0, 0.0, 1.0);
  ControllerParams params;
  params.mc = params.k = 1;
  const auto ctrl = controller_library("linear_pd", params);

  // Nested grids: doubling the interval count keeps the coarse nodes.
  const int n1 = 101;
  const int levels[3] = {n1, 2 * n1 - 1, 4 * n1 - 3};
  const double dts[3] = {2e-3, 1e-3, 5e-4};
  const double T = 3.0;  // the bump reaches the port and is absorbed
  const auto d = DisturbanceSignal::zero(1);

  // Interior Gaussian pulse: boundary traces are at machine-noise level at
  // t = 0 (compatible corner data), and the profile is fully resolved on the
  // coarsest grid, so the runs sit in the scheme's asymptotic regime.
  auto smooth_x0 = [&](const FiniteModel& model) {
    Vec x0 = Vec::Zero(model.dim());
    for (int i = 0; i < model.grid.n; ++i) {
      const double r = (model.grid.node(i) - 0.5) / 0.1;
      x0[2 * i] = std::exp(-r * r);
    }
    return x0;
  };

  std::vector<Trajectory> trajs;
  std::vector<FiniteModel> models;
  for (int lv = 0; lv < 3; ++lv) {
    models.push_back(discretize_closed_loop(string, ctrl, levels[lv]));
    SimulateOptions opts;
    opts.snapshot_stride = 1 << lv;  // snapshots at the shared coarse times
    trajs.push_back(
        simulate(models[lv], smooth_x0(models[lv]), d, T, dts[lv], opts));
  }

  auto restrict_diff = [&](int coarse_lv, int fine_lv) {
    const auto& mc_ = models[coarse_lv];
    const auto& tc_ = trajs[coarse_lv];
    const auto& tf_ = trajs[fine_lv];
    const int stride_nodes = 1 << (fine_lv - coarse_lv);
    double worst = 0.0;
    const std::size_t count =
        std::min(tc_.snapshots.size(), tf_.snapshots.size());
    for (std::size_t s = 0; s < count; ++s) {
      const Vec& xc = tc_.snapshots[s];
      const Vec& xf = tf_.snapshots[s];
      Vec diff(mc_.dim());
      for (int i = 0; i < mc_.grid.n; ++i)
        diff.segment(2 * i, 2) = xf.segment(2 * (i * stride_nodes), 2) -
                                 xc.segment(2 * i, 2);
      diff.tail(2) = xf.tail(2) - xc.tail(2);
      worst = std::max(worst, mc_.norm_M(diff));
    }
    return worst;
  };

  const double e1 = restrict_diff(0, 1);
  const double e2 = restrict_diff(1, 2);
  const double order = std::log2(e1 / e2);
  c.seconds = elapsed(t0);
  c.pass = order >= 1.8 && c.seconds < 300.0;
  std::snprintf(buf, sizeof buf,
                "errors %.3e -> %.3e, observed order %.2f, %.1fs", e1, e2,
                order, c.seconds);
  c.details = buf;
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> criteria = {
      structural_certification, observability_oracle,
      spectrum_oracle,          discrete_dissipation_identity,
      ugs_energy_bound,         iss_contraction_regime,
      weak_iss_regime,          solution_map_contracts,
      convergence_order};

  int failures = 0;
  for (auto& fn : criteria) {
    Criterion c = fn();
    if (!c.pass) ++failures;
    std::printf("%s criterion %d: %s (%s)\n", c.pass ? "PASS" : "FAIL",
                c.number, c.label.c_str(), c.details.c_str());
    std::fflush(stdout);
  }
  if (failures == 0)
    std::printf("acceptance: all 9 criteria passed\n");
  else
    std::printf("acceptance: %d criteria FAILED\n", failures);
  return failures == 0 ? 0 : 1;
}
