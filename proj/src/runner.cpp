#include "hamport/runner.hpp"

#include "hamport/conditions.hpp"
#include "hamport/rng.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <thread>

namespace hamport {

namespace {

using json = nlohmann::ordered_json;

int log_level() {
  const char* env = std::getenv("HAMPORT_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info") return 1;
  return 0;
}

Controller controller_from_section(const ScenarioConfig::ControllerOverride& c,
                                   int k) {
  ControllerParams params;
  params.mc = k;
  params.k = k;
  params.K = c.mass * Mat::Identity(k, k);
  params.Q = c.stiffness * Mat::Identity(k, k);
  params.D = c.damping * Mat::Identity(k, k);
  params.Bc = c.input_gain * Mat::Identity(k, k);
  params.Sc = Mat::Identity(k, k);  // replaced below, bypassing validation
  params.quartic = c.quartic;
  Controller ctrl = controller_library(c.name, params);
  ctrl.Sc = c.feedthrough * Mat::Identity(k, k);
  ctrl.sigma = feedthrough_sigma(ctrl.Sc);
  return ctrl;
}

}  // namespace

ScenarioBuild build_scenario(const ScenarioConfig& cfg) {
  ScenarioBuild sb;
  if (cfg.model.custom) {
    PortHamiltonianSystem sys;
    sys.order = 1;
    sys.m = cfg.model.m;
    sys.a = cfg.model.a;
    sys.b = cfg.model.b;
    sys.P = {cfg.model.P0, cfg.model.P1};
    sys.Wb1 = cfg.model.Wb1;
    sys.Wb2 = cfg.model.Wb2;
    sys.Wc = cfg.model.Wc;
    require(cfg.model.h_diag.size() == cfg.model.m,
            "config: h_diag must have m entries");
    Mat H = cfg.model.h_diag.asDiagonal();
    sys.density = EnergyDensity::constant(H);
    sys.validate();
    sb.system = sys;
    require(cfg.controller.enabled,
            "config: custom models need an explicit [controller] section");
    sb.controller = controller_from_section(cfg.controller, sys.k());
  } else {
    ScenarioPreset preset = make_preset(cfg.model.preset);
    sb.system = preset.system;
    sb.controller = cfg.controller.enabled
                        ? controller_from_section(cfg.controller,
                                                  sb.system.k())
                        : preset.controller;
  }
  return sb;
}

DisturbanceSignal signal_from_config(const ScenarioConfig::Disturbance& d,
                                     int k, double amplitude,
                                     std::uint64_t seed) {
  const Vec amp = Vec::Constant(k, amplitude);
  if (d.kind == "zero") return DisturbanceSignal::zero(k);
  if (d.kind == "truncated_step")
    return DisturbanceSignal::truncated_step(amp, d.duration);
  if (d.kind == "exp_decay") return DisturbanceSignal::exp_decay(amp, d.rate);
  if (d.kind == "windowed_noise")
    return DisturbanceSignal::windowed_noise(k, amplitude, d.t0, d.t1, d.cell,
                                             seed);
  throw spec_error("disturbance: unknown kind '" + d.kind + "'");
}

namespace {

struct RunResult {
  double e0 = 0.0;
  double dissipation = 0.0;
  double ugs_margin = 0.0;
  double final_norm = 0.0;
  double d_norm_sq = 0.0;
  double decay_rate = 0.0;  // least-squares slope of log E
  std::optional<double> convergence;
  bool ok = false;
  bool dissipation_pass = false;
  bool ugs_pass = false;
  std::string traj_file;
};

// Least-squares slope of log E over the samples above the energy floor.
double fit_decay_rate(const Trajectory& traj) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  const double floor_e = 1e-14 * std::max(traj.energy_total.maxCoeff(), 1e-300);
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    if (traj.energy_total[i] <= floor_e) continue;
    const double x = traj.times[i];
    const double y = std::log(traj.energy_total[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2 || cnt * sxx - sx * sx <= 0.0) return 0.0;
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

struct TableRow {
  std::string analysis;
  bool pass = false;
  std::string details;
};

std::string format_double(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

}  // namespace

int run_scenario(const ScenarioConfig& cfg_in, const RunOptions& opts,
                 std::ostream& out) {
  ScenarioConfig cfg = cfg_in;
  if (opts.seed) cfg.ensemble.seed = *opts.seed;
  if (opts.out_dir) cfg.output_dir = *opts.out_dir;
  if (opts.analyses) cfg.analyses = *opts.analyses;

  const int verbosity = log_level();
  std::filesystem::create_directories(cfg.output_dir);
  ScenarioBuild sb = build_scenario(cfg);

  std::vector<TableRow> table;
  json stability;
  stability["scenario"] = {{"preset", cfg.model.custom ? "custom"
                                                       : cfg.model.preset},
                           {"n", cfg.grid.n},
                           {"dt", cfg.grid.dt},
                           {"T", cfg.grid.T},
                           {"seed", cfg.ensemble.seed},
                           {"disturbance", cfg.disturbance.kind}};
  bool wrote_stability = false;

  auto requested = [&](const std::string& name) {
    for (const auto& a : cfg.analyses)
      if (a == name) return true;
    return false;
  };

  // Per-run seeds fixed in index order so results are independent of --jobs.
  Rng seeder(cfg.ensemble.seed);
  std::vector<std::uint64_t> x0_seeds(cfg.ensemble.count);
  std::vector<std::uint64_t> sig_seeds(cfg.ensemble.count);
  for (int i = 0; i < cfg.ensemble.count; ++i) {
    x0_seeds[i] = seeder.fork_seed();
    sig_seeds[i] = seeder.fork_seed();
  }
  const std::uint64_t conditions_seed = seeder.fork_seed();
  const std::uint64_t normeq_seed = seeder.fork_seed();

  if (requested("conditions")) {
    conditions::ConditionOptions copts;
    copts.seed = conditions_seed;
    const auto report =
        conditions::run_all_conditions(sb.system, sb.controller, copts);
    std::ofstream f(cfg.output_dir + "/conditions.json");
    f << report.to_json().dump(2) << "\n";
    TableRow row;
    row.analysis = "conditions";
    row.pass = report.all_pass();
    row.details = std::string("uniform_iss=") +
                  (report.uniform_iss_hypotheses ? "yes" : "no") +
                  " weak_iss=" + (report.weak_iss_hypotheses ? "yes" : "no");
    table.push_back(row);
  }

  // The semidiscrete model is needed only for the dynamic analyses;
  // discretizing validates the controller, so build it lazily.
  std::optional<FiniteModel> model_opt;
  auto model_ref = [&]() -> const FiniteModel& {
    if (!model_opt)
      model_opt = discretize_closed_loop(sb.system, sb.controller, cfg.grid.n);
    return *model_opt;
  };

  std::vector<Vec> x0_set;
  if (requested("simulate") || requested("contraction")) {
    const FiniteModel& model = model_ref();
    for (int i = 0; i < cfg.ensemble.count; ++i)
      x0_set.push_back(
          random_smooth_state(model, x0_seeds[i], cfg.ensemble.x0_scale));
  }

  if (requested("simulate")) {
    const FiniteModel& model = model_ref();
    std::vector<RunResult> results(cfg.ensemble.count);
    std::atomic<int> next{0};
    const int hw = static_cast<int>(std::thread::hardware_concurrency());
    const int jobs = std::max(
        1, std::min(opts.jobs > 0 ? opts.jobs : (hw > 0 ? hw : 1),
                    cfg.ensemble.count));
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= cfg.ensemble.count) return;
        const DisturbanceSignal d = signal_from_config(
            cfg.disturbance, model.k, cfg.disturbance.amplitude, sig_seeds[i]);
        SimulateOptions sopts;
        sopts.snapshot_stride = 0;
        const Trajectory traj =
            simulate(model, x0_set[i], d, cfg.grid.T, cfg.grid.dt, sopts);
        RunResult r;
        r.e0 = traj.energy_total[0];
        r.dissipation = dissipation_residual(traj);
        const double sigma = model.mc > 0 ? model.controller.sigma : 1.0;
        r.ok = traj.status == Trajectory::Status::Ok && sigma > 0.0;
        if (sigma > 0.0) {
          r.ugs_margin = ugs_margin(traj, sigma);
          const double scale =
              r.e0 + traj.dnorm_sq[traj.times.size() - 1] / (4.0 * sigma) + 1.0;
          r.ugs_pass = r.ugs_margin >= -1e-8 * scale;
        }
        r.dissipation_pass = r.dissipation <= 1e-8 * r.e0 + 1e-12;
        r.final_norm = traj.norm_state[traj.times.size() - 1];
        r.d_norm_sq = traj.dnorm_sq[traj.times.size() - 1];
        r.decay_rate = fit_decay_rate(traj);
        r.convergence =
            convergence_time(traj, 1e-3 * std::max(traj.norm_state[0], 1e-300));
        r.traj_file = "traj_" + std::to_string(i) + ".csv";
        write_trajectory_csv(traj, cfg.output_dir + "/" + r.traj_file);
        results[i] = std::move(r);
      }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    bool all_ok = true;
    double worst_diss = 0.0, worst_ugs = std::numeric_limits<double>::infinity();
    json runs = json::array();
    for (int i = 0; i < cfg.ensemble.count; ++i) {
      const RunResult& r = results[i];
      all_ok = all_ok && r.ok && r.dissipation_pass && r.ugs_pass;
      worst_diss = std::max(worst_diss, r.dissipation);
      worst_ugs = std::min(worst_ugs, r.ugs_margin);
      json jr = {{"trajectory", r.traj_file},
                 {"initial_energy", r.e0},
                 {"final_norm", r.final_norm},
                 {"d_norm_sq", r.d_norm_sq},
                 {"energy_decay_rate", r.decay_rate},
                 {"dissipation_residual", r.dissipation},
                 {"ugs_margin", r.ugs_margin},
                 {"dissipation_pass", r.dissipation_pass},
                 {"ugs_pass", r.ugs_pass},
                 {"integrator_ok", r.ok}};
      if (r.convergence)
        jr["convergence_time"] = *r.convergence;
      else
        jr["convergence_time"] = nullptr;
      runs.push_back(jr);
      if (verbosity >= 1)
        out << "run " << i << ": dissipation=" << format_double(r.dissipation)
            << " ugs_margin=" << format_double(r.ugs_margin) << "\n";
    }
    stability["simulate"] = {{"runs", runs},
                             {"max_dissipation_residual", worst_diss},
                             {"min_ugs_margin", worst_ugs},
                             {"pass", all_ok}};
    wrote_stability = true;
    TableRow row;
    row.analysis = "simulate";
    row.pass = all_ok;
    row.details = "runs=" + std::to_string(cfg.ensemble.count) +
                  " max_dissipation=" + format_double(worst_diss) +
                  " min_ugs_margin=" + format_double(worst_ugs);
    table.push_back(row);
  }

  if (requested("contraction")) {
    const FiniteModel& model = model_ref();
    const auto fit =
        fit_contraction(model, x0_set, cfg.contraction.horizon,
                        cfg.contraction.tau, cfg.grid.dt);
    stability["contraction"] = {{"beta", fit.beta},
                                {"tau", fit.tau},
                                {"beta_least_squares", fit.beta_ls},
                                {"beta_window", fit.beta_window},
                                {"per_run_beta", fit.per_run_beta},
                                {"pass", fit.contracting}};
    wrote_stability = true;
    TableRow row;
    row.analysis = "contraction";
    row.pass = fit.contracting;
    row.details = "beta=" + format_double(fit.beta) +
                  " tau=" + format_double(fit.tau);
    table.push_back(row);
  }

  if (requested("gain_curve")) {
    const FiniteModel& model = model_ref();
    Vec radius_grid(8);
    radius_grid << 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0;
    const auto eq = norm_equivalence(model, 400, radius_grid, normeq_seed);
    Vec amps(cfg.gain.amplitudes.size());
    for (std::size_t i = 0; i < cfg.gain.amplitudes.size(); ++i)
      amps[i] = cfg.gain.amplitudes[i];
    Rng gseed(seeder.fork_seed());
    const auto family = [&](double amplitude, std::uint64_t seed) {
      return signal_from_config(cfg.disturbance, model.k, amplitude, seed);
    };
    const auto curve =
        gain_curve(model, amps, family, cfg.gain.horizon, cfg.gain.tail_window,
                   cfg.grid.dt, eq, gseed.fork_seed());
    std::ofstream f(cfg.output_dir + "/gain_curve.csv");
    f << "d_norm,tail_sup,bound\n";
    char b[128];
    json pts = json::array();
    for (const auto& p : curve.points) {
      std::snprintf(b, sizeof b, "%.17g,%.17g,%.17g\n", p.d_norm, p.tail_sup,
                    p.bound);
      f << b;
      pts.push_back({{"amplitude", p.amplitude},
                     {"d_norm", p.d_norm},
                     {"tail_sup", p.tail_sup},
                     {"bound", p.bound},
                     {"verdict", p.verdict}});
    }
    stability["gain_curve"] = {{"C", curve.C},
                               {"tail_window", curve.tail_window},
                               {"points", pts},
                               {"pass", curve.all_pass()}};
    wrote_stability = true;
    TableRow row;
    row.analysis = "gain_curve";
    row.pass = curve.all_pass();
    row.details = "amplitudes=" + std::to_string(curve.points.size());
    table.push_back(row);
  }

  if (cfg.dump_model)
    write_model_matrices(model_ref(), cfg.output_dir + "/model_matrices.txt");

  if (wrote_stability) {
    std::ofstream f(cfg.output_dir + "/stability.json");
    f << stability.dump(2) << "\n";
  }

  bool all_pass = true;
  out << std::left << std::setw(14) << "analysis" << std::setw(9) << "verdict"
      << "details\n";
  for (const auto& row : table) {
    all_pass = all_pass && row.pass;
    out << std::left << std::setw(14) << row.analysis << std::setw(9)
        << (row.pass ? "pass" : "FAIL") << row.details << "\n";
  }
  return all_pass ? 0 : 2;
}

}  // namespace hamport
