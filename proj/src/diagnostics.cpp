#include "hamport/diagnostics.hpp"

#include "hamport/rng.hpp"

#include <cmath>

namespace hamport {

namespace {

double envelope_eval(const Vec& radii, const Vec& values, double r) {
  const Eigen::Index n = radii.size();
  if (r <= 0.0) return 0.0;
  if (r <= radii[0]) {
    const double q = r / radii[0];
    return values[0] * q * q;
  }
  if (r >= radii[n - 1]) {
    const double q = r / radii[n - 1];
    return values[n - 1] * q * q;
  }
  for (Eigen::Index i = 1; i < n; ++i) {
    if (r <= radii[i]) {
      const double w = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
      return (1.0 - w) * values[i - 1] + w * values[i];
    }
  }
  return values[n - 1];
}

}  // namespace

double NormEquivalence::psi_lo(double r) const {
  return envelope_eval(radii, e_min, r);
}

double NormEquivalence::psi_hi(double r) const {
  return envelope_eval(radii, e_max, r);
}

double NormEquivalence::psi_lo_inv(double s) const {
  if (s <= 0.0) return 0.0;
  double hi = radii[radii.size() - 1];
  while (psi_lo(hi) < s) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (psi_lo(mid) < s ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

NormEquivalence norm_equivalence(const FiniteModel& model, int n_samples,
                                 const Vec& radius_grid, std::uint64_t seed) {
  require(radius_grid.size() >= 1 && radius_grid.minCoeff() > 0.0,
          "norm_equivalence: radius grid must be positive");
  Rng rng(seed);
  NormEquivalence eq;
  eq.radii = radius_grid;
  std::sort(eq.radii.data(), eq.radii.data() + eq.radii.size());
  const Eigen::Index nr = eq.radii.size();
  eq.e_min = Vec::Constant(nr, std::numeric_limits<double>::infinity());
  eq.e_max = Vec::Zero(nr);
  eq.c_low = std::numeric_limits<double>::infinity();
  eq.c_high = 0.0;

  const int dim = model.dim();
  const int nm = model.nm();
  const int mc = model.mc;

  // The energy is separable across the (x, v1, v2) blocks, so the extremal
  // ratios are attained on pure-block directions; random mixed directions are
  // sampled on top.
  auto sample_direction = [&](int kind) {
    Vec u = Vec::Zero(dim);
    switch (kind) {
      case 0:
        u.head(nm) = rng.normal_vec(nm);
        break;
      case 1:
        if (mc > 0)
          u.segment(nm, mc) = rng.normal_vec(mc);
        else
          u.head(nm) = rng.normal_vec(nm);
        break;
      case 2:
        if (mc > 0)
          u.tail(mc) = rng.normal_vec(mc);
        else
          u.head(nm) = rng.normal_vec(nm);
        break;
      default:
        u = rng.normal_vec(dim);
        break;
    }
    return u;
  };

  for (Eigen::Index ir = 0; ir < nr; ++ir) {
    const double r = eq.radii[ir];
    for (int s = 0; s < n_samples; ++s) {
      Vec u = sample_direction(s % 4);
      const double nu = model.norm_M(u);
      if (nu <= 0.0) continue;
      u *= r / nu;
      const double e = model.energy(u);
      eq.e_min[ir] = std::min(eq.e_min[ir], e);
      eq.e_max[ir] = std::max(eq.e_max[ir], e);
      eq.c_low = std::min(eq.c_low, e / (r * r));
      eq.c_high = std::max(eq.c_high, e / (r * r));
    }
  }
  // Monotone envelope fit.
  for (Eigen::Index i = 1; i < nr; ++i) {
    eq.e_min[i] = std::max(eq.e_min[i], eq.e_min[i - 1]);
    eq.e_max[i] = std::max(eq.e_max[i], eq.e_max[i - 1]);
  }
  return eq;
}

Vec random_smooth_state(const FiniteModel& model, std::uint64_t seed,
                        double norm) {
  Rng rng(seed);
  Vec x = Vec::Zero(model.dim());
  const int modes = 8;
  for (int c = 0; c < model.m; ++c) {
    Vec coeff(modes);
    for (int j = 0; j < modes; ++j)
      coeff[j] = rng.normal() / ((j + 1.0) * (j + 1.0));
    for (int i = 0; i < model.grid.n; ++i) {
      const double s = (model.grid.node(i) - model.grid.a) /
                       (model.grid.b - model.grid.a);
      double v = 0.0;
      for (int j = 0; j < modes; ++j)
        v += coeff[j] * std::sin((j + 1) * M_PI * s);
      x[i * model.m + c] += v;
    }
  }
  for (int j = 0; j < 2 * model.mc; ++j) x[model.nm() + j] = rng.normal();
  const double nx = model.norm_M(x);
  if (nx > 0.0) x *= norm / nx;
  return x;
}

double dissipation_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (int i = 0; i < traj.steps(); ++i) {
    const double viol = traj.energy_total[i + 1] - traj.energy_total[i] -
                        traj.dy_step[i];
    worst = std::max(worst, viol);
  }
  return worst;
}

double ugs_margin(const Trajectory& traj, double sigma) {
  require(sigma > 0.0, "ugs_margin: sigma must be positive");
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const double bound =
        traj.energy_total[0] + traj.dnorm_sq[i] / (4.0 * sigma);
    margin = std::min(margin, bound - traj.energy_total[i]);
  }
  return margin;
}

ContractionFit fit_contraction(const FiniteModel& model,
                               const std::vector<Vec>& x0_set, double horizon,
                               double tau, double dt,
                               const SimulateOptions& opts) {
  require(tau > 0.0 && horizon >= 2.0 * tau,
          "fit_contraction: need horizon >= 2 tau > 0");
  const auto wsteps = static_cast<int>(std::llround(tau / dt));
  require(wsteps >= 1 && std::abs(wsteps * dt - tau) <= 1e-9 * tau,
          "fit_contraction: tau must be a multiple of dt");

  ContractionFit fit;
  fit.tau = tau;
  const DisturbanceSignal d0 = DisturbanceSignal::zero(model.k);
  SimulateOptions o = opts;
  o.snapshot_stride = 0;

  for (const Vec& x0 : x0_set) {
    const double e0 = model.energy(x0);
    if (e0 <= 0.0) continue;  // degenerate start, excluded from the fit
    const Trajectory traj = simulate(model, x0, d0, horizon, dt, o);
    const double floor_fit = 1e-14 * e0;
    const double floor_window = 1e-12 * e0;

    int i_end = traj.steps();
    while (i_end > 0 && traj.energy_total[i_end] <= floor_fit) --i_end;

    // Least-squares slope of log E over the pre-floor tail.
    const int i_start = i_end / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int i = i_start; i <= i_end; ++i) {
      if (traj.energy_total[i] <= 0.0) continue;
      const double x = traj.times[i];
      const double y = std::log(traj.energy_total[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++cnt;
    }
    double beta_ls = 1.0;
    if (cnt >= 2 && (cnt * sxx - sx * sx) > 0.0) {
      const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
      beta_ls = std::exp(slope * tau);
    }

    // Worst observed energy contraction over windows of length tau.
    double beta_window = 0.0;
    for (int i = wsteps; i <= traj.steps(); ++i) {
      const double num = traj.energy_total[i];
      const double den = traj.energy_total[i - wsteps];
      if (den <= floor_window) break;
      beta_window = std::max(beta_window, num / den);
    }

    const double beta_run = std::max(beta_ls, beta_window);
    fit.per_run_beta.push_back(beta_run);
    fit.beta_ls = std::max(fit.beta_ls, beta_ls);
    fit.beta_window = std::max(fit.beta_window, beta_window);
    ++fit.runs;
  }
  require(fit.runs >= 1, "fit_contraction: no nondegenerate initial states");
  fit.beta = std::max(fit.beta_ls, fit.beta_window);
  fit.contracting = fit.beta < 1.0;
  return fit;
}

GainCurve gain_curve(const FiniteModel& model, const Vec& amplitudes,
                     const SignalFactory& family, double horizon,
                     double tail_window, double dt, const NormEquivalence& eq,
                     std::uint64_t seed, int replicates) {
  require(tail_window > 0.0 && tail_window < horizon,
          "gain_curve: need 0 < tail_window < horizon");
  Rng rng(seed);
  GainCurve curve;
  curve.tail_window = tail_window;
  const double sigma = model.mc > 0 ? model.controller.sigma : 1.0;
  curve.C = 1.0 / (4.0 * sigma) + 0.01;

  SimulateOptions opts;
  opts.snapshot_stride = 0;

  for (Eigen::Index ia = 0; ia < amplitudes.size(); ++ia) {
    const double amp = amplitudes[ia];
    GainCurvePoint pt;
    pt.amplitude = amp;
    double tail_sup = 0.0;
    double end_slope = 0.0;
    double dnorm = 0.0;
    for (int rep = 0; rep <= replicates; ++rep) {
      const std::uint64_t sseed = rng.fork_seed();
      const DisturbanceSignal d = family(amp, sseed);
      require(d.channels() == model.k, "gain_curve: signal channel mismatch");
      Vec x0 = Vec::Zero(model.dim());
      if (rep > 0) x0 = random_smooth_state(model, rng.fork_seed(), 1.0);
      const Trajectory traj = simulate(model, x0, d, horizon, dt, opts);
      dnorm = std::max(dnorm, std::sqrt(d.norm_sq_total()));
      const double t_from = horizon - tail_window;
      double sup = 0.0;
      for (Eigen::Index i = 0; i < traj.times.size(); ++i)
        if (traj.times[i] >= t_from)
          sup = std::max(sup, traj.norm_state[i]);
      tail_sup = std::max(tail_sup, sup);
      // Settling indicator: energy slope over the trailing window.
      const auto iw =
          traj.times.size() - 1 -
          static_cast<Eigen::Index>(std::llround(tail_window / dt));
      const double e_begin = std::max(traj.energy_total[iw], 1e-300);
      const double e_end =
          std::max(traj.energy_total[traj.times.size() - 1], 1e-300);
      end_slope = std::min(end_slope, std::log(e_end / e_begin) / tail_window);
    }
    pt.d_norm = dnorm;
    pt.tail_sup = tail_sup;
    pt.bound = eq.psi_lo_inv(2.0 * curve.C * dnorm * dnorm);
    const double eps_num = 1e-6 * (1.0 + pt.bound);
    if (tail_sup <= pt.bound + eps_num)
      pt.verdict = 1;
    else if (end_slope < -0.05)
      pt.verdict = 0;  // still decaying: horizon too short to judge
    else
      pt.verdict = -1;
    curve.points.push_back(pt);
  }
  return curve;
}

std::optional<double> convergence_time(const Trajectory& traj, double eps) {
  require(eps > 0.0, "convergence_time: eps must be positive");
  const Eigen::Index n = traj.times.size();
  Eigen::Index first = n;
  for (Eigen::Index i = n; i-- > 0;) {
    if (traj.norm_state[i] < eps)
      first = i;
    else
      break;
  }
  if (first == n) return std::nullopt;
  return traj.times[first];
}

double stability_sigma(const NormEquivalence& eq, double r) {
  return eq.psi_lo_inv(2.0 * eq.psi_hi(r));
}

double stability_gamma(const NormEquivalence& eq, double r,
                       double feedthrough_sigma) {
  require(feedthrough_sigma > 0.0, "stability_gamma: sigma must be positive");
  return eq.psi_lo_inv(r * r / (2.0 * feedthrough_sigma));
}

double iss_bound_margin(const Trajectory& traj, double beta, double tau,
                        const NormEquivalence& eq, double C) {
  require(beta > 0.0 && beta < 1.0 && tau > 0.0,
          "iss_bound_margin: need 0 < beta < 1 and tau > 0");
  const double x0n = traj.norm_state[0];
  const double psih = eq.psi_hi(x0n);
  double margin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double transient =
        eq.psi_lo_inv((2.0 / beta) * std::pow(beta, t / tau) * psih);
    const double gain = eq.psi_lo_inv(2.0 * C * traj.dnorm_sq[i]);
    margin = std::min(margin, transient + gain - traj.norm_state[i]);
  }
  return margin;
}

}  // namespace hamport
