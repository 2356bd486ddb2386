#pragma once

#include "hamport/simulate.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hamport {

// Empirical two-sided comparison between the M-weighted state norm and the
// total energy: psi_lo(|x|) <= E(x) <= psi_hi(|x|) on the sampled range, with
// quadratic extension outside the radius grid and bisection for the inverse.
struct NormEquivalence {
  Vec radii;
  Vec e_min, e_max;     // monotone envelopes over the radius grid
  double c_low = 0.0;   // min sampled E / r^2
  double c_high = 0.0;  // max sampled E / r^2

  double psi_lo(double r) const;
  double psi_hi(double r) const;
  double psi_lo_inv(double s) const;
};

NormEquivalence norm_equivalence(const FiniteModel& model, int n_samples,
                                 const Vec& radius_grid, std::uint64_t seed);

// Seeded smooth random state of the given M-norm: low sine modes on the
// plant block plus Gaussian controller components.
Vec random_smooth_state(const FiniteModel& model, std::uint64_t seed,
                        double norm);

// Max over steps of the positive part of E(t_{i+1}) - E(t_i) - int d^T y.
double dissipation_residual(const Trajectory& traj);

// Min over samples of E(0) + ||d||^2_{[0,t]}/(4 sigma) - E(t); nonnegative
// (up to tolerance) when the energy-growth bound holds.
double ugs_margin(const Trajectory& traj, double sigma);

struct ContractionFit {
  double beta = 1.0;         // conservative: max(ls, window) over the run set
  double tau = 0.0;
  double beta_ls = 0.0;      // worst least-squares tail fit
  double beta_window = 0.0;  // worst observed tau-window energy ratio
  bool contracting = false;  // beta < 1 uniformly over the run set
  std::vector<double> per_run_beta;
  int runs = 0;
};

// Undisturbed contraction estimate over the given initial states: per-run
// least-squares slope of log E over the (pre-floor) tail plus the worst
// energy ratio over windows of length tau. Degenerate (zero-energy) starts
// are excluded.
ContractionFit fit_contraction(const FiniteModel& model,
                               const std::vector<Vec>& x0_set, double horizon,
                               double tau, double dt,
                               const SimulateOptions& opts = {});

using SignalFactory =
    std::function<DisturbanceSignal(double amplitude, std::uint64_t seed)>;

struct GainCurvePoint {
  double amplitude = 0.0;
  double d_norm = 0.0;
  double tail_sup = 0.0;
  double bound = 0.0;
  int verdict = 0;  // 1 pass, 0 indeterminate (tail unsettled), -1 fail
};

struct GainCurve {
  std::vector<GainCurvePoint> points;
  double C = 0.0;
  double tail_window = 0.0;
  bool all_pass() const {
    for (const auto& p : points)
      if (p.verdict < 0) return false;
    return true;
  }
};

// Tail-sup of |x|_M against the asymptotic-gain bound psi_lo_inv(2 C ||d||^2)
// with C = 1/(4 sigma) + 0.01, from the zero state plus seeded replicates.
GainCurve gain_curve(const FiniteModel& model, const Vec& amplitudes,
                     const SignalFactory& family, double horizon,
                     double tail_window, double dt, const NormEquivalence& eq,
                     std::uint64_t seed, int replicates = 2);

// First grid time with |x(t)|_M < eps that stays below eps for the rest of
// the trajectory.
std::optional<double> convergence_time(const Trajectory& traj, double eps);

// Min over samples of
//   psi_lo_inv((2/beta) beta^{t/tau} psi_hi(|x0|)) + psi_lo_inv(2C ||d||^2)
//   - |x(t)|_M .
double iss_bound_margin(const Trajectory& traj, double beta, double tau,
                        const NormEquivalence& eq, double C);

// Explicit comparison functions of the global stability estimate, evaluated
// from the envelopes: sigma(r) = psi_lo_inv(2 psi_hi(r)) and
// gamma(r) = psi_lo_inv(r^2 / (2 sigma_feedthrough)).
double stability_sigma(const NormEquivalence& eq, double r);
double stability_gamma(const NormEquivalence& eq, double r,
                       double feedthrough_sigma);

}  // namespace hamport
