#pragma once

#include "hamport/controller.hpp"
#include "hamport/system.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace hamport::conditions {

enum class Verdict { Pass, Fail, Indeterminate };
const char* to_string(Verdict v);

// Counterexample payload attached to failing verdicts; re-evaluating the
// violated inequality at `point` exceeds the stated tolerance by `violation`.
struct Witness {
  std::string what;
  Vec point;
  double violation = 0.0;
};

struct StructureResult {
  Verdict verdict = Verdict::Pass;
  bool pn_invertible = false;
  double pn_smin_rel = 0.0;
  bool parity_ok = false;
  double parity_deviation = 0.0;
  bool p0_dissipative = false;
  double p0_max_eigenvalue = 0.0;
  bool density_ok = false;
  bool shapes_ok = false;
  std::optional<Witness> witness;
};

struct ImpedanceResult {
  Verdict verdict = Verdict::Fail;  // passivity
  bool energy_preserving = false;
  double max_signed_residual = 0.0;  // relative, max of <x,Ax> - u^T y
  double max_abs_residual = 0.0;
  int n_tests = 0;
  int n_nodes = 0;
  double tol = 0.0;
};

struct SurjectivityResult {
  Verdict verdict = Verdict::Fail;
  int rank = 0;
  int required = 0;
  Vec singular_values;
};

struct ObservabilityResult {
  Verdict verdict = Verdict::Fail;  // kappa positive at a or b
  double kappa_a = 0.0;
  double kappa_b = 0.0;
};

struct ControllerBasicResult {
  Verdict verdict = Verdict::Fail;
  bool mass_spd = false;
  double feedthrough_sigma = 0.0;  // smallest eigenvalue of sym(S_c)
  bool feedthrough_ok = false;
  bool potential_zero_at_origin = false;
  bool damping_zero_at_origin = false;
  bool potential_positive = false;
  bool potential_growing = false;
  bool damping_nonnegative = false;
  double grad_check_rel_error = 0.0;
  bool grad_consistent = false;
  std::optional<Witness> witness;
};

struct QuasiConstantsResult {
  Verdict verdict = Verdict::Fail;
  double c1_low = 0.0;   // inf P / |v|^2
  double c1_high = 0.0;  // sup 2P / (v . grad P); equals 1 for quadratics
  double c2_low = 0.0;   // inf |w|^2 / |R(w)|^2
  double c2_high = 0.0;  // sup |w|^2 / (w . R(w))
  bool quasi_quadratic = false;
  bool quasi_linear = false;
  double c1_high_tier_growth = 0.0;  // >~1 signals an unbounded trend
  double c2_high_tier_growth = 0.0;
  std::optional<Witness> witness;
};

struct StrictDampingResult {
  Verdict verdict = Verdict::Fail;
  double c_low = 0.0;   // inf over |w| <= delta of w.R(w)/|w|^2
  double c_high = 0.0;  // inf over delta < |w| <= R of w.R(w)
  double delta = 0.0;
  double bc_sigma_min = 0.0;
  bool bc_injective = false;
  std::optional<Witness> witness;
};

struct EquilibriumResult {
  Verdict verdict = Verdict::Fail;
  int converged_to_zero = 0;
  int stalled = 0;
  int total = 0;
  std::optional<Witness> witness;  // nonzero critical point, when found
};

struct ConditionOptions {
  std::uint64_t seed = 12345;
  double tol_structural = 1e-12;
  double tol_quadrature = 1e-6;
  int impedance_tests = 20;
  int impedance_nodes = 400;
  double sample_radius = 4.0;
  int n_samples = 4000;
  int n_starts = 24;
  Vec delta_grid = (Vec(4) << 0.25, 0.5, 1.0, 2.0).finished();
};

struct ConditionReport {
  std::uint64_t seed = 0;
  double tol_structural = 1e-12;
  double tol_quadrature = 1e-6;

  StructureResult structure;
  ImpedanceResult impedance;
  SurjectivityResult surjectivity;
  std::optional<ObservabilityResult> observability;  // first-order systems
  ControllerBasicResult controller_basic;
  QuasiConstantsResult quasi_constants;
  StrictDampingResult strict_damping;
  EquilibriumResult equilibrium;

  // Derived flags.
  bool approximate_observability = false;  // energy-preserving and kappa > 0
  bool uniform_iss_hypotheses = false;
  bool weak_iss_hypotheses = false;

  // Basic solvability set plus at least one stability regime.
  bool all_pass() const;

  nlohmann::ordered_json to_json() const;
};

StructureResult check_structure(const PortHamiltonianSystem& sys);

ImpedanceResult check_impedance_passivity(const PortHamiltonianSystem& sys,
                                          int n_tests, int n_nodes,
                                          std::uint64_t seed, double tol);

SurjectivityResult check_surjectivity(const PortHamiltonianSystem& sys);

enum class Endpoint { Left, Right };

// Smallest value of |W_B2 z|^2 + |W_C z|^2 over unit-|z_eta| traces in
// ker W_B1, via the kernel-restricted generalized eigenproblem. Returns
// +infinity when z_eta vanishes identically on the kernel. First-order
// systems only.
double boundary_observability_constant(const PortHamiltonianSystem& sys,
                                       Endpoint eta);

ControllerBasicResult check_controller_basic(const Controller& ctrl,
                                             double sample_radius,
                                             int n_samples, std::uint64_t seed);

QuasiConstantsResult estimate_quasi_constants(const Controller& ctrl,
                                              double sample_radius,
                                              int n_samples,
                                              std::uint64_t seed);

StrictDampingResult check_strict_damping(const Controller& ctrl,
                                         const Vec& delta_grid,
                                         double sample_radius, int n_samples,
                                         std::uint64_t seed);

EquilibriumResult check_equilibrium_uniqueness(const Controller& ctrl,
                                               double sample_radius,
                                               int n_starts,
                                               std::uint64_t seed);

ConditionReport run_all_conditions(const PortHamiltonianSystem& sys,
                                   const Controller& ctrl,
                                   const ConditionOptions& opts = {});

}  // namespace hamport::conditions
