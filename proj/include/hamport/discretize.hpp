#pragma once

#include "hamport/controller.hpp"
#include "hamport/grid.hpp"
#include "hamport/system.hpp"

#include <complex>
#include <string>
#include <vector>

namespace hamport {

// Second-order summation-by-parts first-derivative operator on the grid
// (dense n x n) together with the trapezoid norm weights. Satisfies
// P D + (P D)^T = diag(-1, 0, ..., 0, 1).
Mat sbp_first_derivative(const Grid& g);

// Semidiscrete closed loop x' = A x + F(x) + G d with output y = C x.
// State layout: [plant nodes (node-major, m per node); v1; v2].
// The weak boundary enforcement is constructed so that the discrete energy
// rate equals d^T y - y^T S_c y - (K v2)^T R(K v2) + q with q <= 0 collecting
// the P_0 and boundary-kernel dissipation, exactly in the boundary terms.
struct FiniteModel {
  Grid grid;
  int m = 0;
  int mc = 0;
  int k = 0;
  int order = 1;

  Mat A;   // dim x dim
  Mat G;   // dim x k
  Mat C;   // k x dim
  Mat Tz;  // trace map: z = Tz * x_plant (2mN x nm)

  std::vector<Mat> Hnodes;  // H at the grid nodes
  Vec pw;                   // trapezoid weights
  Mat P0sym;                // sym(P_0)
  Mat Kdis;                 // boundary + constraint dissipation form (PSD)
  Mat Dcross;               // input-trace cross term of plant-only models
  double ad_eps = 0.0;      // fourth-difference dissipation coefficient

  Controller controller;  // empty for plant-only models

  std::string scheme;
  int accuracy_order = 2;
  bool energy_exact = true;

  int nm() const { return grid.n * m; }
  int dim() const { return nm() + 2 * mc; }

  Vec plant_part(const Vec& xt) const { return xt.head(nm()); }
  Vec v1_part(const Vec& xt) const { return xt.segment(nm(), mc); }
  Vec v2_part(const Vec& xt) const { return xt.tail(mc); }

  Vec trace(const Vec& xt) const { return Tz * xt.head(nm()); }
  Vec output(const Vec& xt) const { return C * xt; }

  // Nonlinear residual (0; 0; v1 - grad P(v1) - R(K v2)).
  Vec nonlinear_residual(const Vec& xt) const;
  // Jacobian blocks [dF/dv1, dF/dv2] of the v2 rows of the residual.
  Mat nonlinear_jacobian_rows(const Vec& xt) const;

  Vec rhs(const Vec& xt, const Vec& d) const;

  double plant_energy(const Vec& xt) const;
  double controller_energy(const Vec& xt) const;
  double energy(const Vec& xt) const;

  double norm_M_sq(const Vec& xt) const;
  double norm_M(const Vec& xt) const;

  // Chain-rule energy rate along rhs: pairs rhs against (M_x x, grad P, K v2).
  double energy_rate(const Vec& xt, const Vec& d) const;
  // Closed-form right side d^T y - y^T S_c y - (K v2)^T R(K v2) + q(x).
  double closed_form_rate(const Vec& xt, const Vec& d) const;
  // Physical interior dissipation from sym(P_0), <= 0.
  double interior_dissipation(const Vec& xt) const;
  // Constraint-violation penalty z^T Kdis z, >= 0.
  double constraint_dissipation(const Vec& xt) const;
  // Fourth-difference dissipation eps |S w|^2, >= 0; O(h^4) on smooth fields.
  double scheme_dissipation(const Vec& xt) const;
  // Total q(x) = interior - constraint - scheme, <= 0.
  double dissipation_term(const Vec& xt) const;

  // Dense energy weight (quadrature x H blocks, identity on v1, K on v2).
  Mat weight_matrix() const;
};

// Energy-consistent discretization of the closed loop (scheme "sbp-sat",
// order N = 1). The general-order central scheme ("central") is experimental
// and carries no energy guarantee.
FiniteModel discretize_closed_loop(const PortHamiltonianSystem& sys,
                                   const Controller& ctrl, int n,
                                   const std::string& scheme = "sbp-sat");

// Plant-only discretization with the boundary input u as the model input
// (controller detached); same weak enforcement, rate = u^T y + q.
FiniteModel discretize_plant(const PortHamiltonianSystem& sys, int n,
                             const std::string& scheme = "sbp-sat");

// Eigenvalues of A + DF(0), sorted by real part (ascending, then imaginary).
std::vector<std::complex<double>> discrete_generator_spectrum(
    const FiniteModel& model);

struct BalanceResult {
  double boundary_residual = 0.0;   // relative, must be <= 1e-10
  double interior_term = 0.0;       // |interior P_0 dissipation|
  double scheme_term = 0.0;         // |constraint + fourth-difference terms|
};

// Random-state verification of the semidiscrete energy identity.
BalanceResult verify_semidiscrete_balance(const FiniteModel& model,
                                          int n_states, std::uint64_t seed);

// Debug dump of the dense model matrices (A, G, C, M): plain text, one block
// per matrix with a '# <name> <rows> <cols>' header line followed by
// row-major %.17g rows.
void write_model_matrices(const FiniteModel& model, const std::string& path);

}  // namespace hamport
