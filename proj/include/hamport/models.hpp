#pragma once

#include "hamport/closed_loop.hpp"
#include "hamport/controller.hpp"
#include "hamport/system.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hamport {

using CoefficientFn = std::function<double(double)>;

// Vibrating string on (a,b): state x = (rho*w_t, w_zeta), H = diag(1/rho, T),
// clamped at a (w_t(a) = 0), force input and velocity output at b. Boundary
// rows are written in the b-block-first trace ordering.
PortHamiltonianSystem vibrating_string(CoefficientFn rho, CoefficientFn T,
                                       double a, double b);
PortHamiltonianSystem vibrating_string(double rho, double T, double a,
                                       double b);

// Timoshenko beam on (a,b): state x = (w_zeta - phi, rho*w_t, phi_zeta,
// I_r*phi_t), H = diag(K_shear, 1/rho, EI, 1/I_r), clamped at a (velocity and
// angular velocity zero), force and torsional moment inputs at b, velocity and
// angular velocity outputs at b.
PortHamiltonianSystem timoshenko_beam(CoefficientFn rho, CoefficientFn EI,
                                      CoefficientFn Ir, CoefficientFn K_shear,
                                      double a, double b);
PortHamiltonianSystem timoshenko_beam(double rho, double EI, double Ir,
                                      double K_shear, double a, double b);

// Manufactured field for validating the first-order realization against the
// displayed second-order equations. Provides the state built from (w, phi)
// and the exact time derivative of that state computed from the second-order
// form; the check compares P_1 d(Hx) + P_0 Hx against it.
struct ManufacturedSolution {
  // state(t, zeta) in R^m and its exact time derivative per the displayed PDE
  std::function<Vec(double, double)> state;
  std::function<Vec(double, double)> state_time_derivative;
  // exact spatial derivative of Hx, used on the analytic path
  std::function<Vec(double, double)> flux_derivative;
  std::string name;
};

// Polynomial/trigonometric manufactured families for the two models.
ManufacturedSolution string_manufactured_polynomial(double rho, double T);
ManufacturedSolution string_manufactured_wave();  // sin(pi z) cos(pi t), rho=T=1
ManufacturedSolution beam_manufactured_polynomial(double rho, double EI,
                                                  double Ir, double K_shear);

// Residual of the first-order form against the manufactured time derivative.
// Analytic path (exact derivatives) for polynomial families; sampled path
// differentiates Hx by finite differences and is O(h^2).
double pde_residual_check(const PortHamiltonianSystem& sys,
                          const ManufacturedSolution& mms, const Grid& g,
                          double t = 0.37, bool sampled = false);

struct ControllerParams {
  int mc = 1;
  int k = 1;
  std::optional<Mat> Q;        // potential Hessian at 0; default identity
  std::optional<Mat> D;        // linear damping coefficient; default identity
  std::optional<Mat> K;        // generalized mass; default identity
  std::optional<Mat> Bc;       // input matrix; default identity-padded
  std::optional<Mat> Sc;       // feedthrough; default identity
  double quartic = 0.0;        // coefficient of |v1|^4 in the potential
};

// Named controller family:
//  - "linear_pd":            P = 1/2 v^T Q v,                R(w) = D w
//  - "quartic_pd":           P = 1/2 v^T Q v + alpha |v|^4,  R(w) = D w
//  - "saturating_damper_pd": P as above,                     R(w) = w/(1+|w|)
Controller controller_library(const std::string& name,
                              const ControllerParams& params = {});

// Named scenario preset bundling a plant, a controller, and grid defaults.
struct ScenarioPreset {
  std::string name;
  PortHamiltonianSystem system;
  Controller controller;
  int default_n = 200;
  double default_dt = 1e-3;
  double default_T = 20.0;
};

ScenarioPreset make_preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace hamport
