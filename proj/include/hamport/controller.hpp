#pragma once

#include "hamport/common.hpp"

#include <functional>
#include <string>
#include <utility>

namespace hamport {

// Finite-dimensional nonlinear boundary controller:
//   v1' = K v2
//   v2' = -grad P(v1) - R(K v2) + B_c u_c
//   y_c = B_c^T K v2 + S_c u_c
// with generalized mass K > 0, feedthrough S_c whose symmetric part has
// smallest eigenvalue sigma > 0, potential P >= 0 with P(0) = 0, and damping
// map R with R(0) = 0.
struct Controller {
  int mc = 0;
  int k = 0;
  Mat K;   // mc x mc, SPD
  Mat Bc;  // mc x k
  Mat Sc;  // k x k
  std::function<double(const Vec&)> potential;
  std::function<Vec(const Vec&)> potential_grad;
  std::function<Vec(const Vec&)> damping;
  // Optional analytic derivatives; finite-difference fallbacks are used when
  // absent (the integrator warns once per run).
  std::function<Mat(const Vec&)> potential_hess;
  std::function<Mat(const Vec&)> damping_jac;
  double sigma = 0.0;  // smallest eigenvalue of sym(S_c), cached
  std::string name;

  bool empty() const { return mc == 0 && k == 0; }

  // Validates the algebraic invariants; throws model_error on violation.
  void validate() const;

  double energy(const Vec& v1, const Vec& v2) const {
    return potential(v1) + 0.5 * v2.dot(K * v2);
  }

  Mat hess_or_fd(const Vec& v1) const;
  Mat damping_jac_or_fd(const Vec& w) const;
};

// Recomputes the cached sigma from S_c (smallest eigenvalue of the symmetric
// part).
double feedthrough_sigma(const Mat& Sc);

// Controller vector field (v1', v2') for input u_c.
std::pair<Vec, Vec> controller_rhs(const Controller& c, const Vec& v1,
                                   const Vec& v2, const Vec& uc);

// Controller output y_c = B_c^T K v2 + S_c u_c.
Vec controller_output(const Controller& c, const Vec& v2, const Vec& uc);

}  // namespace hamport
