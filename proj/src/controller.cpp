#include "hamport/controller.hpp"

namespace hamport {

double feedthrough_sigma(const Mat& Sc) {
  if (Sc.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Sc + Sc.transpose()));
  return es.eigenvalues().minCoeff();
}

void Controller::validate() const {
  if (empty()) return;
  if (mc < 1 || k < 1) throw model_error("controller: dimensions must be >= 1");
  if (K.rows() != mc || K.cols() != mc)
    throw model_error("controller: K must be mc x mc");
  if (Bc.rows() != mc || Bc.cols() != k)
    throw model_error("controller: B_c must be mc x k");
  if (Sc.rows() != k || Sc.cols() != k)
    throw model_error("controller: S_c must be k x k");
  if ((K - K.transpose()).norm() > 1e-12 * std::max(1.0, K.norm()))
    throw model_error("controller: K must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw model_error("controller: K must be positive definite");
  if (feedthrough_sigma(Sc) <= 0.0)
    throw model_error("controller: sym(S_c) must be positive definite");
  const Vec zero_mc = Vec::Zero(mc);
  if (std::abs(potential(zero_mc)) != 0.0)
    throw model_error("controller: potential must vanish at 0");
  if (damping(zero_mc).norm() != 0.0)
    throw model_error("controller: damping must vanish at 0");
}

Mat Controller::hess_or_fd(const Vec& v1) const {
  if (potential_hess) return potential_hess(v1);
  const double step = 1e-6 * (1.0 + v1.norm());
  Mat H(mc, mc);
  for (int j = 0; j < mc; ++j) {
    Vec e = Vec::Zero(mc);
    e[j] = step;
    H.col(j) = (potential_grad(v1 + e) - potential_grad(v1 - e)) / (2 * step);
  }
  return 0.5 * (H + H.transpose());
}

Mat Controller::damping_jac_or_fd(const Vec& w) const {
  if (damping_jac) return damping_jac(w);
  const double step = 1e-6 * (1.0 + w.norm());
  Mat J(mc, mc);
  for (int j = 0; j < mc; ++j) {
    Vec e = Vec::Zero(mc);
    e[j] = step;
    J.col(j) = (damping(w + e) - damping(w - e)) / (2 * step);
  }
  return J;
}

std::pair<Vec, Vec> controller_rhs(const Controller& c, const Vec& v1,
                                   const Vec& v2, const Vec& uc) {
  require(v1.size() == c.mc && v2.size() == c.mc && uc.size() == c.k,
          "controller_rhs: dimension mismatch");
  const Vec grad = c.potential_grad(v1);
  const Vec damp = c.damping(c.K * v2);
  if (!all_finite(grad) || !all_finite(damp))
    throw model_error("controller_rhs: non-finite potential gradient or damping");
  return {c.K * v2, -grad - damp + c.Bc * uc};
}

Vec controller_output(const Controller& c, const Vec& v2, const Vec& uc) {
  require(v2.size() == c.mc && uc.size() == c.k,
          "controller_output: dimension mismatch");
  return c.Bc.transpose() * (c.K * v2) + c.Sc * uc;
}

}  // namespace hamport
