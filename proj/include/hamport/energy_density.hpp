#pragma once

#include "hamport/common.hpp"
#include "hamport/grid.hpp"

#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace hamport {

// Energy density H(zeta): symmetric m x m weight defining the state-space
// norm. Bounds are declared (multipliers of the identity) and verified by
// dense sampling, not trusted.
struct EnergyDensity {
  int m = 0;
  std::function<Mat(double)> value;
  double lower = 0.0;   // declared: lower * I <= H(zeta)
  double upper = 0.0;   // declared: H(zeta) <= upper * I
  bool absolutely_continuous = true;

  Mat operator()(double zeta) const { return value(zeta); }

  static EnergyDensity constant(const Mat& H) {
    EnergyDensity d;
    d.m = static_cast<int>(H.rows());
    require(H.rows() == H.cols(), "energy density: H must be square");
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
    d.lower = es.eigenvalues().minCoeff();
    d.upper = es.eigenvalues().maxCoeff();
    Mat Hc = H;
    d.value = [Hc](double) { return Hc; };
    return d;
  }

  // Diagonal density from per-component coefficient functions.
  static EnergyDensity diagonal(std::vector<std::function<double(double)>> fns,
                                double lower, double upper) {
    EnergyDensity d;
    d.m = static_cast<int>(fns.size());
    d.lower = lower;
    d.upper = upper;
    auto fcopy = std::move(fns);
    int m = d.m;
    d.value = [fcopy, m](double zeta) {
      Mat H = Mat::Zero(m, m);
      for (int i = 0; i < m; ++i) H(i, i) = fcopy[i](zeta);
      return H;
    };
    return d;
  }
};

struct EnergyDensityCheck {
  bool symmetric = true;
  bool bounds = true;
  double worst_asymmetry = 0.0;   // max ||H - H^T|| / ||H||
  double worst_lower_violation = 0.0;
  double worst_upper_violation = 0.0;
  double at_zeta = 0.0;

  bool ok() const { return symmetric && bounds; }
};

// Dense-sampling verification of symmetry and the declared bounds.
inline EnergyDensityCheck validate(const EnergyDensity& d, double a, double b,
                                   int samples = 1000) {
  EnergyDensityCheck out;
  require(d.m >= 1 && static_cast<bool>(d.value),
          "energy density: not initialized");
  if (!(d.lower > 0.0 && d.lower <= d.upper &&
        d.upper < std::numeric_limits<double>::infinity())) {
    out.bounds = false;
    return out;
  }
  for (int s = 0; s < samples; ++s) {
    const double zeta = a + (b - a) * (s + 0.5) / samples;
    const Mat H = d.value(zeta);
    const double hn = std::max(H.norm(), 1e-300);
    const double asym = (H - H.transpose()).norm() / hn;
    if (asym > out.worst_asymmetry) {
      out.worst_asymmetry = asym;
      if (asym > 1e-12) {
        out.symmetric = false;
        out.at_zeta = zeta;
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (H + H.transpose()));
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    const double tol = 1e-12 * std::max(1.0, hn);
    if (d.lower - lo > out.worst_lower_violation) {
      out.worst_lower_violation = d.lower - lo;
      if (d.lower - lo > tol) {
        out.bounds = false;
        out.at_zeta = zeta;
      }
    }
    if (hi - d.upper > out.worst_upper_violation) {
      out.worst_upper_violation = hi - d.upper;
      if (hi - d.upper > tol) {
        out.bounds = false;
        out.at_zeta = zeta;
      }
    }
  }
  return out;
}

}  // namespace hamport
