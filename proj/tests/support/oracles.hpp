#pragma once

// Test-side oracles, kept independent of the library's solution paths.

#include "hamport/rng.hpp"
#include "hamport/system.hpp"

#include <Eigen/SVD>

#include <limits>

namespace hamport::test_oracles {

// Brute-force minimization of (|W_B2 z|^2 + |W_C z|^2) / |z_eta|^2 over
// random kernel vectors of W_B1, followed by projected-gradient polish of the
// best candidates. Works directly on the quadratic forms; no eigensolver.
inline double kappa_bruteforce(const PortHamiltonianSystem& sys,
                               bool at_right, int n_samples,
                               std::uint64_t seed) {
  const int m = sys.m;
  const int tz = 2 * m;
  Mat Q;
  if (sys.Wb1.rows() == 0) {
    Q = Mat::Identity(tz, tz);
  } else {
    Eigen::JacobiSVD<Mat> svd(sys.Wb1, Eigen::ComputeFullV);
    const double smax = std::max(svd.singularValues().maxCoeff(), 1e-300);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * smax) ++rank;
    Q = svd.matrixV().rightCols(tz - rank);
  }
  const Mat forms =
      sys.Wb2.transpose() * sys.Wb2 + sys.Wc.transpose() * sys.Wc;
  const Mat A = Q.transpose() * forms * Q;
  Mat sel = Mat::Zero(m, tz);
  if (at_right)
    sel.leftCols(m).setIdentity();
  else
    sel.block(0, m, m, m).setIdentity();
  const Mat SQ = sel * Q;
  const Mat B = SQ.transpose() * SQ;

  if (B.norm() <= 1e-14) return std::numeric_limits<double>::infinity();

  Rng rng(seed);
  auto ratio = [&](const Vec& c) {
    const double den = c.dot(B * c);
    if (den <= 1e-30) return std::numeric_limits<double>::infinity();
    return c.dot(A * c) / den;
  };

  const int keep = 8;
  std::vector<Vec> best(keep);
  std::vector<double> best_val(keep, std::numeric_limits<double>::infinity());
  for (int s = 0; s < n_samples; ++s) {
    const Vec c = rng.normal_vec(Q.cols());
    const double v = ratio(c);
    for (int b = 0; b < keep; ++b) {
      if (v < best_val[b]) {
        for (int q = keep - 1; q > b; --q) {
          best_val[q] = best_val[q - 1];
          best[q] = best[q - 1];
        }
        best_val[b] = v;
        best[b] = c;
        break;
      }
    }
  }

  double out = std::numeric_limits<double>::infinity();
  for (int b = 0; b < keep; ++b) {
    if (!std::isfinite(best_val[b])) continue;
    Vec c = best[b];
    double val = best_val[b];
    // Rayleigh-quotient gradient descent with backtracking.
    for (int it = 0; it < 400; ++it) {
      const double den = c.dot(B * c);
      const Vec grad = 2.0 * (A * c - val * (B * c)) / den;
      if (grad.norm() < 1e-14 * (1.0 + std::abs(val))) break;
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 40; ++ls) {
        const Vec cand = c - alpha * grad;
        const double vc = ratio(cand);
        if (vc < val - 1e-18) {
          c = cand;
          val = vc;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!moved) break;
    }
    out = std::min(out, val);
  }
  return out;
}

}  // namespace hamport::test_oracles
