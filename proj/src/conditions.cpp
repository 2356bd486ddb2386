#include "hamport/conditions.hpp"

#include "hamport/discretize.hpp"
#include "hamport/rng.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace hamport::conditions {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Indeterminate:
      return "indeterminate";
  }
  return "?";
}

StructureResult check_structure(const PortHamiltonianSystem& sys) {
  StructureResult r;
  r.shapes_ok =
      sys.order >= 1 && sys.m >= 1 && sys.b > sys.a &&
      static_cast<int>(sys.P.size()) == sys.order + 1 && sys.k() >= 1 &&
      sys.k() <= sys.m * sys.order &&
      sys.Wb1.rows() == sys.m * sys.order - sys.k() &&
      sys.Wb1.cols() == sys.trace_size() &&
      sys.Wb2.cols() == sys.trace_size() && sys.Wc.cols() == sys.trace_size();
  if (!r.shapes_ok) {
    r.verdict = Verdict::Fail;
    return r;
  }

  Eigen::JacobiSVD<Mat> svd(sys.P[sys.order]);
  const double smax = std::max(svd.singularValues().maxCoeff(), 1e-300);
  r.pn_smin_rel = svd.singularValues().minCoeff() / smax;
  r.pn_invertible = r.pn_smin_rel > 1e-12;

  r.parity_ok = true;
  for (int l = 1; l <= sys.order; ++l) {
    const double sign = (l % 2 == 1) ? 1.0 : -1.0;
    const double dev = (sys.P[l].transpose() - sign * sys.P[l]).norm() /
                       std::max(1.0, sys.P[l].norm());
    r.parity_deviation = std::max(r.parity_deviation, dev);
    if (dev > 1e-12) r.parity_ok = false;
  }

  Eigen::SelfAdjointEigenSolver<Mat> es(sys.P[0] + sys.P[0].transpose());
  r.p0_max_eigenvalue = es.eigenvalues().maxCoeff();
  r.p0_dissipative = r.p0_max_eigenvalue <= 1e-12;
  if (!r.p0_dissipative) {
    Witness w;
    w.what = "eigenvector of P_0 + P_0^T with positive eigenvalue";
    w.point = es.eigenvectors().col(es.eigenvalues().size() - 1);
    w.violation = r.p0_max_eigenvalue;
    r.witness = w;
  }

  r.density_ok = validate(sys.density, sys.a, sys.b).ok();

  r.verdict = (r.pn_invertible && r.parity_ok && r.p0_dissipative &&
               r.density_ok)
                  ? Verdict::Pass
                  : Verdict::Fail;
  return r;
}

namespace {

// Smooth vector polynomial matching a prescribed boundary trace correction
// (values and derivatives at both endpoints), by per-component Hermite
// interpolation on the scaled coordinate.
std::function<Vec(double)> hermite_correction(int N, int m, double a, double b,
                                              const Vec& dz) {
  const int deg = 2 * N;              // polynomial degree 2N-1, deg coeffs
  const double L = b - a;
  Mat V = Mat::Zero(2 * N, deg);      // trace conditions x coefficients
  // rows: b-block derivatives 0..N-1, then a-block; columns: monomials s^j
  for (int l = 0; l < N; ++l) {
    for (int j = l; j < deg; ++j) {
      double fall = 1.0;
      for (int q = 0; q < l; ++q) fall *= (j - q);
      // derivative w.r.t. zeta adds a 1/L^l factor
      V(l, j) = fall / std::pow(L, l);            // at s = 1 (zeta = b)
      V(N + l, j) = (j == l) ? fall / std::pow(L, l) : 0.0;  // at s = 0
    }
  }
  Mat coeff(deg, m);
  Eigen::FullPivLU<Mat> lu(V);
  for (int c = 0; c < m; ++c) {
    Vec rhs(2 * N);
    for (int l = 0; l < N; ++l) {
      rhs[l] = dz[l * m + c];
      rhs[N + l] = dz[(N + l) * m + c];
    }
    coeff.col(c) = lu.solve(rhs);
  }
  return [coeff, a, L, m, deg](double zeta) {
    const double s = (zeta - a) / L;
    Vec p = Vec::Zero(m);
    double sj = 1.0;
    for (int j = 0; j < deg; ++j) {
      p += sj * coeff.row(j).transpose();
      sj *= s;
    }
    return p;
  };
}

}  // namespace

ImpedanceResult check_impedance_passivity(const PortHamiltonianSystem& sys,
                                          int n_tests, int n_nodes,
                                          std::uint64_t seed, double tol) {
  require(n_tests >= 1, "impedance check: need at least one test");
  ImpedanceResult res;
  res.n_tests = n_tests;
  res.n_nodes = n_nodes;
  res.tol = tol;

  const Grid g(sys.a, sys.b, n_nodes);
  const int m = sys.m;
  const Mat D = sbp_first_derivative(g);
  const Vec pw = quadrature_weights(g, QuadratureRule::Trapezoid);
  Rng rng(seed);

  double max_signed = -std::numeric_limits<double>::infinity();
  double max_abs = 0.0;

  for (int test = 0; test < n_tests; ++test) {
    // Random smooth field: low trigonometric modes per component.
    Vec x(static_cast<Eigen::Index>(m) * g.n);
    const int modes = 6;
    Mat cs = Mat::Zero(m, modes), cc = Mat::Zero(m, modes);
    for (int c = 0; c < m; ++c)
      for (int j = 0; j < modes; ++j) {
        cs(c, j) = rng.normal() / (1.0 + j);
        cc(c, j) = rng.normal() / (1.0 + j);
      }
    for (int i = 0; i < g.n; ++i) {
      const double s = (g.node(i) - sys.a) / (sys.b - sys.a);
      for (int c = 0; c < m; ++c) {
        double v = 0.0;
        for (int j = 0; j < modes; ++j)
          v += cs(c, j) * std::sin((j + 1) * M_PI * s) +
               cc(c, j) * std::cos((j + 1) * M_PI * s);
        x[i * m + c] = v;
      }
    }

    // Project onto W_B1 z = 0 with a boundary-layer polynomial correction.
    BoundaryTrace tr = boundary_trace(sys, x, g);
    const Vec r1 = sys.Wb1 * tr.z;
    if (r1.size() > 0 && r1.norm() > 0.0) {
      Eigen::JacobiSVD<Mat> svd(sys.Wb1,
                                Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Vec dz = -svd.solve(r1);
      if ((sys.Wb1 * dz + r1).norm() > 1e-8 * std::max(1.0, r1.norm()))
        throw setup_error(
            "impedance check: boundary projection infeasible (W_B1 "
            "inconsistent)");
      const auto corr = hermite_correction(sys.order, m, sys.a, sys.b, dz);
      for (int i = 0; i < g.n; ++i) {
        const Mat H = sys.density(g.node(i));
        x.segment(i * m, m) += H.llt().solve(corr(g.node(i)));
      }
      tr = boundary_trace(sys, x, g);
    }

    const Vec w = apply_density(sys, x, g);
    // A x via repeated SBP differences on Hx.
    Vec ax = Vec::Zero(x.size());
    Vec dl = w;
    for (int l = 1; l <= sys.order; ++l) {
      Vec next(dl.size());
      for (int c = 0; c < m; ++c) {
        Vec comp(g.n);
        for (int i = 0; i < g.n; ++i) comp[i] = dl[i * m + c];
        const Vec dcomp = D * comp;
        for (int i = 0; i < g.n; ++i) next[i * m + c] = dcomp[i];
      }
      dl = next;
      if (sys.P[l].norm() > 0.0)
        for (int i = 0; i < g.n; ++i)
          ax.segment(i * m, m) += sys.P[l] * dl.segment(i * m, m);
    }
    if (sys.P[0].norm() > 0.0)
      for (int i = 0; i < g.n; ++i)
        ax.segment(i * m, m) += sys.P[0] * w.segment(i * m, m);

    double lhs = 0.0;
    double wnorm2 = 0.0;
    for (int i = 0; i < g.n; ++i) {
      lhs += pw[i] * w.segment(i * m, m).dot(ax.segment(i * m, m));
      wnorm2 += pw[i] * w.segment(i * m, m).squaredNorm();
    }
    const auto ports = apply_boundary_ops(sys, tr);
    const double rhs = ports.u.dot(ports.y);
    const double scale = wnorm2 / (sys.b - sys.a) + std::abs(rhs) + 1e-30;
    const double signed_res = (lhs - rhs) / scale;
    max_signed = std::max(max_signed, signed_res);
    max_abs = std::max(max_abs, std::abs(signed_res));
  }

  res.max_signed_residual = max_signed;
  res.max_abs_residual = max_abs;
  res.verdict = (max_signed <= tol) ? Verdict::Pass : Verdict::Fail;
  res.energy_preserving = (max_abs <= tol);
  return res;
}

SurjectivityResult check_surjectivity(const PortHamiltonianSystem& sys) {
  SurjectivityResult r;
  const int mN = sys.m * sys.order;
  r.required = mN + sys.k();
  Mat W(r.required, sys.trace_size());
  W.topRows(sys.Wb1.rows()) = sys.Wb1;
  W.middleRows(sys.Wb1.rows(), sys.k()) = sys.Wb2;
  W.bottomRows(sys.k()) = sys.Wc;
  Eigen::JacobiSVD<Mat> svd(W);
  r.singular_values = svd.singularValues();
  const double smax = std::max(r.singular_values.maxCoeff(), 1e-300);
  r.rank = 0;
  for (Eigen::Index i = 0; i < r.singular_values.size(); ++i)
    if (r.singular_values[i] > 1e-10 * smax) ++r.rank;
  r.verdict = (r.rank == r.required) ? Verdict::Pass : Verdict::Fail;
  return r;
}

double boundary_observability_constant(const PortHamiltonianSystem& sys,
                                       Endpoint eta) {
  if (sys.order != 1)
    throw unsupported_order_error(
        "boundary observability constant: first-order systems only");
  const int m = sys.m;
  const int tz = 2 * m;
  const double inf = std::numeric_limits<double>::infinity();

  // Orthonormal kernel basis of W_B1 (threshold 1e-10 * sigma_max).
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
  if (Q.cols() == 0) return inf;

  const Mat A = Q.transpose() *
                (sys.Wb2.transpose() * sys.Wb2 + sys.Wc.transpose() * sys.Wc) *
                Q;
  Mat Sel = Mat::Zero(m, tz);
  if (eta == Endpoint::Right)
    Sel.leftCols(m).setIdentity();
  else
    Sel.block(0, m, m, m).setIdentity();
  const Mat SQ = Sel * Q;
  const Mat B = SQ.transpose() * SQ;

  Eigen::SelfAdjointEigenSolver<Mat> esB(B);
  const double bmax = esB.eigenvalues().maxCoeff();
  if (bmax <= 1e-14) return inf;  // z_eta vanishes on the kernel
  const double bth = 1e-12 * bmax;
  std::vector<int> rng_idx, nul_idx;
  for (int i = 0; i < B.rows(); ++i)
    (esB.eigenvalues()[i] > bth ? rng_idx : nul_idx).push_back(i);

  Mat U1(B.rows(), rng_idx.size()), U0(B.rows(), nul_idx.size());
  Vec lam1(rng_idx.size());
  for (std::size_t i = 0; i < rng_idx.size(); ++i) {
    U1.col(i) = esB.eigenvectors().col(rng_idx[i]);
    lam1[i] = esB.eigenvalues()[rng_idx[i]];
  }
  for (std::size_t i = 0; i < nul_idx.size(); ++i)
    U0.col(i) = esB.eigenvectors().col(nul_idx[i]);

  const Mat A11 = U1.transpose() * A * U1;
  Mat S = A11;
  if (U0.cols() > 0) {
    const Mat A10 = U1.transpose() * A * U0;
    const Mat A00 = U0.transpose() * A * U0;
    // Pseudo-inverse of the PSD block.
    Eigen::SelfAdjointEigenSolver<Mat> es0(A00);
    const double amax = std::max(es0.eigenvalues().maxCoeff(), 0.0);
    Mat pinv = Mat::Zero(A00.rows(), A00.cols());
    for (int i = 0; i < A00.rows(); ++i)
      if (es0.eigenvalues()[i] > 1e-12 * std::max(amax, 1e-300))
        pinv += es0.eigenvectors().col(i) * es0.eigenvectors().col(i).transpose() /
                es0.eigenvalues()[i];
    S = A11 - A10 * pinv * A10.transpose();
  }
  const Vec isq = lam1.cwiseSqrt().cwiseInverse();
  const Mat Sn = isq.asDiagonal() * S * isq.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Mat> esS(0.5 * (Sn + Sn.transpose()));
  return std::max(0.0, esS.eigenvalues().minCoeff());
}

ControllerBasicResult check_controller_basic(const Controller& ctrl,
                                             double sample_radius,
                                             int n_samples,
                                             std::uint64_t seed) {
  ControllerBasicResult r;
  Rng rng(seed);
  const int mc = ctrl.mc;

  Eigen::SelfAdjointEigenSolver<Mat> esK(0.5 * (ctrl.K + ctrl.K.transpose()));
  r.mass_spd = (ctrl.K - ctrl.K.transpose()).norm() <=
                   1e-12 * std::max(1.0, ctrl.K.norm()) &&
               esK.eigenvalues().minCoeff() > 0.0;
  r.feedthrough_sigma = feedthrough_sigma(ctrl.Sc);
  r.feedthrough_ok = r.feedthrough_sigma > 0.0;
  if (!r.feedthrough_ok) {
    Eigen::SelfAdjointEigenSolver<Mat> esS(0.5 *
                                           (ctrl.Sc + ctrl.Sc.transpose()));
    Witness w;
    w.what = "direction on which sym(S_c) is not positive definite";
    w.point = esS.eigenvectors().col(0);
    w.violation = -esS.eigenvalues().minCoeff();
    r.witness = w;
  }

  const Vec zero = Vec::Zero(mc);
  r.potential_zero_at_origin = std::abs(ctrl.potential(zero)) <= 1e-14;
  r.damping_zero_at_origin = ctrl.damping(zero).norm() <= 1e-14;

  r.potential_positive = true;
  r.damping_nonnegative = true;
  for (int s = 0; s < n_samples; ++s) {
    Vec v = rng.normal_vec(mc);
    v *= rng.uniform(1e-3, sample_radius) / std::max(v.norm(), 1e-300);
    const double p = ctrl.potential(v);
    if (p <= 0.0 && r.potential_positive) {
      r.potential_positive = false;
      if (!r.witness) {
        Witness w;
        w.what = "controller sample with nonpositive potential";
        w.point = v;
        w.violation = -p;
        r.witness = w;
      }
    }
    const Vec w2 = v;
    const double dd = w2.dot(ctrl.damping(w2));
    if (dd < -1e-12 && r.damping_nonnegative) {
      r.damping_nonnegative = false;
      if (!r.witness) {
        Witness w;
        w.what = "controller sample with negative damping power";
        w.point = w2;
        w.violation = -dd;
        r.witness = w;
      }
    }
  }

  // Growth along rays out to the sample radius (sampled, not proven).
  r.potential_growing = true;
  for (int d = 0; d < 16; ++d) {
    Vec u = rng.normal_vec(mc);
    u /= std::max(u.norm(), 1e-300);
    const double p_half = ctrl.potential(0.5 * sample_radius * u);
    const double p_full = ctrl.potential(sample_radius * u);
    if (!(p_full > p_half && p_full > 0.0)) r.potential_growing = false;
  }

  // Gradient consistency against central differences.
  r.grad_check_rel_error = 0.0;
  for (int s = 0; s < 8; ++s) {
    Vec v = rng.normal_vec(mc);
    v *= rng.uniform(0.1, sample_radius) / std::max(v.norm(), 1e-300);
    const double step = 1e-5 * std::max(1.0, v.norm());
    Vec fd(mc);
    for (int j = 0; j < mc; ++j) {
      Vec e = Vec::Zero(mc);
      e[j] = step;
      fd[j] = (ctrl.potential(v + e) - ctrl.potential(v - e)) / (2 * step);
    }
    const Vec an = ctrl.potential_grad(v);
    r.grad_check_rel_error =
        std::max(r.grad_check_rel_error,
                 (fd - an).norm() / std::max(1.0, an.norm()));
  }
  r.grad_consistent = r.grad_check_rel_error < 1e-5;

  const bool pass = r.mass_spd && r.feedthrough_ok &&
                    r.potential_zero_at_origin && r.damping_zero_at_origin &&
                    r.potential_positive && r.potential_growing &&
                    r.damping_nonnegative && r.grad_consistent;
  r.verdict = pass ? Verdict::Pass : Verdict::Fail;
  return r;
}

QuasiConstantsResult estimate_quasi_constants(const Controller& ctrl,
                                              double sample_radius,
                                              int n_samples,
                                              std::uint64_t seed) {
  QuasiConstantsResult r;
  Rng rng(seed);
  const int mc = ctrl.mc;
  const double radii[3] = {sample_radius, 2.0 * sample_radius,
                           4.0 * sample_radius};
  double c1l[3], c1h[3], c2l[3], c2h[3];
  bool sign_ok = true;
  Vec bad_point;

  for (int tier = 0; tier < 3; ++tier) {
    c1l[tier] = std::numeric_limits<double>::infinity();
    c2l[tier] = std::numeric_limits<double>::infinity();
    c1h[tier] = 0.0;
    c2h[tier] = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      Vec v = rng.normal_vec(mc);
      v *= rng.uniform(1e-3, radii[tier]) / std::max(v.norm(), 1e-300);
      const double p = ctrl.potential(v);
      const double vg = v.dot(ctrl.potential_grad(v));
      if (vg <= 0.0 && v.norm() > 1e-10) {
        sign_ok = false;
        bad_point = v;
        continue;
      }
      c1l[tier] = std::min(c1l[tier], p / v.squaredNorm());
      if (vg > 0.0) c1h[tier] = std::max(c1h[tier], 2.0 * p / vg);

      const Vec w = v;
      const Vec Rw = ctrl.damping(w);
      const double wr = w.dot(Rw);
      if (wr > 0.0) c2h[tier] = std::max(c2h[tier], w.squaredNorm() / wr);
      if (Rw.squaredNorm() > 0.0)
        c2l[tier] = std::min(c2l[tier], w.squaredNorm() / Rw.squaredNorm());
      if (wr <= 0.0 && w.norm() > 1e-10) {
        sign_ok = false;
        bad_point = w;
      }
    }
  }

  r.c1_low = std::min({c1l[0], c1l[1], c1l[2]});
  r.c1_high = std::max({c1h[0], c1h[1], c1h[2]});
  r.c2_low = std::min({c2l[0], c2l[1], c2l[2]});
  r.c2_high = std::max({c2h[0], c2h[1], c2h[2]});
  r.c1_high_tier_growth = c1h[2] / std::max(c1h[0], 1e-300);
  r.c2_high_tier_growth = c2h[2] / std::max(c2h[0], 1e-300);
  const double c1_low_decay = c1l[2] / std::max(c1l[0], 1e-300);
  const double c2_low_decay = c2l[2] / std::max(c2l[0], 1e-300);

  r.quasi_quadratic = sign_ok && r.c1_low > 1e-12 &&
                      r.c1_high_tier_growth < 1.5 && c1_low_decay > 0.6;
  r.quasi_linear = sign_ok && r.c2_high_tier_growth < 1.5 &&
                   c2_low_decay > 0.6 && r.c2_high > 0.0;
  if (!sign_ok) {
    Witness w;
    w.what = "sample with nonpositive v.grad P or w.R(w)";
    w.point = bad_point;
    r.witness = w;
  }
  r.verdict =
      (r.quasi_quadratic && r.quasi_linear) ? Verdict::Pass : Verdict::Fail;
  return r;
}

StrictDampingResult check_strict_damping(const Controller& ctrl,
                                         const Vec& delta_grid,
                                         double sample_radius, int n_samples,
                                         std::uint64_t seed) {
  StrictDampingResult r;
  const int mc = ctrl.mc;

  Eigen::JacobiSVD<Mat> svd(ctrl.Bc);
  r.bc_sigma_min = svd.singularValues().size() > 0
                       ? svd.singularValues().minCoeff()
                       : 0.0;
  if (ctrl.Bc.rows() < ctrl.Bc.cols()) r.bc_sigma_min = 0.0;
  r.bc_injective =
      r.bc_sigma_min > 1e-12 * std::max(svd.singularValues().maxCoeff(), 1e-300);

  for (Eigen::Index id = 0; id < delta_grid.size(); ++id) {
    const double delta = delta_grid[id];
    Rng rng(seed);  // identical samples per delta keeps the scan deterministic
    double c_low = std::numeric_limits<double>::infinity();
    double c_high = std::numeric_limits<double>::infinity();
    for (int s = 0; s < n_samples; ++s) {
      Vec u = rng.normal_vec(mc);
      u /= std::max(u.norm(), 1e-300);
      // log-spaced radii inside, uniform outside
      const double rin = delta * std::pow(10.0, rng.uniform(-6.0, 0.0));
      const Vec win = rin * u;
      c_low = std::min(c_low, win.dot(ctrl.damping(win)) / win.squaredNorm());
      const double rout = rng.uniform(delta, std::max(sample_radius, delta * 2));
      const Vec wout = rout * u;
      c_high = std::min(c_high, wout.dot(ctrl.damping(wout)));
    }
    if (c_low > 1e-12 && c_high > 1e-12) {
      r.c_low = c_low;
      r.c_high = c_high;
      r.delta = delta;
      r.verdict = r.bc_injective ? Verdict::Pass : Verdict::Fail;
      return r;
    }
    if (id == delta_grid.size() - 1) {
      Witness w;
      w.what = "no delta in the grid yields positive two-regime damping bounds";
      w.point = delta_grid;
      w.violation = -std::min(c_low, c_high);
      r.witness = w;
    }
  }
  r.verdict = Verdict::Fail;
  return r;
}

EquilibriumResult check_equilibrium_uniqueness(const Controller& ctrl,
                                               double sample_radius,
                                               int n_starts,
                                               std::uint64_t seed) {
  EquilibriumResult r;
  Rng rng(seed);
  const int mc = ctrl.mc;
  r.total = n_starts;

  for (int s = 0; s < n_starts; ++s) {
    Vec v = rng.normal_vec(mc);
    v *= rng.uniform(0.0, sample_radius) / std::max(v.norm(), 1e-300);
    // Damped Newton on grad P = 0.
    bool converged = false;
    for (int it = 0; it < 80; ++it) {
      const Vec g = ctrl.potential_grad(v);
      if (g.norm() < 1e-12 * (1.0 + sample_radius)) {
        converged = true;
        break;
      }
      const Mat H = ctrl.hess_or_fd(v);
      Vec step;
      const Eigen::FullPivLU<Mat> lu(H);
      if (lu.isInvertible())
        step = -lu.solve(g);
      else
        step = -g;  // gradient fallback
      double alpha = 1.0;
      const double g0 = g.squaredNorm();
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Vec cand = v + alpha * step;
        if (ctrl.potential_grad(cand).squaredNorm() < g0) {
          v = cand;
          improved = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!improved) break;
    }
    if (!converged) {
      ++r.stalled;
      continue;
    }
    if (v.norm() < 1e-6 * std::max(1.0, sample_radius)) {
      ++r.converged_to_zero;
    } else {
      Witness w;
      w.what = "nonzero critical point of the potential";
      w.point = v;
      w.violation = v.norm();
      r.witness = w;
      r.verdict = Verdict::Fail;
      return r;
    }
  }
  if (r.stalled > 0 && r.converged_to_zero + r.stalled == r.total)
    r.verdict = Verdict::Indeterminate;
  else
    r.verdict = (r.converged_to_zero == r.total) ? Verdict::Pass
                                                 : Verdict::Indeterminate;
  return r;
}

ConditionReport run_all_conditions(const PortHamiltonianSystem& sys,
                                   const Controller& ctrl,
                                   const ConditionOptions& opts) {
  ConditionReport rep;
  rep.seed = opts.seed;
  rep.tol_structural = opts.tol_structural;
  rep.tol_quadrature = opts.tol_quadrature;

  Rng rng(opts.seed);
  rep.structure = check_structure(sys);
  rep.impedance =
      check_impedance_passivity(sys, opts.impedance_tests, opts.impedance_nodes,
                                rng.fork_seed(), opts.tol_quadrature);
  rep.surjectivity = check_surjectivity(sys);
  if (sys.order == 1) {
    ObservabilityResult obs;
    obs.kappa_a = boundary_observability_constant(sys, Endpoint::Left);
    obs.kappa_b = boundary_observability_constant(sys, Endpoint::Right);
    const double tol = 1e-8;
    obs.verdict =
        (obs.kappa_a > tol || obs.kappa_b > tol) ? Verdict::Pass : Verdict::Fail;
    rep.observability = obs;
  }
  rep.controller_basic = check_controller_basic(
      ctrl, opts.sample_radius, opts.n_samples, rng.fork_seed());
  rep.quasi_constants = estimate_quasi_constants(
      ctrl, opts.sample_radius, opts.n_samples, rng.fork_seed());
  rep.strict_damping = check_strict_damping(
      ctrl, opts.delta_grid, opts.sample_radius, opts.n_samples,
      rng.fork_seed());
  rep.equilibrium = check_equilibrium_uniqueness(
      ctrl, opts.sample_radius, opts.n_starts, rng.fork_seed());

  const bool solvability = rep.structure.verdict == Verdict::Pass &&
                           rep.impedance.verdict == Verdict::Pass &&
                           rep.surjectivity.verdict == Verdict::Pass &&
                           rep.controller_basic.verdict == Verdict::Pass;
  const bool kappa_pos =
      rep.observability && rep.observability->verdict == Verdict::Pass;
  rep.approximate_observability =
      rep.impedance.energy_preserving && kappa_pos;
  rep.uniform_iss_hypotheses =
      solvability && kappa_pos && sys.density.absolutely_continuous &&
      rep.quasi_constants.verdict == Verdict::Pass;
  rep.weak_iss_hypotheses = solvability &&
                            rep.strict_damping.verdict == Verdict::Pass &&
                            rep.strict_damping.bc_injective &&
                            rep.equilibrium.verdict == Verdict::Pass &&
                            rep.approximate_observability;
  return rep;
}

bool ConditionReport::all_pass() const {
  const bool solvability = structure.verdict == Verdict::Pass &&
                           impedance.verdict == Verdict::Pass &&
                           surjectivity.verdict == Verdict::Pass &&
                           controller_basic.verdict == Verdict::Pass;
  return solvability && (uniform_iss_hypotheses || weak_iss_hypotheses);
}

namespace {

using json = nlohmann::ordered_json;

json witness_json(const std::optional<Witness>& w) {
  if (!w) return nullptr;
  json j;
  j["what"] = w->what;
  j["point"] = std::vector<double>(w->point.data(),
                                   w->point.data() + w->point.size());
  j["violation"] = w->violation;
  return j;
}

double json_inf(double v) {
  // JSON has no infinity; report a sentinel consistent with the docs.
  if (std::isinf(v)) return 1e308;
  return v;
}

}  // namespace

nlohmann::ordered_json ConditionReport::to_json() const {
  json j;
  j["meta"] = {{"seed", seed},
               {"tol_structural", tol_structural},
               {"tol_quadrature", tol_quadrature}};
  j["structure"] = {{"verdict", to_string(structure.verdict)},
                    {"pn_invertible", structure.pn_invertible},
                    {"pn_smin_rel", structure.pn_smin_rel},
                    {"parity_ok", structure.parity_ok},
                    {"parity_deviation", structure.parity_deviation},
                    {"p0_dissipative", structure.p0_dissipative},
                    {"p0_max_eigenvalue", structure.p0_max_eigenvalue},
                    {"density_ok", structure.density_ok},
                    {"shapes_ok", structure.shapes_ok},
                    {"witness", witness_json(structure.witness)}};
  j["impedance_passivity"] = {
      {"verdict", to_string(impedance.verdict)},
      {"energy_preserving", impedance.energy_preserving},
      {"max_signed_residual", impedance.max_signed_residual},
      {"max_abs_residual", impedance.max_abs_residual},
      {"n_tests", impedance.n_tests},
      {"n_nodes", impedance.n_nodes},
      {"tol", impedance.tol}};
  j["boundary_surjectivity"] = {
      {"verdict", to_string(surjectivity.verdict)},
      {"rank", surjectivity.rank},
      {"required", surjectivity.required},
      {"singular_values",
       std::vector<double>(surjectivity.singular_values.data(),
                           surjectivity.singular_values.data() +
                               surjectivity.singular_values.size())}};
  if (observability) {
    j["boundary_observability"] = {
        {"verdict", to_string(observability->verdict)},
        {"kappa_a", json_inf(observability->kappa_a)},
        {"kappa_b", json_inf(observability->kappa_b)}};
  } else {
    j["boundary_observability"] = nullptr;
  }
  j["controller_admissibility"] = {
      {"verdict", to_string(controller_basic.verdict)},
      {"mass_spd", controller_basic.mass_spd},
      {"feedthrough_sigma", controller_basic.feedthrough_sigma},
      {"feedthrough_ok", controller_basic.feedthrough_ok},
      {"potential_zero_at_origin", controller_basic.potential_zero_at_origin},
      {"damping_zero_at_origin", controller_basic.damping_zero_at_origin},
      {"potential_positive", controller_basic.potential_positive},
      {"potential_growing", controller_basic.potential_growing},
      {"damping_nonnegative", controller_basic.damping_nonnegative},
      {"grad_check_rel_error", controller_basic.grad_check_rel_error},
      {"witness", witness_json(controller_basic.witness)}};
  j["quasi_quadratic_potential_and_quasi_linear_damping"] = {
      {"verdict", to_string(quasi_constants.verdict)},
      {"c1_low", json_inf(quasi_constants.c1_low)},
      {"c1_high", json_inf(quasi_constants.c1_high)},
      {"c2_low", json_inf(quasi_constants.c2_low)},
      {"c2_high", json_inf(quasi_constants.c2_high)},
      {"quasi_quadratic", quasi_constants.quasi_quadratic},
      {"quasi_linear", quasi_constants.quasi_linear},
      {"c1_high_tier_growth", json_inf(quasi_constants.c1_high_tier_growth)},
      {"c2_high_tier_growth", json_inf(quasi_constants.c2_high_tier_growth)},
      {"witness", witness_json(quasi_constants.witness)}};
  j["strict_damping"] = {{"verdict", to_string(strict_damping.verdict)},
                         {"c_low", strict_damping.c_low},
                         {"c_high", strict_damping.c_high},
                         {"delta", strict_damping.delta},
                         {"bc_sigma_min", strict_damping.bc_sigma_min},
                         {"bc_injective", strict_damping.bc_injective},
                         {"witness", witness_json(strict_damping.witness)}};
  j["unique_equilibrium"] = {{"verdict", to_string(equilibrium.verdict)},
                             {"converged_to_zero", equilibrium.converged_to_zero},
                             {"stalled", equilibrium.stalled},
                             {"total", equilibrium.total},
                             {"witness", witness_json(equilibrium.witness)}};
  j["implications"] = {
      {"approximate_observability_via_energy_preservation",
       approximate_observability},
      {"uniform_iss_hypotheses", uniform_iss_hypotheses},
      {"weak_iss_hypotheses", weak_iss_hypotheses}};
  j["all_pass"] = all_pass();
  return j;
}

}  // namespace hamport::conditions
