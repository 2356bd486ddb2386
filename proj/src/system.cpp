#include "hamport/system.hpp"

#include <Eigen/SVD>

namespace hamport {

void PortHamiltonianSystem::validate() const {
  require(order >= 1, "system: order must be >= 1");
  require(m >= 1, "system: state dimension must be >= 1");
  require(b > a, "system: interval endpoints must satisfy a < b");
  require(static_cast<int>(P.size()) == order + 1,
          "system: expected P_0..P_N matrices");
  for (const Mat& Pl : P)
    require(Pl.rows() == m && Pl.cols() == m, "system: P_l must be m x m");

  const int kk = k();
  require(kk >= 1 && kk <= m * order, "system: k must satisfy 1 <= k <= mN");
  require(Wb1.rows() == m * order - kk && Wb1.cols() == trace_size(),
          "system: W_B1 must be (mN-k) x 2mN");
  require(Wb2.cols() == trace_size() && Wc.rows() == kk &&
              Wc.cols() == trace_size(),
          "system: W_B2, W_C must be k x 2mN");

  // P_N invertible.
  Eigen::JacobiSVD<Mat> svd(P[order]);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  require(smin > 1e-12 * std::max(smax, 1e-300), "system: P_N is singular");

  // Parity: P_l^T = (-1)^{l+1} P_l.
  for (int l = 1; l <= order; ++l) {
    const double sign = (l % 2 == 1) ? 1.0 : -1.0;
    const double dev = (P[l].transpose() - sign * P[l]).norm();
    require(dev <= 1e-12 * std::max(1.0, P[l].norm()),
            "system: P_l parity symmetry violated");
  }

  // P_0 dissipative: largest eigenvalue of P_0 + P_0^T <= 0.
  Eigen::SelfAdjointEigenSolver<Mat> es(P[0] + P[0].transpose());
  require(es.eigenvalues().maxCoeff() <= 1e-12,
          "system: P_0 is not dissipative");

  const auto check = hamport::validate(density, a, b);
  require(check.ok(), "system: energy density violates symmetry or bounds");
}

Vec apply_density(const PortHamiltonianSystem& sys, const Vec& x,
                  const Grid& g) {
  const int m = sys.m;
  require(x.size() == static_cast<Eigen::Index>(m) * g.n,
          "apply_density: state size does not match grid");
  Vec w(x.size());
  for (int i = 0; i < g.n; ++i)
    w.segment(i * m, m) = sys.density(g.node(i)) * x.segment(i * m, m);
  return w;
}

double energy(const PortHamiltonianSystem& sys, const Vec& x, const Grid& g,
              QuadratureRule rule) {
  return 0.5 * weighted_inner(sys, x, x, g, rule);
}

double weighted_inner(const PortHamiltonianSystem& sys, const Vec& x,
                      const Vec& w, const Grid& g, QuadratureRule rule) {
  const int m = sys.m;
  require(x.size() == static_cast<Eigen::Index>(m) * g.n &&
              w.size() == x.size(),
          "weighted_inner: state size does not match grid and m");
  const Vec q = quadrature_weights(g, rule);
  double acc = 0.0;
  for (int i = 0; i < g.n; ++i) {
    const Mat H = sys.density(g.node(i));
    acc += q[i] * x.segment(i * m, m).dot(H * w.segment(i * m, m));
  }
  return acc;
}

namespace {

// One-sided derivative of a node-major grid function at an endpoint,
// second-order stencils up to the third derivative.
Vec one_sided_derivative(const Vec& w, int m, int n, double h, int deriv,
                         bool at_right) {
  auto node = [&](int j) -> Vec {
    const int idx = at_right ? (n - 1 - j) : j;
    return w.segment(idx * m, m);
  };
  const double s = at_right ? -1.0 : 1.0;  // mirrored stencils flip odd orders
  switch (deriv) {
    case 0:
      return node(0);
    case 1:
      return s * (-1.5 * node(0) + 2.0 * node(1) - 0.5 * node(2)) / h;
    case 2:
      return (2.0 * node(0) - 5.0 * node(1) + 4.0 * node(2) - node(3)) /
             (h * h);
    case 3:
      return s *
             (-2.5 * node(0) + 9.0 * node(1) - 12.0 * node(2) + 7.0 * node(3) -
              1.5 * node(4)) /
             (h * h * h);
    default:
      throw unsupported_order_error(
          "boundary_trace: derivatives above order 3 are not implemented");
  }
}

}  // namespace

BoundaryTrace boundary_trace(const PortHamiltonianSystem& sys, const Vec& x,
                             const Grid& g) {
  const int N = sys.order;
  const int m = sys.m;
  if (g.n < 2 * N + 2)
    throw resolution_error(
        "boundary_trace: grid too coarse for the requested derivatives");
  const Vec w = apply_density(sys, x, g);
  BoundaryTrace tr;
  tr.m = m;
  tr.order = N;
  tr.z.resize(2 * m * N);
  for (int l = 0; l < N; ++l) {
    tr.z.segment(l * m, m) =
        one_sided_derivative(w, m, g.n, g.h(), l, /*at_right=*/true);
    tr.z.segment((N + l) * m, m) =
        one_sided_derivative(w, m, g.n, g.h(), l, /*at_right=*/false);
  }
  return tr;
}

BoundaryPortValues apply_boundary_ops(const PortHamiltonianSystem& sys,
                                      const BoundaryTrace& trace) {
  require(trace.size() == sys.trace_size(),
          "apply_boundary_ops: trace length mismatch");
  BoundaryPortValues out;
  out.u = sys.Wb2 * trace.z;
  out.y = sys.Wc * trace.z;
  out.bc_residual = sys.Wb1 * trace.z;
  return out;
}

}  // namespace hamport
