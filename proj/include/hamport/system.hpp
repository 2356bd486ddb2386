#pragma once

#include "hamport/common.hpp"
#include "hamport/energy_density.hpp"
#include "hamport/grid.hpp"

#include <vector>

namespace hamport {

// Boundary trace vector z of a grid function, ordered right endpoint block
// first: z = ((Hx)|_b ; (Hx)|_a), each block stacking the values and the
// first N-1 spatial derivatives of Hx at that endpoint.
struct BoundaryTrace {
  Vec z;
  int m = 0;
  int order = 1;

  int size() const { return static_cast<int>(z.size()); }
  // Endpoint sub-block (values + derivatives, length m*order).
  Vec block_b() const { return z.head(m * order); }
  Vec block_a() const { return z.tail(m * order); }
  // Value part (Hx)(eta) of an endpoint block, length m.
  Vec value_b() const { return z.head(m); }
  Vec value_a() const { return z.segment(m * order, m); }
};

// Linear port-Hamiltonian system of order N on (a,b) with boundary control
// and observation: x' = sum_l P_l d^l(Hx) + P_0 Hx, u = W_B2 z, y = W_C z,
// subject to W_B1 z = 0, where z is the boundary trace of Hx.
struct PortHamiltonianSystem {
  int order = 1;           // N
  int m = 0;               // state components
  double a = 0.0, b = 1.0;
  std::vector<Mat> P;      // P[0], ..., P[order]
  Mat Wb1;                 // (m*order - k) x 2*m*order
  Mat Wb2;                 // k x 2*m*order
  Mat Wc;                  // k x 2*m*order
  EnergyDensity density;

  int k() const { return static_cast<int>(Wb2.rows()); }
  int trace_size() const { return 2 * m * order; }

  // Structural sanity: shapes consistent, P_N invertible, parity symmetry,
  // P_0 dissipative, density bounds. Throws input_error on violation.
  void validate() const;
};

struct BoundaryPortValues {
  Vec u;            // W_B2 z
  Vec y;            // W_C z
  Vec bc_residual;  // W_B1 z; zero iff the trace is compatible with D(A)
};

// Plant energy 1/2 * quadrature(x^T H x). Grid layout is node-major with m
// components per node.
double energy(const PortHamiltonianSystem& sys, const Vec& x, const Grid& g,
              QuadratureRule rule = QuadratureRule::Trapezoid);

// H-weighted inner product <x, w>_X = quadrature(x^T H w).
double weighted_inner(const PortHamiltonianSystem& sys, const Vec& x,
                      const Vec& w, const Grid& g,
                      QuadratureRule rule = QuadratureRule::Trapezoid);

// Boundary trace of Hx with one-sided second-order endpoint derivatives.
BoundaryTrace boundary_trace(const PortHamiltonianSystem& sys, const Vec& x,
                             const Grid& g);

BoundaryPortValues apply_boundary_ops(const PortHamiltonianSystem& sys,
                                      const BoundaryTrace& trace);

// H applied node-wise: w_i = H(zeta_i) x_i.
Vec apply_density(const PortHamiltonianSystem& sys, const Vec& x,
                  const Grid& g);

}  // namespace hamport
