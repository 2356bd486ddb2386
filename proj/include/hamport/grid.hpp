#pragma once

#include "hamport/common.hpp"

namespace hamport {

// Uniform grid on [a,b] with n nodes. Grid functions with m components per
// node are stored node-major: component block of node i is x.segment(i*m, m).
struct Grid {
  double a = 0.0;
  double b = 1.0;
  int n = 2;

  Grid() = default;
  Grid(double a_, double b_, int n_) : a(a_), b(b_), n(n_) {
    require(b > a, "grid: interval endpoints must satisfy a < b");
    require(n >= 2, "grid: need at least two nodes");
  }

  double h() const { return (b - a) / (n - 1); }
  double node(int i) const { return a + i * h(); }

  Vec nodes() const {
    Vec z(n);
    for (int i = 0; i < n; ++i) z[i] = node(i);
    return z;
  }
};

enum class QuadratureRule { Trapezoid, Simpson };

// Composite quadrature weights on the grid nodes.
inline Vec quadrature_weights(const Grid& g, QuadratureRule rule) {
  Vec w(g.n);
  const double h = g.h();
  switch (rule) {
    case QuadratureRule::Trapezoid:
      w.setConstant(h);
      w[0] = w[g.n - 1] = 0.5 * h;
      return w;
    case QuadratureRule::Simpson: {
      require(g.n >= 3 && g.n % 2 == 1,
              "quadrature: Simpson rule needs an odd node count >= 3");
      w.setZero();
      for (int i = 0; i + 2 < g.n; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
      }
      return w;
    }
  }
  throw input_error("quadrature: unknown rule");
}

}  // namespace hamport
