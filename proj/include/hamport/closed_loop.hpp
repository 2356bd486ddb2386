#pragma once

#include "hamport/controller.hpp"
#include "hamport/system.hpp"

#include <functional>

namespace hamport {

// Closed-loop state (x, v1, v2): plant grid function plus controller state.
struct ClosedLoopState {
  Vec x;
  Vec v1;
  Vec v2;

  void check_finite() const {
    require(all_finite(x) && all_finite(v1) && all_finite(v2),
            "closed-loop state: non-finite entries");
  }
};

// Total energy E(x) + P(v1) + 1/2 v2^T K v2.
double closed_loop_energy(const PortHamiltonianSystem& sys,
                          const Controller& ctrl, const ClosedLoopState& state,
                          const Grid& g,
                          QuadratureRule rule = QuadratureRule::Trapezoid);

// Evaluators of the closed-loop boundary input and output maps obtained from
// the feedback interconnection y = u_c, u = d - y_c:
//   B(x,v) = Bx + B_c^T K v2 + S_c Cx,   C(x,v) = Cx.
struct InterconnectionMaps {
  std::function<Vec(const ClosedLoopState&)> boundary_input;   // B tilde
  std::function<Vec(const ClosedLoopState&)> boundary_output;  // C tilde
};

InterconnectionMaps interconnection_maps(const PortHamiltonianSystem& sys,
                                         const Controller& ctrl,
                                         const Grid& g);

}  // namespace hamport
