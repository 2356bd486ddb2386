#include "hamport/closed_loop.hpp"

namespace hamport {

double closed_loop_energy(const PortHamiltonianSystem& sys,
                          const Controller& ctrl, const ClosedLoopState& state,
                          const Grid& g, QuadratureRule rule) {
  state.check_finite();
  double e = energy(sys, state.x, g, rule);
  if (!ctrl.empty()) e += ctrl.energy(state.v1, state.v2);
  return e;
}

InterconnectionMaps interconnection_maps(const PortHamiltonianSystem& sys,
                                         const Controller& ctrl,
                                         const Grid& g) {
  if (sys.k() != ctrl.k)
    throw interconnection_error(
        "interconnection: plant port dimension differs from controller input "
        "dimension");
  InterconnectionMaps maps;
  maps.boundary_input = [sys, ctrl, g](const ClosedLoopState& s) {
    const auto ports = apply_boundary_ops(sys, boundary_trace(sys, s.x, g));
    return Vec(ports.u + ctrl.Bc.transpose() * (ctrl.K * s.v2) +
               ctrl.Sc * ports.y);
  };
  maps.boundary_output = [sys, g](const ClosedLoopState& s) {
    return apply_boundary_ops(sys, boundary_trace(sys, s.x, g)).y;
  };
  return maps;
}

}  // namespace hamport
