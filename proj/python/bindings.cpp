#include "hamport/conditions.hpp"
#include "hamport/diagnostics.hpp"
#include "hamport/models.hpp"
#include "hamport/runner.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace hamport;

namespace {

DisturbanceSignal make_signal(const std::string& kind, int k, double amplitude,
                              double duration, double rate, double t0,
                              double t1, double cell, std::uint64_t seed) {
  ScenarioConfig::Disturbance d;
  d.kind = kind;
  d.duration = duration;
  d.rate = rate;
  d.t0 = t0;
  d.t1 = t1;
  d.cell = cell;
  return signal_from_config(d, k, amplitude, seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Boundary-controlled port-Hamiltonian closed loops: models, condition "
      "certification, energy-consistent discretization, simulation, and "
      "stability diagnostics";

  py::class_<PortHamiltonianSystem>(m, "PortHamiltonianSystem")
      .def_readonly("order", &PortHamiltonianSystem::order)
      .def_readonly("m", &PortHamiltonianSystem::m)
      .def_readonly("a", &PortHamiltonianSystem::a)
      .def_readonly("b", &PortHamiltonianSystem::b)
      .def_property_readonly("k", &PortHamiltonianSystem::k)
      .def_readonly("Wb1", &PortHamiltonianSystem::Wb1)
      .def_readonly("Wb2", &PortHamiltonianSystem::Wb2)
      .def_readonly("Wc", &PortHamiltonianSystem::Wc)
      .def("validate", &PortHamiltonianSystem::validate);

  py::class_<Controller>(m, "Controller")
      .def_readonly("mc", &Controller::mc)
      .def_readonly("k", &Controller::k)
      .def_readonly("K", &Controller::K)
      .def_readonly("Bc", &Controller::Bc)
      .def_readonly("Sc", &Controller::Sc)
      .def_readonly("sigma", &Controller::sigma)
      .def_readonly("name", &Controller::name)
      .def("potential",
           [](const Controller& c, const Vec& v) { return c.potential(v); })
      .def("potential_grad",
           [](const Controller& c, const Vec& v) {
             return c.potential_grad(v);
           })
      .def("damping",
           [](const Controller& c, const Vec& v) { return c.damping(v); });

  py::class_<FiniteModel>(m, "FiniteModel")
      .def_readonly("m", &FiniteModel::m)
      .def_readonly("mc", &FiniteModel::mc)
      .def_readonly("k", &FiniteModel::k)
      .def_readonly("scheme", &FiniteModel::scheme)
      .def_property_readonly("n",
                             [](const FiniteModel& f) { return f.grid.n; })
      .def_property_readonly("dim", &FiniteModel::dim)
      .def("energy", &FiniteModel::energy)
      .def("norm", &FiniteModel::norm_M)
      .def("rhs", &FiniteModel::rhs)
      .def("output", &FiniteModel::output)
      .def("weight_matrix", &FiniteModel::weight_matrix);

  py::class_<DisturbanceSignal>(m, "DisturbanceSignal")
      .def_property_readonly("channels", &DisturbanceSignal::channels)
      .def("value", &DisturbanceSignal::value)
      .def("norm_sq", &DisturbanceSignal::norm_sq)
      .def("norm_sq_total", &DisturbanceSignal::norm_sq_total)
      .def("shifted", &DisturbanceSignal::shifted)
      .def("truncated", &DisturbanceSignal::truncated);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("times", &Trajectory::times)
      .def_readonly("energy_total", &Trajectory::energy_total)
      .def_readonly("energy_plant", &Trajectory::energy_plant)
      .def_readonly("energy_ctrl", &Trajectory::energy_ctrl)
      .def_readonly("norm_state", &Trajectory::norm_state)
      .def_readonly("outputs", &Trajectory::outputs)
      .def_readonly("dnorm_sq", &Trajectory::dnorm_sq)
      .def_readonly("final_state", &Trajectory::final_state)
      .def_property_readonly("ok", [](const Trajectory& t) {
        return t.status == Trajectory::Status::Ok;
      });

  m.def("vibrating_string",
        py::overload_cast<double, double, double, double>(&vibrating_string),
        py::arg("rho"), py::arg("T"), py::arg("a") = 0.0, py::arg("b") = 1.0);
  m.def("timoshenko_beam",
        py::overload_cast<double, double, double, double, double, double>(
            &timoshenko_beam),
        py::arg("rho"), py::arg("EI"), py::arg("Ir"), py::arg("K_shear"),
        py::arg("a") = 0.0, py::arg("b") = 1.0);
  m.def(
      "controller",
      [](const std::string& name, int k, double quartic) {
        ControllerParams params;
        params.mc = params.k = k;
        params.quartic = quartic;
        return controller_library(name, params);
      },
      py::arg("name"), py::arg("k") = 1, py::arg("quartic") = 0.0);
  m.def("preset_names", &preset_names);
  m.def(
      "preset",
      [](const std::string& name) {
        const ScenarioPreset p = make_preset(name);
        return py::make_tuple(p.system, p.controller);
      },
      py::arg("name"));

  m.def("discretize_closed_loop", &discretize_closed_loop, py::arg("system"),
        py::arg("controller"), py::arg("n"), py::arg("scheme") = "sbp-sat");
  m.def("discretize_plant", &discretize_plant, py::arg("system"), py::arg("n"),
        py::arg("scheme") = "sbp-sat");
  m.def("spectrum", [](const FiniteModel& model) {
    const auto ev = discrete_generator_spectrum(model);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(ev.size()));
    for (std::size_t i = 0; i < ev.size(); ++i) v[i] = ev[i];
    return v;
  });
  m.def(
      "verify_semidiscrete_balance",
      [](const FiniteModel& model, int n_states, std::uint64_t seed) {
        const auto r = verify_semidiscrete_balance(model, n_states, seed);
        return py::make_tuple(r.boundary_residual, r.interior_term);
      },
      py::arg("model"), py::arg("n_states") = 20, py::arg("seed") = 1);

  m.def("signal", &make_signal, py::arg("kind"), py::arg("k") = 1,
        py::arg("amplitude") = 1.0, py::arg("duration") = 1.0,
        py::arg("rate") = 1.0, py::arg("t0") = 0.0, py::arg("t1") = 1.0,
        py::arg("cell") = 1e-3, py::arg("seed") = 1);

  m.def(
      "simulate",
      [](const FiniteModel& model, const Vec& x0, const DisturbanceSignal& d,
         double T, double dt) { return simulate(model, x0, d, T, dt); },
      py::arg("model"), py::arg("x0"), py::arg("signal"), py::arg("T"),
      py::arg("dt"));
  m.def("random_smooth_state", &random_smooth_state, py::arg("model"),
        py::arg("seed"), py::arg("norm") = 1.0);
  m.def("dissipation_residual", &dissipation_residual);
  m.def("ugs_margin", &ugs_margin, py::arg("trajectory"), py::arg("sigma"));
  m.def(
      "convergence_time",
      [](const Trajectory& t, double eps) -> py::object {
        const auto r = convergence_time(t, eps);
        if (!r) return py::none();
        return py::float_(*r);
      },
      py::arg("trajectory"), py::arg("eps"));
  m.def(
      "cocycle_check",
      [](const FiniteModel& model, const Vec& x0, const DisturbanceSignal& d,
         double s, double t, double dt) {
        return cocycle_check(model, x0, d, s, t, dt);
      },
      py::arg("model"), py::arg("x0"), py::arg("signal"), py::arg("s"),
      py::arg("t"), py::arg("dt"));

  m.def(
      "run_conditions",
      [](const PortHamiltonianSystem& sys, const Controller& ctrl,
         std::uint64_t seed) {
        conditions::ConditionOptions opts;
        opts.seed = seed;
        const auto rep = conditions::run_all_conditions(sys, ctrl, opts);
        return rep.to_json().dump();
      },
      py::arg("system"), py::arg("controller"), py::arg("seed") = 12345,
      "Full condition report as a JSON string");
  m.def(
      "boundary_observability_constant",
      [](const PortHamiltonianSystem& sys, const std::string& endpoint) {
        const auto e = endpoint == "a" ? conditions::Endpoint::Left
                                       : conditions::Endpoint::Right;
        return conditions::boundary_observability_constant(sys, e);
      },
      py::arg("system"), py::arg("endpoint"));
}
