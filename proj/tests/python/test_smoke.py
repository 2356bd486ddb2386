"""Smoke tests for the python bindings against the compiled module."""

import json
import math

import numpy as np
import pytest

import hamport


def test_module_surface():
    names = hamport.preset_names()
    assert "string_linear_pd" in names and "beam_saturating_pd" in names


def test_string_model_and_conditions():
    sys = hamport.vibrating_string(1.0, 1.0, 0.0, 1.0)
    assert sys.m == 2 and sys.k == 1
    ctrl = hamport.controller("linear_pd", k=1)
    report = json.loads(hamport.run_conditions(sys, ctrl, seed=7))
    assert report["all_pass"] is True
    assert report["implications"]["uniform_iss_hypotheses"] is True
    assert report["boundary_surjectivity"]["rank"] == 3


def test_observability_constants():
    sys = hamport.vibrating_string(1.0, 1.0, 0.0, 1.0)
    assert hamport.boundary_observability_constant(sys, "b") == pytest.approx(
        1.0, abs=1e-9
    )
    assert hamport.boundary_observability_constant(sys, "a") == pytest.approx(
        0.0, abs=1e-9
    )


def test_signal_norms():
    step = hamport.signal("truncated_step", k=1, amplitude=2.0, duration=3.0)
    assert step.norm_sq_total() == pytest.approx(12.0)
    exp = hamport.signal("exp_decay", k=1, amplitude=1.0, rate=2.0)
    assert exp.norm_sq_total() == pytest.approx(0.25)
    assert exp.norm_sq(0.5) < exp.norm_sq(1.0) <= exp.norm_sq_total()


def test_simulation_energy_decay_and_bound():
    sys = hamport.vibrating_string(1.0, 1.0, 0.0, 1.0)
    ctrl = hamport.controller("linear_pd", k=1)
    model = hamport.discretize_closed_loop(sys, ctrl, 48)
    assert model.dim == 48 * 2 + 2

    x0 = hamport.random_smooth_state(model, seed=11, norm=1.0)
    d = hamport.signal("truncated_step", k=1, amplitude=0.5, duration=0.5)
    traj = hamport.simulate(model, x0, d, T=4.0, dt=2e-3)
    assert traj.ok
    e = np.asarray(traj.energy_total)
    dn = np.asarray(traj.dnorm_sq)
    # growth bounded by the disturbance budget at sigma = 1
    assert np.all(e <= e[0] + dn / 4.0 + 1e-10)
    assert e[-1] < e[0]
    assert hamport.dissipation_residual(traj) < 1e-9
    assert hamport.ugs_margin(traj, ctrl.sigma) > -1e-10


def test_balance_and_spectrum():
    sys = hamport.vibrating_string(1.0, 1.0, 0.0, 1.0)
    ctrl = hamport.controller("saturating_damper_pd", k=1)
    model = hamport.discretize_closed_loop(sys, ctrl, 64)
    boundary, interior = hamport.verify_semidiscrete_balance(model, 20, 3)
    assert boundary < 1e-10
    assert interior == 0.0

    plant = hamport.discretize_plant(sys, 100)
    ev = np.asarray(hamport.spectrum(plant))
    assert ev.real.max() <= 1e-8
    axis = ev[(np.abs(ev.real) < 1e-3) & (ev.imag > 1e-6)]
    lowest = np.sort(axis.imag)[0]
    assert abs(lowest - math.pi / 2) / (math.pi / 2) < 0.01


def test_cocycle_exactness():
    sys = hamport.vibrating_string(1.0, 1.0, 0.0, 1.0)
    ctrl = hamport.controller("linear_pd", k=1)
    model = hamport.discretize_closed_loop(sys, ctrl, 32)
    x0 = hamport.random_smooth_state(model, seed=5, norm=1.0)
    dt = 1e-2
    noise = hamport.signal("windowed_noise", k=1, amplitude=1.0, t0=0.0,
                           t1=0.5, cell=dt, seed=9)
    assert hamport.cocycle_check(model, x0, noise, 0.5, 0.5, dt) <= 1e-12
