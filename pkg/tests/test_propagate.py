import math

import numpy as np
import pytest

from pulseforge import (
    ControlSchedule,
    IntegrationError,
    ScheduleMeta,
    SystemParams,
    TimeGrid,
    UnsupportedComparisonError,
    basis_state,
    compare_analytic,
    fidelity_trace,
    integrate,
    schedule_from_angles,
)
from conftest import random_unit_state


def test_time_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(t_end=0.0)
    with pytest.raises(ValueError):
        TimeGrid(t_end=1.0, n_steps=1)
    grid = TimeGrid(t_end=2.0, n_steps=4)
    assert grid.times[0] == 0.0 and grid.times[-1] == 2.0
    assert grid.half_times.size == 2 * grid.n_steps + 1


def test_free_evolution_phases_only():
    # gamma_final = 0 freezes the drive; |3> just precesses at the splitting
    delta = 3.7
    sched = schedule_from_angles(0.4, 0.0, 2.0, SystemParams(delta=delta), n_samples=32)
    assert np.all(sched.tau == 0) and np.all(sched.alpha == 0)
    traj = integrate(sched, basis_state(3), TimeGrid(2.0, 2000))
    expected = np.exp(-1j * delta * traj.times)
    assert np.max(np.abs(traj.states[:, 2] - expected)) < 1e-9
    assert np.max(np.abs(traj.populations - [0, 0, 1, 0])) < 1e-12


def test_populations_sum_to_one(ref_prep_schedule):
    traj = integrate(ref_prep_schedule, basis_state(1))
    sums = traj.populations.sum(axis=1)
    assert np.max(np.abs(sums - 1.0)) < 1e-8


def test_norm_conservation(ref_prep_schedule):
    traj = integrate(ref_prep_schedule, basis_state(1))
    assert np.max(np.abs(traj.norms - 1.0)) < 1e-9


def test_integration_matches_closed_form(ref_prep_schedule):
    err = compare_analytic(ref_prep_schedule, basis_state(1))
    assert err < 1e-8


def test_reference_prep_final_populations_and_blocked_level(ref_prep_schedule):
    traj = integrate(ref_prep_schedule, basis_state(1))
    np.testing.assert_allclose(traj.populations[-1], [0, 0.25, 0.75, 0], atol=1e-6)
    assert np.max(traj.populations[:, 3]) < 1e-8
    # the release of |1> is monotone for this pulse
    p1 = traj.populations[:, 0]
    assert np.all(np.diff(p1) <= 1e-12)


def test_blocked_level_for_random_schedules(rng):
    # the 1e-8 leakage bound holds at the default integration resolution
    for _ in range(10):
        sched = schedule_from_angles(
            rng.uniform(-math.pi / 2, math.pi / 2),
            rng.choice([math.pi / 2, math.pi, 1.5 * math.pi]),
            rng.uniform(0.5e-9, 5e-9),
            SystemParams(delta=rng.uniform(1e9, 1e10)),
        )
        traj = integrate(sched, basis_state(1))
        assert np.max(np.abs(traj.states[:, 3])) < 1e-8


def test_fidelity_trace_endpoints(ref_prep_schedule):
    traj = integrate(ref_prep_schedule, basis_state(1))
    same = fidelity_trace(traj, traj.states[0])
    assert abs(same.fidelity[0] - 1.0) < 1e-12
    orthogonal = fidelity_trace(traj, basis_state(4))
    assert np.max(orthogonal.fidelity) < 1e-12


def test_fidelity_stays_in_range(ref_prep_schedule, rng):
    traj = integrate(ref_prep_schedule, basis_state(1))
    for _ in range(10):
        trace = fidelity_trace(traj, random_unit_state(rng))
        assert np.all(trace.fidelity >= 0.0)
        assert np.all(trace.fidelity <= 1.0 + 1e-12)


def test_fidelity_global_phase_invariance(ref_prep_schedule, rng):
    traj = integrate(ref_prep_schedule, basis_state(1))
    target = random_unit_state(rng)
    base = fidelity_trace(traj, target).fidelity
    rotated = fidelity_trace(traj, np.exp(0.83j) * target).fidelity
    np.testing.assert_allclose(base, rotated, rtol=0, atol=1e-14)


def test_fidelity_requires_normalized_target(ref_prep_schedule):
    traj = integrate(ref_prep_schedule, basis_state(1))
    with pytest.raises(ValueError):
        fidelity_trace(traj, np.array([1.0, 1.0, 0.0, 0.0]))


def test_step_halving_shrinks_error_sixteenfold(ref_prep_schedule):
    coarse = compare_analytic(ref_prep_schedule, basis_state(1), TimeGrid(ref_prep_schedule.T, 200))
    fine = compare_analytic(ref_prep_schedule, basis_state(1), TimeGrid(ref_prep_schedule.T, 400))
    ratio = coarse / fine
    assert 10.0 < ratio < 25.0


def test_short_horizon_limit(ref_prep_schedule):
    err = compare_analytic(
        ref_prep_schedule, basis_state(1), TimeGrid(ref_prep_schedule.T * 1e-6, 16)
    )
    assert err < 1e-12


def test_corrupted_tunneling_is_detected(ref_prep_schedule, ref_params):
    corrupted = ControlSchedule(
        params=ref_params,
        times=ref_prep_schedule.times,
        tau=ref_prep_schedule.tau * 1.01,
        alpha=ref_prep_schedule.alpha,
        meta=ref_prep_schedule.meta,
    )
    err = compare_analytic(corrupted, basis_state(1))
    assert err > 1e-3


def test_compare_requires_angle_metadata(ref_prep_schedule, ref_params):
    stripped = ControlSchedule(
        params=ref_params,
        times=ref_prep_schedule.times,
        tau=ref_prep_schedule.tau,
        alpha=ref_prep_schedule.alpha,
        meta=ScheduleMeta(gate="raw"),
    )
    with pytest.raises(UnsupportedComparisonError):
        compare_analytic(stripped, basis_state(1))


def test_grid_must_stay_within_schedule(ref_prep_schedule):
    with pytest.raises(ValueError):
        integrate(ref_prep_schedule, basis_state(1), TimeGrid(ref_prep_schedule.T * 2, 100))


def test_initial_state_must_be_normalized(ref_prep_schedule):
    with pytest.raises(ValueError):
        integrate(ref_prep_schedule, np.array([1.0, 1.0, 0.0, 0.0]))


def test_norm_drift_raises():
    # absurdly coarse grid on a violent pulse: RK4 blows up and must say so
    wild = schedule_from_angles(0.3, 200 * math.pi, 1.0, SystemParams(delta=1.0), n_samples=64)
    with pytest.raises(IntegrationError):
        integrate(wild, basis_state(1), TimeGrid(1.0, 8))


def test_third_route_agreement_with_adaptive_integrator(ref_prep_schedule):
    # fixed-step RK4, the closed form, and scipy's adaptive RK45 must all
    # land on the same final state
    from scipy.integrate import solve_ivp

    sched = ref_prep_schedule
    psi0 = basis_state(1)

    def rhs(t, psi):
        tau, alpha = sched.controls_at(t)
        tau = float(tau)
        alpha = complex(alpha)
        delta = sched.params.delta
        c1, c2, c3, c4 = psi
        return -1j * np.array([
            tau * c2 + alpha * c3,
            tau * c1 - alpha * c4,
            np.conj(alpha) * c1 + delta * c3 + tau * c4,
            -np.conj(alpha) * c2 + tau * c3 + delta * c4,
        ])

    sol = solve_ivp(rhs, (0.0, sched.T), psi0, rtol=1e-11, atol=1e-13, max_step=sched.T / 100)
    adaptive_final = sol.y[:, -1]
    rk4_final = integrate(sched, psi0).final_state
    assert np.linalg.norm(adaptive_final - rk4_final) < 1e-7


def test_integration_deterministic(ref_prep_schedule, rng):
    psi0 = random_unit_state(rng)
    a = integrate(ref_prep_schedule, psi0)
    b = integrate(ref_prep_schedule, psi0)
    assert np.array_equal(a.states, b.states)


def test_interpolated_schedule_still_integrates(ref_prep_schedule, ref_params):
    # strip the metadata: integration falls back to linear interpolation of
    # the samples and stays accurate to the interpolation floor
    stripped = ControlSchedule(
        params=ref_params,
        times=ref_prep_schedule.times,
        tau=ref_prep_schedule.tau,
        alpha=ref_prep_schedule.alpha,
        meta=ScheduleMeta(gate="raw"),
    )
    ref = integrate(ref_prep_schedule, basis_state(1)).final_state
    approx = integrate(stripped, basis_state(1)).final_state
    assert np.linalg.norm(ref - approx) < 1e-3
    assert np.linalg.norm(ref - approx) > 0.0
