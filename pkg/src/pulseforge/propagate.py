"""Independent numerical verification: fixed-step integration of the
time-dependent Schrodinger equation under a control schedule.

This module never touches the closed-form propagator when it integrates;
it builds the laboratory-frame Hamiltonian from the schedule's control
values and steps the state with classical fourth-order Runge-Kutta.  That
keeps it an honest cross-check of every synthesized pulse.

The integrator is deterministic: fixed step, no adaptivity, pure numpy
arithmetic in a fixed order, so repeated runs on one platform are
bit-identical.  The state norm is monitored but never renormalized;
renormalizing would mask integrator faults.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dqd import check_normalized, propagator_matrix
from .errors import IntegrationError, UnsupportedComparisonError
from .synth import ControlSchedule

DEFAULT_N_STEPS = 4000

NORM_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class TimeGrid:
    """Uniform integration grid over [0, t_end] with n_steps steps."""

    t_end: float
    n_steps: int = DEFAULT_N_STEPS

    def __post_init__(self) -> None:
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end!r}")
        if self.n_steps < 2:
            raise ValueError(f"n_steps must be at least 2, got {self.n_steps!r}")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.t_end, self.n_steps + 1)

    @property
    def half_times(self) -> np.ndarray:
        """Node and midpoint times interleaved (the RK4 evaluation points)."""
        return np.linspace(0.0, self.t_end, 2 * self.n_steps + 1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Integrated state history on a time grid."""

    times: np.ndarray
    states: np.ndarray  # shape (n_times, 4), complex

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.states) ** 2

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.states, axis=1)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


@dataclass(frozen=True, eq=False)
class FidelityTrace:
    """Pointwise overlap-squared against a fixed target state."""

    times: np.ndarray
    fidelity: np.ndarray


def _hamiltonian_stack(tau: np.ndarray, alpha: np.ndarray, delta: float) -> np.ndarray:
    """-i H at each time, stacked; vectorized over the leading axis."""
    m = tau.shape[0]
    h = np.zeros((m, 4, 4), dtype=complex)
    h[:, 0, 1] = tau
    h[:, 1, 0] = tau
    h[:, 2, 3] = tau
    h[:, 3, 2] = tau
    h[:, 0, 2] = alpha
    h[:, 2, 0] = np.conj(alpha)
    h[:, 1, 3] = -alpha
    h[:, 3, 1] = -np.conj(alpha)
    h[:, 2, 2] = delta
    h[:, 3, 3] = delta
    return -1j * h


def integrate(schedule: ControlSchedule, psi0: np.ndarray, grid: TimeGrid | None = None) -> Trajectory:
    """Integrate i d psi/dt = H(t) psi over the grid with fixed-step RK4.

    The grid must lie within the schedule's span.  Raises
    :class:`~pulseforge.errors.IntegrationError` when the state norm
    drifts by more than 1e-6, which signals too coarse a step.
    """
    if grid is None:
        grid = TimeGrid(schedule.T)
    if grid.t_end > schedule.T * (1.0 + 1e-12):
        raise ValueError(
            f"grid extends to {grid.t_end!r} s beyond the schedule span {schedule.T!r} s"
        )
    psi = check_normalized(psi0)
    half = grid.half_times
    tau, alpha = schedule.controls_at(half)
    a_stack = _hamiltonian_stack(np.asarray(tau, dtype=float), np.asarray(alpha, dtype=complex), schedule.params.delta)

    n = grid.n_steps
    h = grid.t_end / n
    h6 = h / 6.0
    states = np.empty((n + 1, 4), dtype=complex)
    states[0] = psi
    for i in range(n):
        a1 = a_stack[2 * i]
        a2 = a_stack[2 * i + 1]
        a3 = a_stack[2 * i + 2]
        k1 = a1 @ psi
        k2 = a2 @ (psi + (0.5 * h) * k1)
        k3 = a2 @ (psi + (0.5 * h) * k2)
        k4 = a3 @ (psi + h * k3)
        psi = psi + h6 * (k1 + 2.0 * (k2 + k3) + k4)
        states[i + 1] = psi

    traj = Trajectory(times=grid.times, states=states)
    drift = float(np.max(np.abs(traj.norms - 1.0)))
    if drift > NORM_DRIFT_LIMIT:
        raise IntegrationError(
            f"state norm drifted by {drift:.3g} (limit {NORM_DRIFT_LIMIT:g}); "
            "increase the number of integration steps"
        )
    return traj


def fidelity_trace(traj: Trajectory, target: np.ndarray) -> FidelityTrace:
    """|<target | psi(t)>|^2 along a trajectory; global phases drop out."""
    tgt = check_normalized(target)
    overlaps = traj.states @ np.conj(tgt)
    return FidelityTrace(times=traj.times, fidelity=np.abs(overlaps) ** 2)


def compare_analytic(schedule: ControlSchedule, psi0: np.ndarray, grid: TimeGrid | None = None) -> float:
    """Max 2-norm gap between the integrated state and the closed form.

    Requires the schedule to carry its generating drive angles; raises
    :class:`~pulseforge.errors.UnsupportedComparisonError` otherwise.
    """
    angles = schedule.angles()
    if angles is None:
        raise UnsupportedComparisonError(
            "schedule carries no reconstructible drive-angle metadata"
        )
    if grid is None:
        grid = TimeGrid(schedule.T)
    traj = integrate(schedule, psi0, grid)
    gammas, _ = angles.gamma(traj.times)
    u = propagator_matrix(gammas, angles.theta, schedule.params.delta, traj.times)
    reference = np.einsum("tij,j->ti", u, check_normalized(psi0))
    return float(np.max(np.linalg.norm(traj.states - reference, axis=1)))
