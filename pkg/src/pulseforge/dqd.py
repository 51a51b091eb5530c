"""Four-level double-quantum-dot model: Hamiltonians, phase frame, controls,
and the closed-form propagator.

Bare basis ordering, fixed everywhere (array index = label - 1):

    |1> = left dot,  spin down      |2> = right dot, spin down
    |3> = right dot, spin up        |4> = left dot,  spin up

Units: hbar = 1, so Hamiltonian entries are angular frequencies (rad/s) and
times are seconds.  The coupling topology is a diamond: 1-2 and 3-4 carry the
real spin-conserving tunneling tau(t), 1-3 and 2-4 the complex spin-flip
(Rashba) coupling alpha(t); there is no 1-4 or 2-3 link, which forbids
direct |1> -> |4> transfer.

Control relations in the diamond gauge, with gamma(t) the drive angle and
theta the constant coupling mixing angle:

    tau(t)   = gamma_dot(t) * cos(theta)
    alpha(t) = -exp(i*delta*t) * gamma_dot(t) * sin(theta)

i.e. the spin-flip drive is resonant with the Zeeman splitting delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

GammaFunc = Callable[[np.ndarray | float], tuple[np.ndarray | float, np.ndarray | float]]


@dataclass(frozen=True)
class SystemParams:
    """Static system parameters: Zeeman splitting delta in rad/s (hbar = 1)."""

    delta: float

    def __post_init__(self) -> None:
        if not self.delta > 0.0:
            raise ValueError(f"delta must be positive, got {self.delta!r}")


@dataclass(frozen=True)
class ControlSample:
    """Control values at one instant: real tau, complex alpha (rad/s)."""

    t: float
    tau: float
    alpha: complex

    def __post_init__(self) -> None:
        if isinstance(self.tau, complex):
            raise TypeError("tau is a spin-conserving tunneling rate and must be real")


@dataclass(frozen=True)
class PhaseFrame:
    """Diagonal phase frame K(t) = diag(1, e^{i phi2}, e^{i phi3}, e^{i phi4}).

    Stores the three phase functions and their time derivatives (phi1 = 0).
    """

    phi2: Callable[[float], float]
    phi3: Callable[[float], float]
    phi4: Callable[[float], float]
    phi2_dot: Callable[[float], float]
    phi3_dot: Callable[[float], float]
    phi4_dot: Callable[[float], float]

    @classmethod
    def diamond(cls, delta: float) -> "PhaseFrame":
        """The gauge that makes the diamond Hamiltonian match the lab frame:
        phi2 = -pi/2, phi3 = -delta*t + pi/2, phi4 = -delta*t."""
        return cls(
            phi2=lambda t: -0.5 * math.pi,
            phi3=lambda t: -delta * t + 0.5 * math.pi,
            phi4=lambda t: -delta * t,
            phi2_dot=lambda t: 0.0,
            phi3_dot=lambda t: -delta,
            phi4_dot=lambda t: -delta,
        )

    def k_matrix(self, t: float) -> np.ndarray:
        return np.diag([
            1.0 + 0.0j,
            np.exp(1j * self.phi2(t)),
            np.exp(1j * self.phi3(t)),
            np.exp(1j * self.phi4(t)),
        ])

    def is_diamond(self, delta: float, t: float, tol: float = 1e-9) -> bool:
        expected = PhaseFrame.diamond(delta)
        return (
            abs(self.phi2(t) - expected.phi2(t)) <= tol
            and abs(self.phi3(t) - expected.phi3(t)) <= tol
            and abs(self.phi4(t) - expected.phi4(t)) <= tol
            and abs(self.phi2_dot(t)) <= tol
            and abs(self.phi3_dot(t) + delta) <= tol
            and abs(self.phi4_dot(t) + delta) <= tol
        )


@dataclass(frozen=True)
class DiamondAngles:
    """Drive angle gamma(t) plus the constant mixing angle theta.

    ``gamma`` maps t -> (gamma, gamma_dot) and must satisfy gamma(0) = 0
    (any multiple of 2*pi is accepted so the propagator starts at identity).
    theta may be any real; negative mixing angles are meaningful.
    """

    gamma: GammaFunc
    theta: float

    def __post_init__(self) -> None:
        g0, _ = self.gamma(0.0)
        if abs(math.remainder(float(g0), 2.0 * math.pi)) > 1e-9:
            raise ValueError(f"gamma(0) = {g0!r} is not a multiple of 2*pi")


def basis_state(n: int) -> np.ndarray:
    """Bare basis vector |n>, n in 1..4."""
    if n not in (1, 2, 3, 4):
        raise ValueError(f"basis label must be 1..4, got {n}")
    v = np.zeros(4, dtype=complex)
    v[n - 1] = 1.0
    return v


def left_qubit_state(chi: float, mu: float) -> np.ndarray:
    """Qubit on the left dot: cos(chi)|1> + e^{i mu} sin(chi)|4>."""
    v = np.zeros(4, dtype=complex)
    v[0] = math.cos(chi)
    v[3] = np.exp(1j * mu) * math.sin(chi)
    return v


def right_qubit_state(chi: float, mu: float) -> np.ndarray:
    """Qubit on the right dot: cos(chi)|2> + e^{i mu} sin(chi)|3>."""
    v = np.zeros(4, dtype=complex)
    v[1] = math.cos(chi)
    v[2] = np.exp(1j * mu) * math.sin(chi)
    return v


def check_normalized(state: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Return the state as a complex array, raising if its norm is off 1."""
    psi = np.asarray(state, dtype=complex).reshape(4)
    n = float(np.linalg.norm(psi))
    if abs(n - 1.0) > tol:
        raise ValueError(f"state norm {n!r} deviates from 1 by more than {tol}")
    return psi


def h0_matrix(sample: ControlSample, params: SystemParams) -> np.ndarray:
    """Laboratory-frame Hamiltonian for given (tau, alpha) controls.

    Zeros on diagonal entries 1, 2 and delta on 3, 4; tau on the 1-2 and 3-4
    links; alpha on 1-3 and -alpha on 2-4, conjugated below the diagonal.
    """
    tau = float(sample.tau)
    alpha = complex(sample.alpha)
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = tau
    h[1, 0] = tau
    h[2, 3] = tau
    h[3, 2] = tau
    h[0, 2] = alpha
    h[2, 0] = np.conj(alpha)
    h[1, 3] = -alpha
    h[3, 1] = -np.conj(alpha)
    h[2, 2] = params.delta
    h[3, 3] = params.delta
    return h


def controls_from_angles(angles: DiamondAngles, t: float, params: SystemParams) -> ControlSample:
    """Inverse-engineered controls at time t for the given drive angles.

    The lab-frame reading is alpha0 = 0, envelope -gamma_dot*sin(theta),
    carrier frequency omega = delta (resonant drive).
    """
    _, gdot = angles.gamma(t)
    gdot = float(gdot)
    tau = gdot * math.cos(angles.theta)
    alpha = -(np.exp(1j * params.delta * t) * gdot * math.sin(angles.theta))
    return ControlSample(t=float(t), tau=tau, alpha=complex(alpha))


def full_hamiltonian(
    angles: DiamondAngles,
    t: float,
    params: SystemParams,
    frame: PhaseFrame | None = None,
) -> np.ndarray:
    """Diamond-gauge Hamiltonian at time t, written directly in terms of
    (gamma_dot, theta, delta).

    If a frame is passed it must be the diamond gauge for these params;
    this guards against evaluating the closed form in the wrong gauge.
    """
    if frame is not None and not frame.is_diamond(params.delta, t):
        raise ValueError("phase frame does not match the diamond gauge")
    _, gdot = angles.gamma(t)
    gdot = float(gdot)
    ct = gdot * math.cos(angles.theta)
    st = gdot * math.sin(angles.theta)
    phase = np.exp(1j * params.delta * t)
    h = np.zeros((4, 4), dtype=complex)
    h[0, 1] = ct
    h[1, 0] = ct
    h[2, 3] = ct
    h[3, 2] = ct
    h[0, 2] = -(phase * st)
    h[2, 0] = np.conj(-(phase * st))
    h[1, 3] = phase * st
    h[3, 1] = np.conj(phase * st)
    h[2, 2] = params.delta
    h[3, 3] = params.delta
    return h


def general_hamiltonian_check(
    gamma1_dot: float,
    gamma2_dot: float,
    theta1: float,
    theta2: float,
    frame: PhaseFrame,
    t: float,
) -> np.ndarray:
    """Diamond-form Hamiltonian before gauge fixing (diagnostic).

    Valid under frozen angles (theta and the azimuthal phases constant,
    azimuthal phases zero).  Reduces to :func:`full_hamiltonian` when
    gamma2 is frozen, theta2 = 0 and the diamond gauge is substituted.
    The Hermitian conjugate applies to the couplings only; the diagonal
    -phi_dot terms appear once.
    """
    p2, p3, p4 = frame.phi2(t), frame.phi3(t), frame.phi4(t)
    c12 = -1j * np.exp(-1j * p2) * (gamma1_dot * math.cos(theta1) + gamma2_dot * math.cos(theta2))
    c13 = -1j * np.exp(-1j * p3) * (gamma1_dot * math.sin(theta1) + gamma2_dot * math.sin(theta2))
    c24 = -1j * np.exp(1j * (p2 - p4)) * (-gamma1_dot * math.sin(theta1) + gamma2_dot * math.sin(theta2))
    c34 = -1j * np.exp(1j * (p3 - p4)) * (gamma1_dot * math.cos(theta1) - gamma2_dot * math.cos(theta2))
    h = np.zeros((4, 4), dtype=complex)
    h[1, 1] = -frame.phi2_dot(t)
    h[2, 2] = -frame.phi3_dot(t)
    h[3, 3] = -frame.phi4_dot(t)
    h[0, 1] = c12
    h[1, 0] = np.conj(c12)
    h[0, 2] = c13
    h[2, 0] = np.conj(c13)
    h[1, 3] = c24
    h[3, 1] = np.conj(c24)
    h[2, 3] = c34
    h[3, 2] = np.conj(c34)
    return h


def propagator_matrix(gamma, theta: float, delta: float, t) -> np.ndarray:
    """Closed-form evolution operator for given gamma value(s) and time(s).

    Broadcasts over ``gamma`` and ``t``; returns shape (..., 4, 4).  The
    (4, 1) entry is identically zero: direct |1> -> |4> transfer is
    structurally forbidden by the diamond topology.
    """
    g = np.asarray(gamma, dtype=float)
    tt = np.asarray(t, dtype=float)
    shape = np.broadcast_shapes(g.shape, tt.shape)
    c = np.broadcast_to(np.cos(g), shape)
    s = np.broadcast_to(np.sin(g), shape)
    ct = math.cos(theta)
    st = math.sin(theta)
    e = np.broadcast_to(np.exp(-1j * delta * tt), shape)
    u = np.zeros(shape + (4, 4), dtype=complex)
    u[..., 0, 0] = c
    u[..., 0, 1] = -1j * ct * s
    u[..., 0, 2] = 1j * st * s
    u[..., 1, 0] = -1j * ct * s
    u[..., 1, 1] = c
    u[..., 1, 3] = -1j * st * s
    u[..., 2, 0] = 1j * e * s * st
    u[..., 2, 2] = e * c
    u[..., 2, 3] = -1j * e * ct * s
    u[..., 3, 1] = -1j * e * s * st
    u[..., 3, 2] = -1j * e * ct * s
    u[..., 3, 3] = e * c
    return u


def analytic_propagator(angles: DiamondAngles, t: float, params: SystemParams) -> np.ndarray:
    """U(t) from the closed form, evaluated along the drive angle gamma(t)."""
    g, _ = angles.gamma(t)
    return propagator_matrix(float(g), angles.theta, params.delta, float(t))
