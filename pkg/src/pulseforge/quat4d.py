"""Unit quaternions, 4D spherical angles, and isoclinic rotation matrices.

Quaternion components are stored in (w, x, y, z) order everywhere; the
left/right isoclinic sign patterns below assume exactly this order, so do
not reorder fields.  A general rotation of R^4 factors into a left-isoclinic
times a right-isoclinic matrix, one unit quaternion each, and the two
factors commute.

The spherical-angle chart nominally covers gamma in [0, pi], but the map is
smooth in gamma and pulse schedules drive it monotonically past pi for
multi-cycle pulses, so no range check is applied to gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12


@dataclass(frozen=True)
class UnitQuaternion:
    """Quaternion with unit Euclidean norm, components (w, x, y, z)."""

    w: float
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        n = self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"quaternion norm^2 = {n!r} is not 1 within {NORM_TOL}")

    @classmethod
    def normalized(cls, w: float, x: float, y: float, z: float) -> "UnitQuaternion":
        """Build a unit quaternion by rescaling arbitrary components."""
        n = math.sqrt(w * w + x * x + y * y + z * z)
        if n == 0.0:
            raise ValueError("cannot normalize the zero quaternion")
        return cls(w / n, x / n, y / n, z / n)

    def as_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class SphericalAngles:
    """Generalized 4D spherical angles (gamma, theta, phi), radians."""

    gamma: float
    theta: float
    phi: float


@dataclass(frozen=True)
class Rotation4:
    """Proper rotation of R^4: orthogonal 4x4 matrix with determinant +1."""

    m: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.m, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        gram = m.T @ m
        if np.max(np.abs(gram - np.eye(4))) > NORM_TOL:
            raise ValueError("matrix is not orthogonal within tolerance")
        if abs(np.linalg.det(m) - 1.0) > NORM_TOL:
            raise ValueError("matrix determinant is not +1 within tolerance")
        object.__setattr__(self, "m", m)

    def apply(self, v: np.ndarray) -> np.ndarray:
        return self.m @ np.asarray(v, dtype=float)


def quat_from_angles(angles: SphericalAngles) -> UnitQuaternion:
    """Map spherical angles to a unit quaternion.

    (w, x, y, z) = (cos g, sin g cos t, sin g sin t cos p, sin g sin t sin p);
    the norm is 1 by trigonometric identity for any real angles.
    """
    sg = math.sin(angles.gamma)
    st = math.sin(angles.theta)
    return UnitQuaternion(
        math.cos(angles.gamma),
        sg * math.cos(angles.theta),
        sg * st * math.cos(angles.phi),
        sg * st * math.sin(angles.phi),
    )


def left_isoclinic(q: UnitQuaternion) -> Rotation4:
    """Left-isoclinic rotation matrix of a unit quaternion."""
    w, x, y, z = q.w, q.x, q.y, q.z
    return Rotation4(np.array([
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ]))


def right_isoclinic(p: UnitQuaternion) -> Rotation4:
    """Right-isoclinic rotation matrix of a unit quaternion."""
    w, x, y, z = p.w, p.x, p.y, p.z
    return Rotation4(np.array([
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ]))


def rotation_from_pair(q: UnitQuaternion, p: UnitQuaternion) -> Rotation4:
    """General SO(4) rotation: product of the two commuting isoclinic factors."""
    return Rotation4(left_isoclinic(q).m @ right_isoclinic(p).m)
