"""Agile-body kinematics: pointing quaternions, angular displacement,
trapezoidal slew timing, and inter-action maneuver feasibility.

Convention: the body boresight is +z; the nadir-pointing attitude is the
reference.  Downlink/ISL terminals are gimbaled and impose no attitude
constraint, so only observations participate in maneuver checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .astrodynamics.frames import GeodeticPoint, ecef_to_eci, geodetic_to_ecef
from .astrodynamics.propagation import StateVector
from .errors import OrderingError


@dataclass(frozen=True)
class UnitQuaternion:
    w: float
    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)
        if abs(n - 1.0) > 1e-9:
            object.__setattr__(self, "w", self.w / n)
            object.__setattr__(self, "x", self.x / n)
            object.__setattr__(self, "y", self.y / n)
            object.__setattr__(self, "z", self.z / n)

    def dot(self, other: "UnitQuaternion") -> float:
        return (self.w * other.w + self.x * other.x
                + self.y * other.y + self.z * other.z)


@dataclass(frozen=True)
class AgilityParams:
    omega_max: float           # rad/s
    alpha_max: float           # rad/s^2
    t_settle: float = 0.0      # s

    def __post_init__(self):
        if self.omega_max <= 0.0 or self.alpha_max <= 0.0 or self.t_settle < 0.0:
            raise ValueError("agility parameters must be positive (t_settle >= 0)")


def _quaternion_from_to(frm: np.ndarray, to: np.ndarray) -> UnitQuaternion:
    """Minimal rotation carrying unit vector `frm` onto unit vector `to`."""
    d = float(np.dot(frm, to))
    if d > 1.0 - 1e-12:
        return UnitQuaternion(1.0, 0.0, 0.0, 0.0)
    if d < -1.0 + 1e-12:
        # 180 deg: any axis orthogonal to frm
        axis = np.cross(frm, [1.0, 0.0, 0.0])
        if np.linalg.norm(axis) < 1e-9:
            axis = np.cross(frm, [0.0, 1.0, 0.0])
        axis = axis / np.linalg.norm(axis)
        return UnitQuaternion(0.0, *axis)
    axis = np.cross(frm, to)
    w = 1.0 + d
    q = np.array([w, axis[0], axis[1], axis[2]])
    q /= np.linalg.norm(q)
    return UnitQuaternion(*q)


def pointing_quaternion(state: StateVector, target: GeodeticPoint, jd: float) -> UnitQuaternion:
    """Attitude rotating the nadir-aligned boresight onto the satellite-to-target
    line of sight, expressed relative to the nadir reference frame."""
    target_eci = ecef_to_eci(geodetic_to_ecef(target), jd)
    los = target_eci - state.position
    norm = float(np.linalg.norm(los))
    if norm < 1e-9:
        raise ValueError("target coincides with the satellite position")
    los /= norm
    nadir = -state.position / np.linalg.norm(state.position)
    return _quaternion_from_to(nadir, los)


def angular_separation(q_i: UnitQuaternion, q_j: UnitQuaternion) -> float:
    """Angular displacement 2*arccos|q_i . q_j|, radians in [0, pi]."""
    return 2.0 * math.acos(min(1.0, abs(q_i.dot(q_j))))


def slew_time(delta_theta: float, params: AgilityParams) -> float:
    """Trapezoidal-profile slew duration.

    Triangular branch (never reaches cruise rate) when
    delta_theta < omega_max^2 / alpha_max, else accelerate-cruise-decelerate.
    """
    if delta_theta < 0.0:
        raise ValueError("delta_theta must be nonnegative")
    if delta_theta < params.omega_max ** 2 / params.alpha_max:
        return 2.0 * math.sqrt(delta_theta / params.alpha_max)
    return delta_theta / params.omega_max + params.omega_max / params.alpha_max


@dataclass(frozen=True)
class ManeuverCheck:
    feasible: bool
    deficit: float             # s of missing gap; 0 when feasible
    required: float            # slew + settle, s
    gap: float                 # actual gap, s
    delta_theta: float         # rad


def maneuver_feasible(end_attitude_i: UnitQuaternion, start_attitude_j: UnitQuaternion,
                      end_i: float, start_j: float,
                      params: AgilityParams) -> ManeuverCheck:
    """Check that the gap between two attitude-constrained actions admits the
    slew plus settling time.  Attitudes are evaluated at action i's end and
    action j's start."""
    if start_j < end_i:
        raise OrderingError(
            f"second action starts at {start_j:.1f}s before the first ends at {end_i:.1f}s"
        )
    dtheta = angular_separation(end_attitude_i, start_attitude_j)
    required = slew_time(dtheta, params) + params.t_settle
    gap = start_j - end_i
    deficit = max(0.0, required - gap)
    return ManeuverCheck(deficit <= 0.0, deficit, required, gap, dtheta)
