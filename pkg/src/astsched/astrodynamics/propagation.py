"""Orbit propagation: SGP4 (default) and a two-body Keplerian fallback.

Both backends consume TLE mean elements and produce inertial (TEME)
position/velocity in km and km/s.  Epochs are seconds relative to the
element set's own epoch; callers translate scenario time themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DecayError
from . import _sgp4core
from .tle import TwoLineElement

EARTH_RADIUS_KM = 6378.137        # WGS-84 equatorial
MU_EARTH = 398600.8               # km^3/s^2 (WGS-72, consistent with TLE convention)
MAX_OFFSET_DAYS = 30.0

_GRAV = _sgp4core.getgravconst("wgs72")
_JD_1950 = 2433281.5


@dataclass(frozen=True)
class StateVector:
    epoch: float                  # seconds, in the caller's time frame
    position: np.ndarray          # km, inertial
    velocity: np.ndarray          # km/s, inertial


class _SatRec:
    """Bare attribute container for the SGP4 core routines."""


@lru_cache(maxsize=512)
def _satrec_for(tle: TwoLineElement) -> _SatRec:
    rec = _SatRec()
    deg2rad = math.pi / 180.0
    no_kozai = tle.mean_motion * 2.0 * math.pi / 1440.0          # rad/min
    ndot = tle.ndot * 2.0 * math.pi / (1440.0 ** 2) / 2.0
    nddot = tle.nddot * 2.0 * math.pi / (1440.0 ** 3) / 6.0
    _sgp4core.sgp4init(
        _GRAV, "i", tle.satellite_id, tle.epoch_jd - _JD_1950,
        tle.bstar, ndot, nddot, tle.eccentricity,
        tle.arg_perigee * deg2rad, tle.inclination * deg2rad,
        tle.mean_anomaly * deg2rad, no_kozai, tle.raan * deg2rad,
        rec,
    )
    if rec.error not in (0, None):
        raise DecayError(
            f"satellite {tle.satellite_id}: SGP4 init error {rec.error}: "
            f"{rec.error_message}"
        )
    return rec


def propagate(tle: TwoLineElement, epoch_s: float, backend: str = "sgp4") -> StateVector:
    """Inertial state at `epoch_s` seconds past the element set's epoch."""
    if abs(epoch_s) > MAX_OFFSET_DAYS * 86400.0:
        raise ValueError(
            f"propagation offset {epoch_s / 86400.0:.1f} days exceeds the "
            f"{MAX_OFFSET_DAYS:.0f}-day accuracy guard"
        )
    if backend == "sgp4":
        rec = _satrec_for(tle)
        r, v = _sgp4core.sgp4(rec, epoch_s / 60.0)
        if rec.error not in (0, None):
            raise DecayError(
                f"satellite {tle.satellite_id}: SGP4 error {rec.error}: "
                f"{rec.error_message}"
            )
        position = np.array(r)
        velocity = np.array(v)
    elif backend == "twobody":
        position, velocity = _twobody_state(tle, epoch_s)
    else:
        raise ValueError(f"unknown propagation backend {backend!r}")

    if float(np.linalg.norm(position)) < EARTH_RADIUS_KM:
        raise DecayError(
            f"satellite {tle.satellite_id}: sub-surface position at "
            f"t={epoch_s:.1f}s (|r|={np.linalg.norm(position):.1f} km)"
        )
    return StateVector(epoch=epoch_s, position=position, velocity=velocity)


def propagate_grid(tle: TwoLineElement, epochs_s: np.ndarray,
                   backend: str = "sgp4") -> tuple[np.ndarray, np.ndarray]:
    """Positions (N,3) and velocities (N,3) at an array of epoch offsets."""
    n = len(epochs_s)
    pos = np.empty((n, 3))
    vel = np.empty((n, 3))
    if backend == "sgp4":
        rec = _satrec_for(tle)
        sgp4 = _sgp4core.sgp4
        for i, t in enumerate(epochs_s):
            r, v = sgp4(rec, t / 60.0)
            if rec.error not in (0, None):
                raise DecayError(
                    f"satellite {tle.satellite_id}: SGP4 error {rec.error} at "
                    f"t={t:.1f}s: {rec.error_message}"
                )
            pos[i] = r
            vel[i] = v
    else:
        for i, t in enumerate(epochs_s):
            pos[i], vel[i] = _twobody_state(tle, t)
    return pos, vel


def orbital_period(tle: TwoLineElement) -> float:
    """Keplerian period in seconds from the TLE mean motion."""
    return 86400.0 / tle.mean_motion


def semi_major_axis(tle: TwoLineElement) -> float:
    n = tle.mean_motion * 2.0 * math.pi / 86400.0   # rad/s
    return (MU_EARTH / n ** 2) ** (1.0 / 3.0)


def _solve_kepler(mean_anomaly: float, ecc: float) -> float:
    """Eccentric anomaly by Newton iteration."""
    m = math.fmod(mean_anomaly, 2.0 * math.pi)
    e_anom = m if ecc < 0.8 else math.pi
    for _ in range(30):
        f = e_anom - ecc * math.sin(e_anom) - m
        e_anom -= f / (1.0 - ecc * math.cos(e_anom))
        if abs(f) < 1e-14:
            break
    return e_anom


def _twobody_state(tle: TwoLineElement, epoch_s: float) -> tuple[np.ndarray, np.ndarray]:
    """Unperturbed Keplerian state from the TLE mean elements."""
    deg2rad = math.pi / 180.0
    a = semi_major_axis(tle)
    ecc = tle.eccentricity
    inc = tle.inclination * deg2rad
    raan = tle.raan * deg2rad
    argp = tle.arg_perigee * deg2rad
    n = tle.mean_motion * 2.0 * math.pi / 86400.0
    m = tle.mean_anomaly * deg2rad + n * epoch_s

    e_anom = _solve_kepler(m, ecc)
    cos_e, sin_e = math.cos(e_anom), math.sin(e_anom)
    nu = math.atan2(math.sqrt(1.0 - ecc ** 2) * sin_e, cos_e - ecc)
    r_mag = a * (1.0 - ecc * cos_e)

    # perifocal position/velocity
    p = a * (1.0 - ecc ** 2)
    r_pf = np.array([r_mag * math.cos(nu), r_mag * math.sin(nu), 0.0])
    vf = math.sqrt(MU_EARTH / p)
    v_pf = np.array([-vf * math.sin(nu), vf * (ecc + math.cos(nu)), 0.0])

    co, so = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    cw, sw = math.cos(argp), math.sin(argp)
    rot = np.array([
        [co * cw - so * sw * ci, -co * sw - so * cw * ci, so * si],
        [so * cw + co * sw * ci, -so * sw + co * cw * ci, -co * si],
        [sw * si, cw * si, ci],
    ])
    return rot @ r_pf, rot @ v_pf
