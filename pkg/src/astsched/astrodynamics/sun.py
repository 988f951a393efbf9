"""Analytic solar ephemeris and the conical Earth-shadow predicate."""

from __future__ import annotations

import math

import numpy as np

AU_KM = 149597870.7
SUN_RADIUS_KM = 696000.0
EARTH_SHADOW_RADIUS_KM = 6378.137

LIT = "lit"
UMBRA = "umbra"


def sun_position(jd: float) -> np.ndarray:
    """Low-precision mean-element solar position, km, equatorial inertial frame.

    Accuracy ~0.01 deg, ample for eclipse boundaries at the ~1 s level.
    """
    n = jd - 2451545.0
    mean_lon = math.radians((280.460 + 0.9856474 * n) % 360.0)
    mean_anom = math.radians((357.528 + 0.9856003 * n) % 360.0)
    ecl_lon = (mean_lon
               + math.radians(1.915) * math.sin(mean_anom)
               + math.radians(0.020) * math.sin(2.0 * mean_anom))
    dist = (1.00014 - 0.01671 * math.cos(mean_anom)
            - 0.00014 * math.cos(2.0 * mean_anom)) * AU_KM
    obliquity = math.radians(23.439 - 4.0e-7 * n)
    return dist * np.array([
        math.cos(ecl_lon),
        math.cos(obliquity) * math.sin(ecl_lon),
        math.sin(obliquity) * math.sin(ecl_lon),
    ])


def eclipse_state(position_eci: np.ndarray, jd: float) -> str:
    """'umbra' iff the satellite sits inside the conical Earth shadow."""
    sun = sun_position(jd)
    to_sun = sun - position_eci
    to_earth = -position_eci
    r_sat = float(np.linalg.norm(position_eci))
    d_sun = float(np.linalg.norm(to_sun))
    if r_sat <= EARTH_SHADOW_RADIUS_KM:
        return UMBRA
    half_earth = math.asin(min(1.0, EARTH_SHADOW_RADIUS_KM / r_sat))
    half_sun = math.asin(min(1.0, SUN_RADIUS_KM / d_sun))
    cos_sep = float(np.dot(to_sun, to_earth)) / (d_sun * r_sat)
    sep = math.acos(max(-1.0, min(1.0, cos_sep)))
    if half_earth > half_sun and sep < half_earth - half_sun:
        return UMBRA
    return LIT
