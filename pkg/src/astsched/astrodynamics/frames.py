"""Reference frames and observation geometry.

Inertial here means the TEME frame SGP4 emits; Earth-fixed rotation uses
GMST only (no polar motion or nutation), which is consistent with SGP4's
accuracy class.  Geodetic conversions use the WGS-84 ellipsoid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..timebase import gmst

WGS84_A = 6378.137                 # km
WGS84_F = 1.0 / 298.257223563
WGS84_E2 = WGS84_F * (2.0 - WGS84_F)


@dataclass(frozen=True)
class GeodeticPoint:
    latitude: float                # deg, [-90, 90]
    longitude: float               # deg, [-180, 180)
    altitude: float = 0.0          # km above the ellipsoid

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise ValueError(f"latitude {self.latitude} outside [-90, 90]")
        lon = ((self.longitude + 180.0) % 360.0) - 180.0
        object.__setattr__(self, "longitude", lon)


@dataclass(frozen=True)
class Topocentric:
    azimuth: float                 # deg, [0, 360)
    elevation: float               # deg, [-90, 90]
    range_km: float


def eci_to_ecef(r_eci: np.ndarray, jd: float) -> np.ndarray:
    theta = gmst(jd)
    c, s = math.cos(theta), math.sin(theta)
    x, y, z = r_eci[..., 0], r_eci[..., 1], r_eci[..., 2]
    return np.stack([c * x + s * y, -s * x + c * y, z], axis=-1)


def ecef_to_eci(r_ecef: np.ndarray, jd: float) -> np.ndarray:
    theta = gmst(jd)
    c, s = math.cos(theta), math.sin(theta)
    x, y, z = r_ecef[..., 0], r_ecef[..., 1], r_ecef[..., 2]
    return np.stack([c * x - s * y, s * x + c * y, z], axis=-1)


def geodetic_to_ecef(point: GeodeticPoint) -> np.ndarray:
    lat = math.radians(point.latitude)
    lon = math.radians(point.longitude)
    sin_lat, cos_lat = math.sin(lat), math.cos(lat)
    n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat ** 2)
    return np.array([
        (n + point.altitude) * cos_lat * math.cos(lon),
        (n + point.altitude) * cos_lat * math.sin(lon),
        (n * (1.0 - WGS84_E2) + point.altitude) * sin_lat,
    ])


def ecef_to_geodetic(r: np.ndarray) -> GeodeticPoint:
    """Iterative ellipsoid projection (converges in a few steps for LEO)."""
    x, y, z = float(r[0]), float(r[1]), float(r[2])
    lon = math.atan2(y, x)
    p = math.hypot(x, y)
    lat = math.atan2(z, p * (1.0 - WGS84_E2))
    for _ in range(8):
        sin_lat = math.sin(lat)
        n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat ** 2)
        alt = p / math.cos(lat) - n if abs(math.cos(lat)) > 1e-12 else abs(z) - n * (1.0 - WGS84_E2)
        lat = math.atan2(z, p * (1.0 - WGS84_E2 * n / (n + alt)))
    sin_lat = math.sin(lat)
    n = WGS84_A / math.sqrt(1.0 - WGS84_E2 * sin_lat ** 2)
    alt = p / math.cos(lat) - n if abs(math.cos(lat)) > 1e-12 else abs(z) - n * (1.0 - WGS84_E2)
    lon_deg = math.degrees(lon)
    if lon_deg >= 180.0:
        lon_deg -= 360.0
    return GeodeticPoint(math.degrees(lat), lon_deg, alt)


def _enu_basis(point: GeodeticPoint) -> np.ndarray:
    """Rows: east, north, up unit vectors in ECEF."""
    lat = math.radians(point.latitude)
    lon = math.radians(point.longitude)
    sl, cl = math.sin(lat), math.cos(lat)
    so, co = math.sin(lon), math.cos(lon)
    return np.array([
        [-so, co, 0.0],
        [-sl * co, -sl * so, cl],
        [cl * co, cl * so, sl],
    ])


def topocentric_view(site: GeodeticPoint, position_eci: np.ndarray, jd: float) -> Topocentric:
    """Azimuth/elevation/range of an inertial position as seen from a site."""
    az, el, rng = topocentric_arrays(site, position_eci[None, :], np.array([jd]))
    return Topocentric(float(az[0]), float(el[0]), float(rng[0]))


def topocentric_arrays(site: GeodeticPoint, pos_eci: np.ndarray,
                       jds: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized az/el/range for N inertial positions at N epochs."""
    thetas = np.array([gmst(jd) for jd in jds])
    c, s = np.cos(thetas), np.sin(thetas)
    x, y, z = pos_eci[:, 0], pos_eci[:, 1], pos_eci[:, 2]
    ecef = np.stack([c * x + s * y, -s * x + c * y, z], axis=-1)
    rel = ecef - geodetic_to_ecef(site)
    enu = rel @ _enu_basis(site).T
    rng = np.linalg.norm(enu, axis=-1)
    rng = np.where(rng == 0.0, 1e-12, rng)
    el = np.degrees(np.arcsin(np.clip(enu[:, 2] / rng, -1.0, 1.0)))
    az = np.degrees(np.arctan2(enu[:, 0], enu[:, 1])) % 360.0
    az = np.where(el >= 90.0 - 1e-9, 0.0, az)
    return az, el, rng


def subsatellite_point(position_eci: np.ndarray, jd: float) -> GeodeticPoint:
    """Geodetic projection of an inertial position (altitude retained)."""
    return ecef_to_geodetic(eci_to_ecef(position_eci, jd))
