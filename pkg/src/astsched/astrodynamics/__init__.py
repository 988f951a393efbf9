"""Stateless orbital-mechanics kernel.

TLE parsing, SGP4/two-body propagation, frame conversions, visibility
geometry, solar/eclipse state, ground tracks, and window scanning.
"""

from .access import (
    AccessWindow,
    access_windows,
    cross_track_distance_km,
    ground_track,
    lighting_intervals,
    strip_access_windows,
)
from .frames import (
    GeodeticPoint,
    Topocentric,
    ecef_to_eci,
    ecef_to_geodetic,
    eci_to_ecef,
    geodetic_to_ecef,
    subsatellite_point,
    topocentric_view,
)
from .propagation import (
    EARTH_RADIUS_KM,
    StateVector,
    orbital_period,
    propagate,
    propagate_grid,
    semi_major_axis,
)
from .sun import LIT, UMBRA, eclipse_state, sun_position
from .tle import TwoLineElement, checksum, format_tle, parse_tle

__all__ = [
    "AccessWindow", "GeodeticPoint", "StateVector", "Topocentric",
    "TwoLineElement", "access_windows", "checksum", "cross_track_distance_km",
    "ecef_to_eci", "ecef_to_geodetic", "eci_to_ecef", "eclipse_state",
    "format_tle", "geodetic_to_ecef", "ground_track", "lighting_intervals",
    "orbital_period", "parse_tle", "propagate", "propagate_grid",
    "semi_major_axis", "strip_access_windows", "subsatellite_point",
    "sun_position", "topocentric_view", "EARTH_RADIUS_KM", "LIT", "UMBRA",
]
