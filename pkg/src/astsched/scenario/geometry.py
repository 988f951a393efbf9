"""Shared, lazily-built geometry caches for one scenario.

Propagating every satellite over a 4-day horizon dominates runtime, so
each satellite's ephemeris is sampled once on the scenario scan grid and
every visibility predicate reuses it.  Boundary bisection falls back to
scalar propagation, which is cheap (a handful of calls per window).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from ..astrodynamics.access import (
    AccessWindow,
    _bisect,  # noqa: F401  (re-exported for tests)
    _scan_windows,
    cross_track_distances_km,
)
from ..astrodynamics.frames import (
    GeodeticPoint,
    Topocentric,
    eci_to_ecef,
    subsatellite_point,
    topocentric_arrays,
    topocentric_view,
)
from ..astrodynamics.propagation import StateVector, propagate, propagate_grid
from ..astrodynamics.sun import LIT, eclipse_state
from ..attitude import UnitQuaternion, pointing_quaternion
from .model import Scenario, StripDefinition


class GeometryCache:
    """Ephemeris grids, access windows, lighting, and attitude helpers."""

    def __init__(self, scenario: Scenario, backend: str = "sgp4"):
        self.scenario = scenario
        self.backend = backend
        step = scenario.scan_step
        times = np.arange(0.0, scenario.horizon + step, step)
        times = times[times <= scenario.horizon]
        if times[-1] < scenario.horizon:
            times = np.append(times, scenario.horizon)
        self.times = times
        self._positions: dict[str, np.ndarray] = {}
        self._velocities: dict[str, np.ndarray] = {}
        self._subsat_units: dict[str, np.ndarray] = {}
        self._windows: dict[tuple, list[AccessWindow]] = {}
        self._lighting: dict[str, list[tuple[float, float]]] = {}
        self.state_at = lru_cache(maxsize=100000)(self._state_at)

    # --- ephemeris ----------------------------------------------------------

    def _tle(self, sat_id: str):
        return self.scenario.satellites[sat_id].tle

    def _offsets(self, sat_id: str, t) -> np.ndarray:
        tle = self._tle(sat_id)
        return (self.scenario.anchor_jd - tle.epoch_jd) * 86400.0 + np.asarray(t)

    def positions(self, sat_id: str) -> np.ndarray:
        if sat_id not in self._positions:
            pos, vel = propagate_grid(self._tle(sat_id),
                                      self._offsets(sat_id, self.times), self.backend)
            self._positions[sat_id] = pos
            self._velocities[sat_id] = vel
        return self._positions[sat_id]

    def _state_at(self, sat_id: str, t: float) -> StateVector:
        state = propagate(self._tle(sat_id), float(self._offsets(sat_id, t)),
                          self.backend)
        return StateVector(epoch=t, position=state.position, velocity=state.velocity)

    def jd(self, t: float) -> float:
        return self.scenario.anchor_jd + t / 86400.0

    def subsat_units(self, sat_id: str) -> np.ndarray:
        """Unit ECEF vectors of the sub-satellite points on the grid."""
        if sat_id not in self._subsat_units:
            pos = self.positions(sat_id)
            jds = self.scenario.anchor_jd + self.times / 86400.0
            ecef = np.array([eci_to_ecef(pos[i], jds[i]) for i in range(len(jds))])
            self._subsat_units[sat_id] = ecef / np.linalg.norm(ecef, axis=1)[:, None]
        return self._subsat_units[sat_id]

    # --- observation geometry ----------------------------------------------

    def view(self, sat_id: str, point: GeodeticPoint, t: float) -> Topocentric:
        state = self.state_at(sat_id, t)
        return topocentric_view(point, state.position, self.jd(t))

    def pointing(self, sat_id: str, point: GeodeticPoint, t: float) -> UnitQuaternion:
        state = self.state_at(sat_id, t)
        return pointing_quaternion(state, point, self.jd(t))

    def subsat(self, sat_id: str, t: float) -> GeodeticPoint:
        state = self.state_at(sat_id, t)
        return subsatellite_point(state.position, self.jd(t))

    def off_nadir_reach_km(self, sat_id: str) -> float:
        """Ground cross-track reach from the satellite's off-nadir limit,
        using its mean altitude."""
        pos = self.positions(sat_id)
        alt = float(np.mean(np.linalg.norm(pos, axis=1))) - 6371.0
        cone = math.radians(self.scenario.satellites[sat_id].max_off_nadir_deg)
        return alt * math.tan(cone)

    # --- access windows -----------------------------------------------------

    def windows_point(self, sat_id: str, counterpart_id: str, point: GeodeticPoint,
                      min_elevation: float) -> list[AccessWindow]:
        key = ("pt", sat_id, counterpart_id)
        if key not in self._windows:
            pos = self.positions(sat_id)
            jds = self.scenario.anchor_jd + self.times / 86400.0
            _, el, _ = topocentric_arrays(point, pos, jds)

            def margin(t: float) -> float:
                return self.view(sat_id, point, t).elevation - min_elevation

            windows = []
            runs = _scan_windows(el >= min_elevation, self.times, margin,
                                 0.0, self.scenario.horizon)
            for a, b in runs:
                inside = (self.times >= a) & (self.times <= b)
                peak = float(el[inside].max()) if inside.any() else min_elevation
                windows.append(AccessWindow(sat_id, counterpart_id, a, b, peak))
            self._windows[key] = windows
        return self._windows[key]

    def windows_strip(self, sat_id: str, strip: StripDefinition) -> list[AccessWindow]:
        key = ("strip", sat_id, strip.id)
        if key not in self._windows:
            reach = self.off_nadir_reach_km(sat_id) + strip.width_km / 2.0
            units = self.subsat_units(sat_id)
            dists = cross_track_distances_km(units, strip.axis)

            def margin(t: float) -> float:
                ssp = self.subsat(sat_id, t)
                return reach - _scalar_cross_track(ssp, strip.axis)

            windows = []
            runs = _scan_windows(dists <= reach, self.times, margin,
                                 0.0, self.scenario.horizon)
            for a, b in runs:
                inside = (self.times >= a) & (self.times <= b)
                peak = float((reach - dists[inside]).max()) if inside.any() else 0.0
                windows.append(AccessWindow(sat_id, strip.id, a, b, peak))
            self._windows[key] = windows
        return self._windows[key]

    # --- lighting -----------------------------------------------------------

    def lighting(self, sat_id: str) -> list[tuple[float, float]]:
        if sat_id not in self._lighting:
            pos = self.positions(sat_id)
            jds = self.scenario.anchor_jd + self.times / 86400.0
            lit_grid = np.array([
                eclipse_state(pos[i], jds[i]) == LIT for i in range(len(jds))
            ])

            def margin(t: float) -> float:
                state = self.state_at(sat_id, t)
                return 1.0 if eclipse_state(state.position, self.jd(t)) == LIT else -1.0

            self._lighting[sat_id] = _scan_windows(
                lit_grid, self.times, margin, 0.0, self.scenario.horizon)
        return self._lighting[sat_id]


def _scalar_cross_track(point: GeodeticPoint, axis) -> float:
    from ..astrodynamics.access import cross_track_distance_km
    return cross_track_distance_km(point, axis)
