"""Visibility scanning: access windows, ground tracks, lighting intervals.

Scanning samples a predicate on a regular grid, then refines each
boundary by bisection to 1 s.  Horizon times are seconds since a caller
supplied anchor (`anchor_jd`), which also fixes Earth rotation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .frames import (
    GeodeticPoint,
    geodetic_to_ecef,
    subsatellite_point,
    topocentric_arrays,
    topocentric_view,
)
from .propagation import TwoLineElement, propagate, propagate_grid
from .sun import LIT, eclipse_state

EARTH_MEAN_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class AccessWindow:
    satellite_id: str
    counterpart_id: str
    start: float               # s since anchor
    end: float
    peak_elevation: float      # deg (peak cross-track margin, km, for strips)


def _tle_offset(tle: TwoLineElement, anchor_jd: float, t: float) -> float:
    return (anchor_jd - tle.epoch_jd) * 86400.0 + t


def _scan_windows(predicate_grid: np.ndarray, samples: np.ndarray,
                  boundary_fn: Callable[[float], float],
                  start: float, end: float) -> list[tuple[float, float]]:
    """Maximal true-runs of a sampled predicate, boundaries bisected to 1 s.

    `boundary_fn` returns a signed margin (>= 0 inside the predicate).
    """
    mask = predicate_grid
    if not mask.any():
        return []
    intervals = []
    idx = np.flatnonzero(np.diff(mask.astype(np.int8)))
    run_starts = [0] if mask[0] else []
    run_ends = []
    for i in idx:
        if mask[i + 1] and not mask[i]:
            run_starts.append(i + 1)
        elif mask[i] and not mask[i + 1]:
            run_ends.append(i)
    if mask[-1]:
        run_ends.append(len(mask) - 1)

    for i0, i1 in zip(run_starts, run_ends):
        w_start = samples[i0]
        w_end = samples[i1]
        if i0 > 0:
            w_start = _bisect(boundary_fn, samples[i0 - 1], samples[i0])
        w_end_hi = samples[i1 + 1] if i1 + 1 < len(samples) else end
        if w_end_hi > w_end:
            w_end = _bisect_down(boundary_fn, samples[i1], w_end_hi)
        intervals.append((max(w_start, start), min(w_end, end)))
    return [(a, b) for a, b in intervals if b > a]


def _bisect(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """Rising crossing: fn(lo) < 0 <= fn(hi); returns the crossing within 1 s."""
    while hi - lo > 1.0:
        mid = 0.5 * (lo + hi)
        if fn(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    return hi


def _bisect_down(fn: Callable[[float], float], lo: float, hi: float) -> float:
    """Falling crossing: fn(lo) >= 0 > fn(hi); returns the crossing within 1 s."""
    while hi - lo > 1.0:
        mid = 0.5 * (lo + hi)
        if fn(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def access_windows(tle: TwoLineElement, anchor_jd: float, site: GeodeticPoint,
                   horizon: tuple[float, float], min_elevation: float = 5.0,
                   scan_step: float = 10.0, backend: str = "sgp4",
                   satellite_id: str = "", counterpart_id: str = "") -> list[AccessWindow]:
    """Maximal intervals where the site sees the satellite above the mask."""
    start, end = horizon
    if scan_step <= 0.0:
        raise ValueError("scan_step must be positive")
    if end <= start:
        return []
    samples = np.arange(start, end + scan_step, scan_step)
    samples = samples[samples <= end]
    if samples[-1] < end:
        samples = np.append(samples, end)
    offsets = _tle_offset(tle, anchor_jd, samples)
    pos, _ = propagate_grid(tle, offsets, backend)
    jds = anchor_jd + samples / 86400.0
    _, el, _ = topocentric_arrays(site, pos, jds)

    def margin(t: float) -> float:
        state = propagate(tle, _tle_offset(tle, anchor_jd, t), backend)
        view = topocentric_view(site, state.position, anchor_jd + t / 86400.0)
        return view.elevation - min_elevation

    windows = []
    for a, b in _scan_windows(el >= min_elevation, samples, margin, start, end):
        inside = (samples >= a) & (samples <= b)
        peak = float(el[inside].max()) if inside.any() else min_elevation
        windows.append(AccessWindow(satellite_id, counterpart_id, a, b, peak))
    return windows


def strip_access_windows(tle: TwoLineElement, anchor_jd: float,
                         axis: tuple[GeodeticPoint, GeodeticPoint], reach_km: float,
                         horizon: tuple[float, float], scan_step: float = 10.0,
                         backend: str = "sgp4", satellite_id: str = "",
                         counterpart_id: str = "") -> list[AccessWindow]:
    """Intervals where the sub-satellite point is within cross-track reach
    of the strip axis (push-broom visibility)."""
    start, end = horizon
    if scan_step <= 0.0:
        raise ValueError("scan_step must be positive")
    if end <= start:
        return []
    samples = np.arange(start, end + scan_step, scan_step)
    samples = samples[samples <= end]
    if samples[-1] < end:
        samples = np.append(samples, end)

    def margin(t: float) -> float:
        state = propagate(tle, _tle_offset(tle, anchor_jd, t), backend)
        ssp = subsatellite_point(state.position, anchor_jd + t / 86400.0)
        return reach_km - cross_track_distance_km(ssp, axis)

    margins = np.array([margin(t) for t in samples])
    windows = []
    for a, b in _scan_windows(margins >= 0.0, samples, margin, start, end):
        inside = (samples >= a) & (samples <= b)
        peak = float(margins[inside].max()) if inside.any() else 0.0
        windows.append(AccessWindow(satellite_id, counterpart_id, a, b, peak))
    return windows


def cross_track_distance_km(point: GeodeticPoint,
                            axis: tuple[GeodeticPoint, GeodeticPoint]) -> float:
    """Spherical distance from a point to a great-circle segment."""
    p = _unit(point)
    a = _unit(axis[0])
    b = _unit(axis[1])
    axis_len = _angle(a, b)
    if axis_len < 1e-12:
        return EARTH_MEAN_RADIUS_KM * _angle(p, a)
    n = np.cross(a, b)
    n /= np.linalg.norm(n)
    # signed arc distance from the great circle, then clamp to the segment
    xt = math.asin(max(-1.0, min(1.0, float(np.dot(p, n)))))
    proj = p - np.dot(p, n) * n
    norm = np.linalg.norm(proj)
    if norm < 1e-12:
        return EARTH_MEAN_RADIUS_KM * min(_angle(p, a), _angle(p, b))
    proj /= norm
    along = _angle(a, proj)
    if np.dot(np.cross(a, proj), n) < 0.0:
        along = -along
    if 0.0 <= along <= axis_len:
        return EARTH_MEAN_RADIUS_KM * abs(xt)
    return EARTH_MEAN_RADIUS_KM * min(_angle(p, a), _angle(p, b))


def cross_track_distances_km(units: np.ndarray,
                             axis: tuple[GeodeticPoint, GeodeticPoint]) -> np.ndarray:
    """Vectorized spherical distance from unit vectors (N,3) to a segment."""
    a = _unit(axis[0])
    b = _unit(axis[1])
    axis_len = _angle(a, b)
    if axis_len < 1e-12:
        return EARTH_MEAN_RADIUS_KM * np.arccos(np.clip(units @ a, -1.0, 1.0))
    n = np.cross(a, b)
    n /= np.linalg.norm(n)
    dot_n = np.clip(units @ n, -1.0, 1.0)
    xt = np.abs(np.arcsin(dot_n))
    proj = units - np.outer(dot_n, n)
    norms = np.linalg.norm(proj, axis=1)
    norms = np.where(norms < 1e-12, 1.0, norms)
    proj = proj / norms[:, None]
    along = np.arccos(np.clip(proj @ a, -1.0, 1.0))
    signs = np.einsum("ij,j->i", np.cross(np.broadcast_to(a, proj.shape), proj), n)
    along = np.where(signs < 0.0, -along, along)
    end_dist = np.minimum(
        np.arccos(np.clip(units @ a, -1.0, 1.0)),
        np.arccos(np.clip(units @ b, -1.0, 1.0)))
    on_segment = (along >= 0.0) & (along <= axis_len)
    return EARTH_MEAN_RADIUS_KM * np.where(on_segment, xt, end_dist)


def _unit(point: GeodeticPoint) -> np.ndarray:
    v = geodetic_to_ecef(GeodeticPoint(point.latitude, point.longitude, 0.0))
    return v / np.linalg.norm(v)


def _angle(u: np.ndarray, v: np.ndarray) -> float:
    return math.acos(max(-1.0, min(1.0, float(np.dot(u, v)))))


def ground_track(tle: TwoLineElement, anchor_jd: float,
                 horizon: tuple[float, float], step: float,
                 backend: str = "sgp4") -> list[GeodeticPoint]:
    """Sub-satellite geodetic points sampled every `step` seconds."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    start, end = horizon
    samples = np.arange(start, end + step / 2.0, step)
    if len(samples) == 0 or samples[0] > start:
        samples = np.insert(samples, 0, start)
    offsets = _tle_offset(tle, anchor_jd, samples)
    pos, _ = propagate_grid(tle, offsets, backend)
    return [subsatellite_point(pos[i], anchor_jd + t / 86400.0)
            for i, t in enumerate(samples)]


def lighting_intervals(tle: TwoLineElement, anchor_jd: float,
                       horizon: tuple[float, float], scan_step: float = 60.0,
                       backend: str = "sgp4") -> list[tuple[float, float]]:
    """Maximal lit intervals over the horizon, boundaries bisected to 1 s."""
    start, end = horizon
    if end <= start:
        return []
    samples = np.arange(start, end + scan_step, scan_step)
    samples = samples[samples <= end]
    if samples[-1] < end:
        samples = np.append(samples, end)
    offsets = _tle_offset(tle, anchor_jd, samples)
    pos, _ = propagate_grid(tle, offsets, backend)

    lit_grid = np.array([
        eclipse_state(pos[i], anchor_jd + t / 86400.0) == LIT
        for i, t in enumerate(samples)
    ])

    def margin(t: float) -> float:
        state = propagate(tle, _tle_offset(tle, anchor_jd, t), backend)
        return 1.0 if eclipse_state(state.position, anchor_jd + t / 86400.0) == LIT else -1.0

    return _scan_windows(lit_grid, samples, margin, start, end)
