"""Regional-coverage geometry: polygon areas, clipping, swath footprints,
area-based recall, and stereo doublet validity.

Polygons are regional (vertices span well under 90 degrees of arc), so
areas and intersections are computed on a local Lambert azimuthal
equal-area projection about the evaluation cluster's centroid; planar
clipping is delegated to shapely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from shapely.geometry import LineString, Polygon
from shapely.ops import unary_union

from .astrodynamics.frames import GeodeticPoint
from .errors import DegenerateError, EmptyTargetsError, NoCoverageError

EARTH_AUTHALIC_RADIUS_KM = 6371.0072


@dataclass(frozen=True)
class GeoPolygon:
    """Simple polygon on the ellipsoid; ring is open (closure implicit)."""
    ring: tuple[GeodeticPoint, ...]

    def __post_init__(self):
        if len(self.ring) < 3:
            raise DegenerateError(f"polygon needs >= 3 vertices, got {len(self.ring)}")

    @classmethod
    def from_latlon(cls, pairs: Sequence[Sequence[float]]) -> "GeoPolygon":
        return cls(tuple(GeodeticPoint(lat, lon) for lat, lon in pairs))

    def centroid(self) -> GeodeticPoint:
        lat = sum(p.latitude for p in self.ring) / len(self.ring)
        # average longitudes on the circle to survive the +/-180 seam
        x = sum(math.cos(math.radians(p.longitude)) for p in self.ring)
        y = sum(math.sin(math.radians(p.longitude)) for p in self.ring)
        lon = math.degrees(math.atan2(y, x))
        return GeodeticPoint(lat, lon)


@dataclass(frozen=True)
class StereoParams:
    az_min: float              # deg
    az_max: float              # deg
    t_max: float               # s
    el_min: float              # deg

    def __post_init__(self):
        if not 0.0 <= self.az_min < self.az_max <= 180.0:
            raise ValueError(f"azimuth band [{self.az_min}, {self.az_max}] invalid")
        if self.t_max <= 0.0:
            raise ValueError("t_max must be positive")
        if not 0.0 < self.el_min < 90.0:
            raise ValueError(f"el_min {self.el_min} outside (0, 90)")


class LocalProjection:
    """Lambert azimuthal equal-area chart about a reference point, km."""

    def __init__(self, origin: GeodeticPoint):
        self.origin = origin
        self._lat0 = math.radians(origin.latitude)
        self._lon0 = math.radians(origin.longitude)

    def forward(self, point: GeodeticPoint) -> tuple[float, float]:
        lat = math.radians(point.latitude)
        dlon = math.radians(point.longitude) - self._lon0
        s0, c0 = math.sin(self._lat0), math.cos(self._lat0)
        s, c = math.sin(lat), math.cos(lat)
        denom = 1.0 + s0 * s + c0 * c * math.cos(dlon)
        if denom < 1e-12:
            raise DegenerateError("point antipodal to projection origin")
        k = math.sqrt(2.0 / denom)
        r = EARTH_AUTHALIC_RADIUS_KM
        return (r * k * c * math.sin(dlon),
                r * k * (c0 * s - s0 * c * math.cos(dlon)))

    def inverse(self, x: float, y: float) -> GeodeticPoint:
        r = EARTH_AUTHALIC_RADIUS_KM
        rho = math.hypot(x, y)
        if rho < 1e-9:
            return self.origin
        c = 2.0 * math.asin(min(1.0, rho / (2.0 * r)))
        s0, c0 = math.sin(self._lat0), math.cos(self._lat0)
        lat = math.asin(math.cos(c) * s0 + y * math.sin(c) * c0 / rho)
        lon = self._lon0 + math.atan2(
            x * math.sin(c), rho * c0 * math.cos(c) - y * s0 * math.sin(c))
        lon_deg = ((math.degrees(lon) + 180.0) % 360.0) - 180.0
        return GeodeticPoint(math.degrees(lat), lon_deg)

    def shapely_polygon(self, poly: GeoPolygon) -> Polygon:
        pts = [self.forward(p) for p in poly.ring]
        shp = Polygon(pts)
        if shp.area == 0.0 or not shp.is_valid:
            raise DegenerateError("polygon ring is degenerate or self-intersecting")
        return shp


def _cluster_origin(polys: Sequence[GeoPolygon]) -> GeodeticPoint:
    cents = [p.centroid() for p in polys]
    lat = sum(c.latitude for c in cents) / len(cents)
    x = sum(math.cos(math.radians(c.longitude)) for c in cents)
    y = sum(math.sin(math.radians(c.longitude)) for c in cents)
    return GeodeticPoint(lat, math.degrees(math.atan2(y, x)))


def polygon_area(poly: GeoPolygon) -> float:
    """Area in km^2 on the local equal-area chart about the polygon centroid."""
    proj = LocalProjection(poly.centroid())
    return proj.shapely_polygon(poly).area


def intersection_area(a: GeoPolygon, b: GeoPolygon) -> float:
    """Area of the clipped intersection, km^2; 0 when disjoint."""
    proj = LocalProjection(_cluster_origin([a, b]))
    return proj.shapely_polygon(a).intersection(proj.shapely_polygon(b)).area


def area_recall(footprints: Sequence[GeoPolygon],
                targets: Sequence[GeoPolygon]) -> float:
    """Captured-over-required area ratio.  Footprints are unioned before
    intersecting so overlaps never double-count."""
    if not targets:
        raise EmptyTargetsError("area recall needs at least one target polygon")
    proj = LocalProjection(_cluster_origin(list(targets)))
    target_shapes = [proj.shapely_polygon(t) for t in targets]
    total = sum(s.area for s in target_shapes)
    if not footprints:
        return 0.0
    fp_union = unary_union([proj.shapely_polygon(f) for f in footprints])
    captured = fp_union.intersection(unary_union(target_shapes)).area
    return min(1.0, captured / total)


def swath_footprint(track: Sequence[GeodeticPoint],
                    axis: tuple[GeodeticPoint, GeodeticPoint],
                    width_km: float) -> GeoPolygon:
    """Ground quadrilateral swept along a strip axis.

    The axis is clipped to the along-track extent actually overflown (the
    track points' projections onto the axis), then buffered laterally by
    width/2.  `track` is the sub-satellite track sampled over the
    observation window.
    """
    if len(track) < 2:
        raise NoCoverageError("window too short: need at least two track samples")
    if width_km <= 0.0:
        raise ValueError("width must be positive")
    origin = GeodeticPoint(
        (axis[0].latitude + axis[1].latitude) / 2.0,
        (axis[0].longitude + axis[1].longitude) / 2.0)
    proj = LocalProjection(origin)
    a = np.array(proj.forward(axis[0]))
    b = np.array(proj.forward(axis[1]))
    axis_vec = b - a
    length = float(np.linalg.norm(axis_vec))
    if length < 1e-9:
        raise DegenerateError("strip axis endpoints coincide")
    unit = axis_vec / length
    params = []
    for p in track:
        xy = np.array(proj.forward(p))
        params.append(float(np.dot(xy - a, unit)))
    lo = max(0.0, min(params))
    hi = min(length, max(params))
    if hi - lo < 1e-6:
        raise NoCoverageError("window yields no along-track overlap with the axis")
    seg = LineString([tuple(a + lo * unit), tuple(a + hi * unit)])
    quad = seg.buffer(width_km / 2.0, cap_style=2, join_style=2)
    ring = [proj.inverse(x, y) for x, y in quad.exterior.coords[:-1]]
    return GeoPolygon(tuple(ring))


def circular_azimuth_difference(az1: float, az2: float) -> float:
    """Minor-arc separation of two azimuths, deg in [0, 180]."""
    d = abs(az1 - az2) % 360.0
    return min(d, 360.0 - d)


@dataclass(frozen=True)
class StereoVerdict:
    valid: bool
    reasons: tuple[str, ...] = ()


def stereo_pair_valid(obs1: tuple[float, "Topocentric"],
                      obs2: tuple[float, "Topocentric"],
                      params: StereoParams) -> StereoVerdict:
    """Doublet validity: azimuth separation inside the band, synchronized
    within t_max, both elevations above the floor.  Every failed clause is
    reported."""
    t1, view1 = obs1
    t2, view2 = obs2
    reasons = []
    daz = circular_azimuth_difference(view1.azimuth, view2.azimuth)
    if daz < params.az_min:
        reasons.append(
            f"azimuth separation {daz:.2f} deg below minimum {params.az_min:.2f} deg")
    elif daz > params.az_max:
        reasons.append(
            f"azimuth separation {daz:.2f} deg above maximum {params.az_max:.2f} deg")
    if abs(t1 - t2) > params.t_max:
        reasons.append(
            f"time separation {abs(t1 - t2):.0f} s exceeds {params.t_max:.0f} s")
    min_el = min(view1.elevation, view2.elevation)
    if min_el < params.el_min:
        reasons.append(
            f"minimum elevation {min_el:.2f} deg below {params.el_min:.2f} deg")
    return StereoVerdict(not reasons, tuple(reasons))


def to_geojson(poly: GeoPolygon) -> dict:
    """GeoJSON-compatible export (lon/lat order, closed ring)."""
    coords = [[p.longitude, p.latitude] for p in poly.ring]
    coords.append(coords[0])
    return {"type": "Polygon", "coordinates": [coords]}
