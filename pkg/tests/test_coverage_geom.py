"""Coverage geometry: Monte-Carlo area oracle on the sphere, spherical
excess check, recall invariants, swath footprints, and stereo clauses."""

import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from astsched.coverage_geom import (
    EARTH_AUTHALIC_RADIUS_KM,
    GeoPolygon,
    LocalProjection,
    StereoParams,
    area_recall,
    circular_azimuth_difference,
    intersection_area,
    polygon_area,
    stereo_pair_valid,
    swath_footprint,
    to_geojson,
)
from astsched.astrodynamics.frames import GeodeticPoint
from astsched.errors import DegenerateError, EmptyTargetsError, NoCoverageError

R = EARTH_AUTHALIC_RADIUS_KM


def random_convex_polygon(rng, lat0, lon0, radius_deg):
    """Convex hull of random offsets around (lat0, lon0)."""
    pts = rng.uniform(-radius_deg, radius_deg, size=(12, 2))
    hull = ConvexHull(pts)
    ring = [(lat0 + pts[i, 0], lon0 + pts[i, 1] / max(0.2, math.cos(math.radians(lat0))) * math.cos(math.radians(lat0)))
            for i in hull.vertices]
    return GeoPolygon.from_latlon([(la, lo) for la, lo in ring])


def unit_vectors(latlon):
    lat = np.radians(latlon[:, 0])
    lon = np.radians(latlon[:, 1])
    return np.stack([np.cos(lat) * np.cos(lon),
                     np.cos(lat) * np.sin(lon),
                     np.sin(lat)], axis=1)


def points_in_spherical_convex(points, poly):
    """Vectorized membership test: a point is inside a convex spherical
    polygon iff it lies on one side of every edge's great-circle plane."""
    verts = unit_vectors(np.array([[p.latitude, p.longitude] for p in poly.ring]))
    normals = np.cross(verts, np.roll(verts, -1, axis=0))
    side = points @ normals.T
    return np.all(side >= -1e-12, axis=1) | np.all(side <= 1e-12, axis=1)


def mc_intersection_area(a, b, rng, n=1_000_000):
    """Independent Monte-Carlo estimate of the spherical intersection area,
    sampled uniformly over a bounding box on the sphere."""
    lats = [p.latitude for p in a.ring + b.ring]
    lons = [p.longitude for p in a.ring + b.ring]
    lat_lo, lat_hi = min(lats) - 0.2, max(lats) + 0.2
    lon_lo, lon_hi = min(lons) - 0.2, max(lons) + 0.2
    z = rng.uniform(math.sin(math.radians(lat_lo)),
                    math.sin(math.radians(lat_hi)), size=n)
    lat = np.degrees(np.arcsin(z))
    lon = rng.uniform(lon_lo, lon_hi, size=n)
    pts = unit_vectors(np.stack([lat, lon], axis=1))
    inside = points_in_spherical_convex(pts, a) & points_in_spherical_convex(pts, b)
    box_area = (R ** 2 * math.radians(lon_hi - lon_lo)
                * (math.sin(math.radians(lat_hi)) - math.sin(math.radians(lat_lo))))
    p_hat = inside.mean()
    sigma = box_area * math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / n)
    return box_area * p_hat, sigma


def test_intersection_matches_monte_carlo():
    """50 convex pairs: the projected clipping area agrees with a spherical
    Monte-Carlo estimate within 3 sigma plus a small edge-model allowance."""
    rng = np.random.default_rng(17)
    for case in range(50):
        lat0 = float(rng.uniform(-50.0, 50.0))
        lon0 = float(rng.uniform(-170.0, 170.0))
        radius = float(rng.uniform(0.6, 1.8))
        a = random_convex_polygon(rng, lat0, lon0, radius)
        b = random_convex_polygon(rng, lat0 + radius * 0.7, lon0 + radius * 0.5,
                                  radius)
        lib = intersection_area(a, b)
        mc, sigma = mc_intersection_area(a, b, rng, n=1_000_000)
        margin = 3.0 * sigma + 0.004 * max(polygon_area(a), polygon_area(b))
        assert abs(lib - mc) <= margin, (case, lib, mc, sigma)


def test_equatorial_square_matches_spherical_excess():
    """A 1x1 degree square at the equator: exact spherical area is
    R^2 * dlon * (sin lat_hi - sin lat_lo)."""
    square = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)])
    exact = R ** 2 * math.radians(1.0) * (math.sin(math.radians(1.0)) - 0.0)
    assert polygon_area(square) == pytest.approx(exact, rel=0.01)


def test_area_recall_half_coverage():
    target = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 0.0)])
    half = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 1.0), (2.0, 1.0), (2.0, 0.0)])
    assert area_recall([half], [target]) == pytest.approx(0.5, abs=0.005)


def test_area_recall_monotone_and_no_double_count():
    target = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 2.0), (2.0, 2.0), (2.0, 0.0)])
    left = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 1.0), (2.0, 1.0), (2.0, 0.0)])
    right = GeoPolygon.from_latlon([(0.0, 1.0), (0.0, 2.0), (2.0, 2.0), (2.0, 1.0)])
    one = area_recall([left], [target])
    # overlapping duplicates never double-count
    assert area_recall([left, left], [target]) == pytest.approx(one, abs=1e-9)
    # adding a footprint never decreases recall
    both = area_recall([left, right], [target])
    assert both >= one - 1e-12
    assert both == pytest.approx(1.0, abs=0.005)


def test_area_recall_edges():
    target = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)])
    assert area_recall([], [target]) == 0.0
    far = GeoPolygon.from_latlon([(20.0, 20.0), (20.0, 21.0), (21.0, 21.0), (21.0, 20.0)])
    assert area_recall([far], [target]) == 0.0
    with pytest.raises(EmptyTargetsError):
        area_recall([far], [])


def test_polygon_needs_three_vertices():
    with pytest.raises(DegenerateError):
        GeoPolygon.from_latlon([(0.0, 0.0), (1.0, 1.0)])


def test_projection_round_trip():
    proj = LocalProjection(GeodeticPoint(42.0, -71.0))
    for lat, lon in ((42.0, -71.0), (45.0, -68.0), (38.5, -75.25)):
        x, y = proj.forward(GeodeticPoint(lat, lon))
        back = proj.inverse(x, y)
        assert back.latitude == pytest.approx(lat, abs=1e-9)
        assert back.longitude == pytest.approx(lon, abs=1e-9)


def test_swath_footprint_rectangle_area():
    """A track flying straight down the axis sweeps length x width."""
    axis = (GeodeticPoint(0.0, 0.0), GeodeticPoint(0.0, 2.0))
    track = [GeodeticPoint(0.0, 0.1 * i) for i in range(21)]
    fp = swath_footprint(track, axis, width_km=50.0)
    length_km = R * math.radians(2.0)
    assert polygon_area(fp) == pytest.approx(length_km * 50.0, rel=0.01)


def test_swath_footprint_clips_to_overflown_extent():
    axis = (GeodeticPoint(0.0, 0.0), GeodeticPoint(0.0, 2.0))
    track = [GeodeticPoint(0.0, 0.5), GeodeticPoint(0.0, 1.0)]
    fp = swath_footprint(track, axis, width_km=40.0)
    length_km = R * math.radians(0.5)
    assert polygon_area(fp) == pytest.approx(length_km * 40.0, rel=0.01)


def test_swath_footprint_errors():
    axis = (GeodeticPoint(0.0, 0.0), GeodeticPoint(0.0, 2.0))
    with pytest.raises(NoCoverageError):
        swath_footprint([GeodeticPoint(0.0, 1.0)], axis, 40.0)
    off_axis = [GeodeticPoint(0.0, 5.0), GeodeticPoint(0.0, 6.0)]
    with pytest.raises(NoCoverageError):
        swath_footprint(off_axis, axis, 40.0)
    same = (GeodeticPoint(0.0, 1.0), GeodeticPoint(0.0, 1.0))
    with pytest.raises(DegenerateError):
        swath_footprint([GeodeticPoint(0.0, 0.5), GeodeticPoint(0.0, 1.5)], same, 40.0)
    with pytest.raises(ValueError):
        swath_footprint([GeodeticPoint(0.0, 0.5), GeodeticPoint(0.0, 1.5)], axis, 0.0)


def test_circular_azimuth_difference_wraps():
    assert circular_azimuth_difference(350.0, 10.0) == pytest.approx(20.0)
    assert circular_azimuth_difference(10.0, 350.0) == pytest.approx(20.0)
    assert circular_azimuth_difference(0.0, 180.0) == pytest.approx(180.0)
    assert circular_azimuth_difference(90.0, 90.0) == 0.0


def view(az, el):
    return SimpleNamespace(azimuth=az, elevation=el)


def test_stereo_pair_clauses():
    params = StereoParams(az_min=15.0, az_max=45.0, t_max=600.0, el_min=55.0)
    ok = stereo_pair_valid((0.0, view(100.0, 70.0)), (100.0, view(130.0, 65.0)), params)
    assert ok.valid and ok.reasons == ()

    narrow = stereo_pair_valid((0.0, view(100.0, 70.0)), (100.0, view(105.0, 65.0)), params)
    assert not narrow.valid
    assert any("below minimum" in r for r in narrow.reasons)

    wide = stereo_pair_valid((0.0, view(100.0, 70.0)), (100.0, view(160.0, 65.0)), params)
    assert any("above maximum" in r for r in wide.reasons)

    late = stereo_pair_valid((0.0, view(100.0, 70.0)), (700.0, view(130.0, 65.0)), params)
    assert any("time separation" in r for r in late.reasons)

    low = stereo_pair_valid((0.0, view(100.0, 70.0)), (100.0, view(130.0, 40.0)), params)
    assert any("elevation" in r for r in low.reasons)

    # multiple clauses can fail at once and all are reported
    bad = stereo_pair_valid((0.0, view(100.0, 40.0)), (700.0, view(104.0, 70.0)), params)
    assert not bad.valid and len(bad.reasons) == 3


def test_stereo_params_validation():
    with pytest.raises(ValueError):
        StereoParams(az_min=45.0, az_max=15.0, t_max=600.0, el_min=55.0)
    with pytest.raises(ValueError):
        StereoParams(az_min=15.0, az_max=45.0, t_max=0.0, el_min=55.0)
    with pytest.raises(ValueError):
        StereoParams(az_min=15.0, az_max=45.0, t_max=600.0, el_min=95.0)


def test_geojson_ring_closes():
    square = GeoPolygon.from_latlon([(0.0, 0.0), (0.0, 1.0), (1.0, 1.0)])
    doc = to_geojson(square)
    ring = doc["coordinates"][0]
    assert doc["type"] == "Polygon"
    assert ring[0] == ring[-1]
    assert len(ring) == 4
