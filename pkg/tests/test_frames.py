"""Frames and time: GMST against an independent formula, geodetic round
trips, and topocentric geometry sanity."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from astsched.astrodynamics.frames import (
    GeodeticPoint,
    ecef_to_eci,
    ecef_to_geodetic,
    eci_to_ecef,
    geodetic_to_ecef,
    subsatellite_point,
    topocentric_arrays,
    topocentric_view,
)
from astsched.timebase import gmst, jd_from_utc, parse_utc


def oracle_gmst(jd):
    """IAU 1982 GMST, seconds form, written independently of the library."""
    t = (jd - 2451545.0) / 36525.0
    sec = (67310.54841 + (876600.0 * 3600.0 + 8640184.812866) * t
           + 0.093104 * t * t - 6.2e-6 * t ** 3)
    return math.radians((sec % 86400.0) / 240.0) % (2.0 * math.pi)


def test_gmst_matches_independent_formula():
    for utc in ("2025-07-17T12:00:00Z", "2000-01-01T12:00:00Z",
                "2030-03-21T06:30:00Z"):
        jd = jd_from_utc(utc)
        assert gmst(jd) == pytest.approx(oracle_gmst(jd), abs=1e-9)


def test_parse_utc_epoch():
    dt = parse_utc("1970-01-01T00:00:00Z")
    assert dt.timestamp() == 0.0
    assert jd_from_utc("2000-01-01T12:00:00Z") == pytest.approx(2451545.0)
    assert jd_from_utc("1970-01-01T00:00:00Z") == pytest.approx(2440587.5)


@settings(max_examples=200, deadline=None)
@given(lat=st.floats(min_value=-89.9, max_value=89.9),
       lon=st.floats(min_value=-180.0, max_value=179.9999),
       alt=st.floats(min_value=-2.0, max_value=2000.0))
def test_geodetic_round_trip(lat, lon, alt):
    p = GeodeticPoint(lat, lon, alt)
    back = ecef_to_geodetic(geodetic_to_ecef(p))
    assert back.latitude == pytest.approx(lat, abs=1e-7)
    assert back.longitude == pytest.approx(lon, abs=1e-7)
    assert back.altitude == pytest.approx(alt, abs=1e-5)


def test_eci_ecef_round_trip():
    jd = jd_from_utc("2025-07-17T12:00:00Z")
    v = np.array([5123.4, -2345.6, 3456.7])
    assert np.allclose(ecef_to_eci(eci_to_ecef(v, jd), jd), v, atol=1e-9)


def test_eci_ecef_preserves_norm_and_z():
    jd = jd_from_utc("2025-07-17T12:00:00Z")
    v = np.array([5123.4, -2345.6, 3456.7])
    w = eci_to_ecef(v, jd)
    assert np.linalg.norm(w) == pytest.approx(np.linalg.norm(v))
    assert w[2] == pytest.approx(v[2])


def test_zenith_satellite_elevation():
    """A satellite placed straight above a site must sit at el = 90."""
    site = GeodeticPoint(35.0, 45.0, 0.0)
    jd = jd_from_utc("2025-07-17T12:00:00Z")
    up = geodetic_to_ecef(GeodeticPoint(35.0, 45.0, 700.0))
    sat_eci = ecef_to_eci(up, jd)
    view = topocentric_view(site, sat_eci, jd)
    assert view.elevation == pytest.approx(90.0, abs=1e-6)
    assert view.range_km == pytest.approx(700.0, abs=0.5)


def test_antipodal_satellite_below_horizon():
    site = GeodeticPoint(0.0, 0.0, 0.0)
    jd = jd_from_utc("2025-07-17T12:00:00Z")
    sat_eci = ecef_to_eci(geodetic_to_ecef(GeodeticPoint(0.0, 180.0, 700.0)), jd)
    assert topocentric_view(site, sat_eci, jd).elevation < -80.0


def test_topocentric_arrays_match_scalar():
    site = GeodeticPoint(48.0, 11.0, 0.5)
    jd0 = jd_from_utc("2025-07-17T12:00:00Z")
    rng = np.random.default_rng(7)
    positions = rng.uniform(-7000.0, 7000.0, size=(20, 3))
    positions *= (6900.0 / np.linalg.norm(positions, axis=1))[:, None]
    jds = jd0 + np.linspace(0.0, 0.5, 20)
    az, el, rkm = topocentric_arrays(site, positions, jds)
    for i in range(20):
        v = topocentric_view(site, positions[i], jds[i])
        assert az[i] == pytest.approx(v.azimuth, abs=1e-9)
        assert el[i] == pytest.approx(v.elevation, abs=1e-9)
        assert rkm[i] == pytest.approx(v.range_km, abs=1e-9)


def test_subsatellite_point_directly_below():
    jd = jd_from_utc("2025-07-17T12:00:00Z")
    sat_eci = ecef_to_eci(geodetic_to_ecef(GeodeticPoint(10.0, 20.0, 550.0)), jd)
    ssp = subsatellite_point(sat_eci, jd)
    assert ssp.latitude == pytest.approx(10.0, abs=0.2)
    assert ssp.longitude == pytest.approx(20.0, abs=1e-6)


def test_longitude_normalization():
    p = GeodeticPoint(0.0, 190.0)
    assert p.longitude == pytest.approx(-170.0)
