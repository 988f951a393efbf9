"""Shared fixtures: element-set and scenario factories kept small so the
suite stays fast."""

import pytest

from astsched.astrodynamics.tle import format_tle, parse_tle
from astsched.scenario import scenario_from_dict

ANCHOR = "2025-07-17T12:00:00Z"


def make_tle(satellite_id=90001, epoch_days=198.5, inclination=51.6,
             raan=120.0, eccentricity=0.0008, arg_perigee=40.0,
             mean_anomaly=300.0, mean_motion=15.2, bstar=1e-4):
    l1, l2 = format_tle(
        satellite_id=satellite_id, epoch_year=2025, epoch_days=epoch_days,
        inclination=inclination, raan=raan, eccentricity=eccentricity,
        arg_perigee=arg_perigee, mean_anomaly=mean_anomaly,
        mean_motion=mean_motion, bstar=bstar)
    return parse_tle(l1, l2)


def scenario_doc(kind="revisit", horizon=43200.0, n_sats=1, targets=None,
                 stations=None, requests=None, station_pairs=None):
    sats = []
    presets = [
        dict(satellite_id=90001, inclination=51.6, raan=120.0, mean_motion=15.2),
        dict(satellite_id=90002, inclination=97.6, raan=200.0, mean_motion=14.8),
        dict(satellite_id=90003, inclination=51.6, raan=125.0, mean_motion=15.2,
             mean_anomaly=120.0),
        dict(satellite_id=90004, inclination=86.4, raan=10.0, mean_motion=14.34),
    ]
    for i in range(n_sats):
        tle = make_tle(**presets[i % len(presets)])
        sats.append({"id": f"sat{i + 1}", "tle": list(tle.raw_lines)})
    return {
        "schema_version": 1,
        "id": "fixture",
        "benchmark_kind": kind,
        "epoch_anchor": ANCHOR,
        "horizon_s": horizon,
        "satellites": sats,
        "stations": stations or [
            {"id": "gs1", "lat_deg": 48.0, "lon_deg": 11.0}],
        "targets": targets if targets is not None else [
            {"id": "t1", "kind": "monitoring", "lat_deg": 40.0,
             "lon_deg": -75.0}],
        "requests": requests or [],
        "station_pairs": station_pairs or [],
    }


@pytest.fixture
def small_scenario():
    return scenario_from_dict(scenario_doc())


@pytest.fixture(scope="session")
def iss_tle():
    return make_tle()
