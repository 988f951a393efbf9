"""Evaluators against independent brute-force oracles on seeded
micro-instances, plus worked examples with hand arithmetic."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

import astsched.evaluators as evaluators
from astsched.evaluators import (
    MetricsReport,
    SCALAR_NAMES,
    eval_latency,
    eval_regional,
    eval_revisit,
    eval_satnet,
    eval_stereo,
    evaluate,
    observation_footprints,
)
from astsched.astrodynamics.frames import GeodeticPoint
from astsched.coverage_geom import StereoParams
from astsched.errors import UnknownRequestError
from astsched.scenario import Action, StripDefinition, scenario_from_dict
from astsched.scenario.model import RequestSpec, Scenario, TargetSpec
from conftest import scenario_doc


def alloc(aid, resource, request, start, end):
    return Action(id=aid, kind="allocate", satellite_id=resource,
                  counterpart_id=request, start=start, end=end)


def obs(aid, sat, target, start, end):
    return Action(id=aid, kind="observe", satellite_id=sat,
                  counterpart_id=target, start=start, end=end)


# --- satnet ------------------------------------------------------------------

def test_satnet_matches_oracle_on_seeded_instances():
    """100 random request/allocation sets: per-mission unsatisfied ratios,
    u_max, and u_rms reproduce an independent computation to 1e-12."""
    rng = np.random.default_rng(41)
    for case in range(100):
        requests = {}
        n_missions = int(rng.integers(1, 6))
        for m in range(n_missions):
            for r in range(int(rng.integers(1, 5))):
                rid = f"r{m}-{r}"
                requests[rid] = RequestSpec(
                    id=rid, mission_id=f"m{m}", resource_id="gs1",
                    required_s=float(rng.integers(100, 1000)),
                    candidate_windows=((0.0, 86400.0),))
        allocations = []
        for i, rid in enumerate(requests):
            for k in range(int(rng.integers(0, 4))):
                dur = float(rng.integers(10, 700))
                allocations.append(alloc(f"al{i}-{k}", "gs1", rid,
                                         0.0, dur))
        report = eval_satnet(requests, allocations)

        # oracle: direct sums with clamping, written independently
        granted = {rid: 0.0 for rid in requests}
        for a in allocations:
            granted[a.counterpart_id] += a.end - a.start
        missions = sorted({r.mission_id for r in requests.values()})
        expect = {}
        for m in missions:
            reqs = [r for r in requests.values() if r.mission_id == m]
            t_req = sum(r.required_s for r in reqs)
            t_ok = sum(min(granted[r.id], r.required_s) for r in reqs)
            expect[m] = (t_req - t_ok) / t_req
        got = report.breakdown["per_mission_unsatisfied"]
        assert set(got) == set(expect), case
        for m in expect:
            assert got[m] == pytest.approx(expect[m], abs=1e-12), (case, m)
        assert report.scalars["u_max"] == pytest.approx(max(expect.values()), abs=1e-12)
        rms = math.sqrt(sum(u * u for u in expect.values()) / len(expect))
        assert report.scalars["u_rms"] == pytest.approx(rms, abs=1e-12), case


def test_satnet_clamps_overfulfillment():
    requests = {"r1": RequestSpec("r1", "m1", "gs1", 100.0, ((0.0, 600.0),))}
    report = eval_satnet(requests, [alloc("a1", "gs1", "r1", 0.0, 250.0)])
    assert report.scalars["u_max"] == 0.0
    assert report.scalars["u_rms"] == 0.0


def test_satnet_worked_example():
    """m1 gets 300 of 400 s (U=0.25), m2 nothing (U=1):
    u_max 1, u_rms sqrt((0.0625+1)/2)."""
    requests = {
        "r1": RequestSpec("r1", "m1", "gs1", 400.0, ((0.0, 600.0),)),
        "r2": RequestSpec("r2", "m2", "gs1", 200.0, ((0.0, 600.0),)),
    }
    report = eval_satnet(requests, [alloc("a1", "gs1", "r1", 0.0, 300.0)])
    assert report.scalars["u_max"] == pytest.approx(1.0)
    assert report.scalars["u_rms"] == pytest.approx(math.sqrt((0.25 ** 2 + 1.0) / 2.0))


def test_satnet_unknown_request():
    with pytest.raises(UnknownRequestError):
        eval_satnet({}, [alloc("a1", "gs1", "ghost", 0.0, 100.0)])


def test_satnet_empty_is_zero():
    report = eval_satnet({}, [])
    assert report.scalars == {"u_max": 0.0, "u_rms": 0.0}


# --- revisit -----------------------------------------------------------------

def monitoring(tid):
    return TargetSpec(id=tid, kind="monitoring", point=GeodeticPoint(0.0, 0.0))


def mapping(tid, quota):
    return TargetSpec(id=tid, kind="mapping", point=GeodeticPoint(0.0, 0.0),
                      quota=quota)


def test_revisit_matches_oracle_on_seeded_instances():
    rng = np.random.default_rng(43)
    horizon = 86400.0
    for case in range(100):
        mon = [monitoring(f"t{i}") for i in range(int(rng.integers(1, 5)))]
        mp = [mapping(f"q{i}", int(rng.integers(1, 5)))
              for i in range(int(rng.integers(0, 4)))]
        actions = []
        for i in range(int(rng.integers(0, 12))):
            tid = str(rng.choice([t.id for t in mon + mp]))
            start = float(rng.uniform(0.0, horizon - 120.0))
            actions.append(obs(f"o{i}", "sat1", tid, start,
                               start + float(rng.uniform(10.0, 120.0))))
        report = eval_revisit(actions, mon, mp, horizon)

        # oracle
        gap_means = []
        for t in mon:
            mids = sorted((a.start + a.end) / 2.0 for a in actions
                          if a.counterpart_id == t.id)
            if len(mids) < 2:
                gap_means.append(horizon)
            else:
                gap_means.append((mids[-1] - mids[0]) / (len(mids) - 1))
        m_gap = sum(gap_means) / len(gap_means)
        assert report.scalars["m_gap_hours"] == pytest.approx(
            m_gap / 3600.0, abs=1e-12), case

        if mp:
            fracs = []
            for t in mp:
                c = sum(1 for a in actions if a.counterpart_id == t.id)
                fracs.append(min(c, t.quota) / t.quota)
            assert report.scalars["m_map"] == pytest.approx(
                sum(fracs) / len(fracs), abs=1e-12), case
        else:
            assert report.scalars["m_map"] == 0.0


def test_revisit_worked_example():
    """Midpoints at 0 h, 4 h, 12 h: gaps 4 h and 8 h, mean 6 h."""
    actions = [obs("o1", "s", "t1", -30.0, 30.0),
               obs("o2", "s", "t1", 4 * 3600.0 - 30.0, 4 * 3600.0 + 30.0),
               obs("o3", "s", "t1", 12 * 3600.0 - 30.0, 12 * 3600.0 + 30.0)]
    report = eval_revisit(actions, [monitoring("t1")], [], 86400.0)
    assert report.scalars["m_gap_hours"] == pytest.approx(6.0)
    gaps = report.breakdown["per_monitoring_target"]["t1"]["gaps_s"]
    assert gaps == pytest.approx([4 * 3600.0, 8 * 3600.0])


def test_revisit_sparse_targets_charge_full_horizon():
    report = eval_revisit([obs("o1", "s", "t1", 0.0, 60.0)],
                          [monitoring("t1"), monitoring("t2")], [], 86400.0)
    assert report.scalars["m_gap_hours"] == pytest.approx(24.0)


def test_mapping_fraction_examples():
    actions = [obs(f"o{i}", "s", "q1", i * 100.0, i * 100.0 + 50.0)
               for i in range(2)]
    actions += [obs(f"p{i}", "s", "q2", i * 100.0, i * 100.0 + 50.0)
                for i in range(5)]
    report = eval_revisit(actions, [], [mapping("q1", 3), mapping("q2", 2)],
                          86400.0)
    assert report.scalars["m_map"] == pytest.approx((2.0 / 3.0 + 1.0) / 2.0)


# --- regional ----------------------------------------------------------------

class TrackCache:
    """Stub cache: the sub-satellite point slides along the equator at
    one degree of longitude per minute starting from lon_0."""

    def __init__(self, lon0=0.0, scan_step=10.0):
        self.scenario = SimpleNamespace(scan_step=scan_step)
        self.lon0 = lon0

    def subsat(self, sat_id, t):
        return GeodeticPoint(0.0, self.lon0 + t / 60.0, 550.0)


def strip_fixture():
    return StripDefinition(
        id="s1", parent_polygon_id="p1",
        axis=(GeodeticPoint(0.0, 0.0), GeodeticPoint(0.0, 2.0)),
        width_km=100.0)


def polygon_target():
    from astsched.coverage_geom import GeoPolygon
    ring = GeoPolygon.from_latlon(
        [(-0.3, 0.0), (-0.3, 2.0), (0.3, 2.0), (0.3, 0.0)])
    return TargetSpec(id="p1", kind="polygon", polygon=ring)


def test_regional_full_sweep_covers_polygon():
    strips = {"s1": strip_fixture()}
    actions = [obs("o1", "sat1", "s1", 0.0, 120.0)]   # lon 0 to 2
    report = eval_regional(actions, [polygon_target()], strips, TrackCache())
    assert report.scalars["m_cov"] == pytest.approx(1.0, abs=0.01)
    assert report.breakdown["footprint_count"] == 1
    assert report.breakdown["per_polygon_recall"]["p1"] == pytest.approx(1.0, abs=0.01)


def test_regional_off_axis_window_yields_nothing():
    strips = {"s1": strip_fixture()}
    actions = [obs("o1", "sat1", "s1", 0.0, 120.0)]
    report = eval_regional(actions, [polygon_target()], strips,
                           TrackCache(lon0=30.0))
    assert report.scalars["m_cov"] == 0.0
    assert report.breakdown["footprint_count"] == 0


def test_observation_footprints_ignore_point_observations():
    strips = {"s1": strip_fixture()}
    actions = [obs("o1", "sat1", "t1", 0.0, 120.0)]
    assert observation_footprints(actions, strips, TrackCache()) == []


# --- stereo ------------------------------------------------------------------

class ViewCache:
    """Stub cache with scripted azimuth/elevation per (satellite, epoch)."""

    def __init__(self, views):
        self.views = views

    def view(self, sat_id, point, t):
        az, el = self.views[(sat_id, t)]
        return SimpleNamespace(azimuth=az, elevation=el)


def stereo_target(tid="st1"):
    return TargetSpec(id=tid, kind="stereo", point=GeodeticPoint(0.0, 0.0),
                      stereo=StereoParams(15.0, 45.0, 600.0, 55.0))


def test_stereo_valid_doublet_counts():
    actions = [obs("o1", "satA", "st1", 0.0, 60.0),
               obs("o2", "satB", "st1", 100.0, 160.0)]
    cache = ViewCache({("satA", 30.0): (100.0, 70.0),
                       ("satB", 130.0): (130.0, 65.0)})
    report = eval_stereo(actions, [stereo_target()], cache)
    assert report.scalars["m_cov"] == 1.0
    detail = report.breakdown["per_stereo_target"]["st1"]
    assert detail["doublet"] == ["o1", "o2"]


def test_stereo_invalid_pairs_do_not_count():
    actions = [obs("o1", "satA", "st1", 0.0, 60.0),
               obs("o2", "satB", "st1", 100.0, 160.0)]
    # same azimuth: separation below the band
    cache = ViewCache({("satA", 30.0): (100.0, 70.0),
                       ("satB", 130.0): (104.0, 65.0)})
    report = eval_stereo(actions, [stereo_target()], cache)
    assert report.scalars["m_cov"] == 0.0
    assert report.breakdown["per_stereo_target"]["st1"]["doublet"] is None


def test_stereo_fraction_over_targets():
    actions = [obs("o1", "satA", "st1", 0.0, 60.0),
               obs("o2", "satB", "st1", 100.0, 160.0)]
    cache = ViewCache({("satA", 30.0): (100.0, 70.0),
                       ("satB", 130.0): (130.0, 65.0)})
    report = eval_stereo(actions, [stereo_target("st1"), stereo_target("st2")],
                         cache)
    assert report.scalars["m_cov"] == 0.5


# --- latency -----------------------------------------------------------------

def test_latency_aggregation(monkeypatch):
    results = {("gs-a", "gs-b"): (0.5, 0.020), ("gs-c", "gs-d"): (0.0, None)}

    def stub(scenario, links, pair, horizon, step, cache):
        return results[pair]

    monkeypatch.setattr(evaluators, "availability_latency", stub)
    scenario = SimpleNamespace(
        station_pairs=[("gs-a", "gs-b"), ("gs-c", "gs-d")], horizon=86400.0)
    report = eval_latency(scenario, [], [mapping("q1", 2)], cache=None)
    assert report.scalars["m_avail"] == pytest.approx(0.25)
    assert report.scalars["m_lat_ms"] == pytest.approx(20.0)
    pairs = report.breakdown["per_station_pair"]
    assert pairs["gs-a-gs-b"]["latency_ms"] == pytest.approx(20.0)
    assert pairs["gs-c-gs-d"]["latency_ms"] is None
    assert report.scalars["m_map"] == 0.0


def test_latency_never_connected_reports_none(monkeypatch):
    monkeypatch.setattr(evaluators, "availability_latency",
                        lambda *a: (0.0, None))
    scenario = SimpleNamespace(station_pairs=[("gs-a", "gs-b")], horizon=86400.0)
    report = eval_latency(scenario, [], [], cache=None)
    assert report.scalars["m_avail"] == 0.0
    assert report.scalars["m_lat_ms"] is None


# --- dispatch and report shape ----------------------------------------------

def test_evaluate_dispatch_by_kind():
    doc = scenario_doc(kind="satnet", n_sats=1, targets=[])
    doc["requests"] = [{"id": "r1", "mission_id": "m1", "resource_id": "gs1",
                        "required_s": 100.0, "candidate_windows": [[0.0, 600.0]]}]
    sc = scenario_from_dict(doc)
    report = evaluate(sc, [alloc("a1", "gs1", "r1", 0.0, 100.0)])
    assert report.benchmark_kind == "satnet"
    assert report.scalars["u_rms"] == 0.0

    rev = scenario_from_dict(scenario_doc(kind="revisit", n_sats=1))
    report = evaluate(rev, [])
    assert report.benchmark_kind == "revisit"
    assert report.scalars["m_gap_hours"] == pytest.approx(12.0)   # horizon


def test_evaluate_unknown_kind():
    sc = Scenario(id="x", benchmark_kind="mystery",
                  epoch_anchor="2025-07-17T12:00:00Z")
    with pytest.raises(ValueError):
        evaluate(sc, [])


def test_report_to_dict_filters_and_orders_scalars():
    report = MetricsReport(benchmark_kind="satnet",
                           scalars={"u_rms": 0.5, "u_max": 1.0, "junk": 3.0},
                           breakdown={"per_mission_unsatisfied": {}})
    doc = report.to_dict()
    assert list(doc["metrics"]) == ["u_max", "u_rms"]
    assert "junk" not in doc["metrics"]
    assert set(doc) == {"benchmark_kind", "metrics", "breakdown"}
    assert set(SCALAR_NAMES) >= set(doc["metrics"])
