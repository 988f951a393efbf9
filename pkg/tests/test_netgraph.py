"""Contact graphs and relay latency: exhaustive path-enumeration oracle,
speed-of-light arithmetic, and the geometric edge gates."""

import math
from types import SimpleNamespace

import numpy as np
import pytest

import astsched.netgraph as netgraph
from astsched.netgraph import (
    EARTH_LOS_RADIUS_KM,
    SPEED_OF_LIGHT_KM_S,
    UNREACHABLE,
    ContactGraph,
    availability_latency,
    build_contact_graph,
    grazing_altitude_km,
    isl_link_feasible,
    shortest_path_delay,
)
from astsched.astrodynamics.frames import GeodeticPoint, ecef_to_eci, geodetic_to_ecef
from astsched.errors import UnknownNodeError


def all_simple_path_delays(graph, a, b):
    """Oracle: enumerate every simple path and take the cheapest."""
    best = [UNREACHABLE]

    def walk(node, seen, cost):
        if node == b:
            best[0] = min(best[0], cost)
            return
        for nxt, w in graph.edges.get(node, []):
            if nxt not in seen:
                walk(nxt, seen | {nxt}, cost + w)

    walk(a, {a}, 0.0)
    return best[0]


def test_shortest_path_matches_exhaustive_enumeration():
    """200 random graphs: Dijkstra equals brute-force enumeration exactly,
    and the delay is symmetric on these undirected graphs."""
    rng = np.random.default_rng(31)
    for case in range(200):
        n = int(rng.integers(2, 10))
        names = [f"n{i}" for i in range(n)]
        graph = ContactGraph(epoch=0.0)
        graph.nodes.update(names)
        for i in range(n):
            for j in range(i + 1, n):
                if rng.random() < 0.3:
                    graph.add_edge(names[i], names[j],
                                   float(rng.uniform(0.001, 0.1)))
        a, b = names[0], names[-1]
        got = shortest_path_delay(graph, a, b)
        want = all_simple_path_delays(graph, a, b)
        assert got == want, (case, got, want)
        back = shortest_path_delay(graph, b, a)
        if got == UNREACHABLE:
            assert back == UNREACHABLE, case
        else:
            # summation order differs by direction, so allow float roundoff
            assert back == pytest.approx(got, rel=1e-12), case


def test_relay_chain_delay():
    """1000 + 2000 + 1000 km of path length is 13.34 ms at light speed."""
    g = ContactGraph(epoch=0.0)
    g.add_edge("gs-a", "sat-1", 1000.0 / SPEED_OF_LIGHT_KM_S)
    g.add_edge("sat-1", "sat-2", 2000.0 / SPEED_OF_LIGHT_KM_S)
    g.add_edge("sat-2", "gs-b", 1000.0 / SPEED_OF_LIGHT_KM_S)
    delay_ms = shortest_path_delay(g, "gs-a", "gs-b") * 1000.0
    assert delay_ms == pytest.approx(13.34, abs=0.01)


def test_shortest_path_edge_cases():
    g = ContactGraph(epoch=0.0)
    g.add_edge("a", "b", 0.01)
    g.nodes.add("island")
    assert shortest_path_delay(g, "a", "a") == 0.0
    assert shortest_path_delay(g, "a", "island") == UNREACHABLE
    with pytest.raises(UnknownNodeError):
        shortest_path_delay(g, "a", "nope")


def test_shortest_path_prefers_cheaper_multihop():
    g = ContactGraph(epoch=0.0)
    g.add_edge("a", "b", 0.10)
    g.add_edge("a", "m", 0.02)
    g.add_edge("m", "b", 0.03)
    assert shortest_path_delay(g, "a", "b") == pytest.approx(0.05)


def test_grazing_altitude():
    # closest approach on the perpendicular bisector
    r1 = np.array([1000.0, 7000.0, 0.0])
    r2 = np.array([-1000.0, 7000.0, 0.0])
    assert grazing_altitude_km(r1, r2) == pytest.approx(7000.0 - EARTH_LOS_RADIUS_KM)
    # closest approach clamped to an endpoint
    r3 = np.array([3000.0, 7000.0, 0.0])
    r4 = np.array([5000.0, 7000.0, 0.0])
    assert grazing_altitude_km(r3, r4) == pytest.approx(
        math.hypot(3000.0, 7000.0) - EARTH_LOS_RADIUS_KM)


def test_isl_feasibility_gates():
    high = np.array([0.0, 7000.0, 0.0])
    ok, _ = isl_link_feasible(high, np.array([2000.0, 7000.0, 0.0]), 5000.0)
    assert ok
    too_far, reason = isl_link_feasible(high, np.array([6000.0, 7000.0, 0.0]), 5000.0)
    assert not too_far and "range" in reason
    occluded, reason = isl_link_feasible(high, -high, 50000.0)
    assert not occluded and "occluded" in reason


JD = 2460873.5


class FakeCache:
    """Minimal stand-in: fixed positions per satellite, fixed jd."""

    def __init__(self, positions):
        self.positions = positions

    def jd(self, epoch):
        return JD

    def state_at(self, sat, epoch):
        return SimpleNamespace(position=np.asarray(self.positions[sat], float))


def fake_scenario(stations, n_term=2, isl_max_range_km=50000.0):
    sats = {s: SimpleNamespace(resources=SimpleNamespace(n_term=n_term))
            for s in ("sat-1", "sat-2", "sat-3")}
    return SimpleNamespace(stations=stations, satellites=sats,
                           isl_max_range_km=isl_max_range_km)


def station(sid, lat, lon, min_elevation=5.0):
    return SimpleNamespace(id=sid, point=GeodeticPoint(lat, lon, 0.0),
                           min_elevation=min_elevation)


def link(kind, sat, other, start=0.0, end=100.0):
    return SimpleNamespace(kind=kind, satellite_id=sat, counterpart_id=other,
                           start=start, end=end)


def overhead_position(lat, lon, alt_km):
    return ecef_to_eci(geodetic_to_ecef(GeodeticPoint(lat, lon, alt_km)), JD)


def test_contact_graph_downlink_elevation_gate():
    gs = station("gs-a", 0.0, 0.0)
    scen = fake_scenario({"gs-a": gs})
    cache = FakeCache({"sat-1": overhead_position(0.0, 0.0, 600.0),
                       "sat-2": overhead_position(0.0, 180.0, 600.0)})
    links = [link("downlink", "sat-1", "gs-a"),
             link("downlink", "sat-2", "gs-a")]
    g = build_contact_graph(10.0, scen, links, cache)
    # overhead satellite connects at ~600 km of one-way delay
    assert ("gs-a", pytest.approx(600.0 / SPEED_OF_LIGHT_KM_S, rel=1e-3)) \
        in [(v, d) for v, d in g.edges["sat-1"]]
    # the far-side satellite is below the mask and contributes nothing
    assert "sat-2" not in g.edges


def test_contact_graph_respects_action_time_bounds():
    gs = station("gs-a", 0.0, 0.0)
    scen = fake_scenario({"gs-a": gs})
    cache = FakeCache({"sat-1": overhead_position(0.0, 0.0, 600.0)})
    links = [link("downlink", "sat-1", "gs-a", start=50.0, end=60.0)]
    assert "sat-1" not in build_contact_graph(10.0, scen, links, cache).edges
    assert "sat-1" in build_contact_graph(55.0, scen, links, cache).edges


def test_contact_graph_isl_edge_and_occlusion():
    scen = fake_scenario({})
    near = FakeCache({"sat-1": [0.0, 7000.0, 0.0], "sat-2": [2000.0, 7000.0, 0.0]})
    g = build_contact_graph(0.0, scen, [link("isl", "sat-1", "sat-2")], near)
    assert g.edges["sat-1"][0] == ("sat-2", pytest.approx(2000.0 / SPEED_OF_LIGHT_KM_S))
    far = FakeCache({"sat-1": [0.0, 7000.0, 0.0], "sat-2": [0.0, -7000.0, 0.0]})
    g2 = build_contact_graph(0.0, scen, [link("isl", "sat-1", "sat-2")], far)
    assert g2.edges == {}


def test_contact_graph_terminal_saturation_drops_all_edges():
    gs = station("gs-a", 0.0, 0.0)
    scen = fake_scenario({"gs-a": gs}, n_term=1)
    cache = FakeCache({"sat-1": overhead_position(0.0, 0.0, 600.0),
                       "sat-2": [0.0, 7000.0, 500.0]})
    links = [link("downlink", "sat-1", "gs-a"),
             link("isl", "sat-1", "sat-2")]
    g = build_contact_graph(0.0, scen, links, cache)
    # two simultaneous links exceed n_term=1, so sat-1 goes silent entirely
    assert "sat-1" not in g.edges
    assert "gs-a" in g.nodes


def test_availability_latency_aggregation(monkeypatch):
    """Stub the per-epoch graph: 3 of 10 samples connect at 20 ms."""
    connected = ContactGraph(epoch=0.0)
    connected.add_edge("gs-a", "gs-b", 0.020)
    empty = ContactGraph(epoch=0.0)
    empty.nodes.update({"gs-a", "gs-b"})

    def stub(epoch, scenario, staged_links, cache):
        return connected if epoch in (0.0, 10.0, 20.0) else empty

    monkeypatch.setattr(netgraph, "build_contact_graph", stub)
    avail, latency = availability_latency(None, [], ("gs-a", "gs-b"),
                                          (0.0, 100.0), 10.0, None)
    assert avail == pytest.approx(0.3)
    assert latency == pytest.approx(0.020)


def test_availability_latency_zero_availability(monkeypatch):
    empty = ContactGraph(epoch=0.0)
    empty.nodes.update({"gs-a", "gs-b"})
    monkeypatch.setattr(netgraph, "build_contact_graph",
                        lambda *args: empty)
    avail, latency = availability_latency(None, [], ("gs-a", "gs-b"),
                                          (0.0, 100.0), 10.0, None)
    assert avail == 0.0
    assert latency is None


def test_availability_latency_step_validation():
    with pytest.raises(ValueError):
        availability_latency(None, [], ("a", "b"), (0.0, 100.0), 0.0, None)
