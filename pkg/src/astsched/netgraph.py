"""Time-varying contact graphs and relay latency.

An edge exists at an epoch only when a staged link action covers the
epoch AND the geometry permits it: ground links need elevation above the
station mask, inter-satellite links need line-of-sight clearing the
atmosphere (spherical Earth, 80 km grazing floor) within a maximum
range.  Staged links are intent; physics is the gate.  Chains carry no
store-and-forward: the whole path must be simultaneously active.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .astrodynamics.frames import geodetic_to_ecef, ecef_to_eci, topocentric_view
from .errors import UnknownNodeError

SPEED_OF_LIGHT_KM_S = 299792.458
EARTH_LOS_RADIUS_KM = 6371.0
GRAZING_FLOOR_KM = 80.0

UNREACHABLE = math.inf


@dataclass
class ContactGraph:
    epoch: float
    nodes: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)     # node -> list[(node, delay_s)]

    def add_edge(self, u: str, v: str, delay: float) -> None:
        self.nodes.add(u)
        self.nodes.add(v)
        self.edges.setdefault(u, []).append((v, delay))
        self.edges.setdefault(v, []).append((u, delay))


def grazing_altitude_km(r1: np.ndarray, r2: np.ndarray) -> float:
    """Closest approach of the segment r1-r2 to the Earth surface (spherical).
    Positive when the whole segment stays above the surface."""
    d = r2 - r1
    dd = float(np.dot(d, d))
    if dd < 1e-12:
        return float(np.linalg.norm(r1)) - EARTH_LOS_RADIUS_KM
    t = -float(np.dot(r1, d)) / dd
    t = min(1.0, max(0.0, t))
    closest = r1 + t * d
    return float(np.linalg.norm(closest)) - EARTH_LOS_RADIUS_KM


def isl_link_feasible(r1: np.ndarray, r2: np.ndarray,
                      max_range_km: float) -> tuple[bool, str]:
    rng = float(np.linalg.norm(r2 - r1))
    if rng > max_range_km:
        return False, f"range {rng:.0f} km exceeds {max_range_km:.0f} km"
    if grazing_altitude_km(r1, r2) < GRAZING_FLOOR_KM:
        return False, "line of sight occluded by the atmosphere"
    return True, ""


def build_contact_graph(epoch: float, scenario, staged_links, cache) -> ContactGraph:
    """Feasible communication edges at one epoch, given staged link actions.

    A satellite whose simultaneously-active links exceed its terminal
    capacity contributes no edges (both ISL endpoints are charged).
    """
    graph = ContactGraph(epoch=epoch)
    graph.nodes.update(scenario.stations)

    active = [a for a in staged_links
              if a.kind in ("downlink", "isl") and a.start <= epoch < a.end]

    load: dict[str, int] = {}
    for a in active:
        load[a.satellite_id] = load.get(a.satellite_id, 0) + 1
        if a.kind == "isl":
            load[a.counterpart_id] = load.get(a.counterpart_id, 0) + 1
    saturated = {sat for sat, n in load.items()
                 if n > scenario.satellites[sat].resources.n_term}

    jd = cache.jd(epoch)
    for a in active:
        if a.satellite_id in saturated:
            continue
        r1 = cache.state_at(a.satellite_id, epoch).position
        if a.kind == "downlink":
            station = scenario.stations[a.counterpart_id]
            view = topocentric_view(station.point, r1, jd)
            if view.elevation < station.min_elevation:
                continue
            graph.add_edge(a.satellite_id, station.id,
                           view.range_km / SPEED_OF_LIGHT_KM_S)
        else:
            if a.counterpart_id in saturated:
                continue
            r2 = cache.state_at(a.counterpart_id, epoch).position
            feasible, _ = isl_link_feasible(r1, r2, scenario.isl_max_range_km)
            if not feasible:
                continue
            rng = float(np.linalg.norm(r2 - r1))
            graph.add_edge(a.satellite_id, a.counterpart_id,
                           rng / SPEED_OF_LIGHT_KM_S)
    return graph


def shortest_path_delay(graph: ContactGraph, a: str, b: str) -> float:
    """Minimal total propagation delay between two nodes (Dijkstra).
    Returns UNREACHABLE (math.inf) when no path exists."""
    for node in (a, b):
        if node not in graph.nodes:
            raise UnknownNodeError(f"node '{node}' not in the contact graph")
    if a == b:
        return 0.0
    dist = {a: 0.0}
    heap = [(0.0, a)]
    done = set()
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        if u == b:
            return d
        done.add(u)
        for v, w in graph.edges.get(u, []):
            nd = d + w
            if nd < dist.get(v, UNREACHABLE):
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return UNREACHABLE


def availability_latency(scenario, staged_links, station_pair: tuple[str, str],
                         horizon: tuple[float, float], step: float,
                         cache) -> tuple[float, float | None]:
    """Fraction of sampled epochs with a relay path, and the mean shortest
    delay over those epochs (None when availability is zero)."""
    if step <= 0.0:
        raise ValueError("step must be positive")
    a, b = station_pair
    start, end = horizon
    epochs = np.arange(start, end, step)
    if len(epochs) == 0:
        epochs = np.array([start])
    delays = []
    hits = 0
    for t in epochs:
        graph = build_contact_graph(float(t), scenario, staged_links, cache)
        d = shortest_path_delay(graph, a, b)
        if d < UNREACHABLE:
            hits += 1
            delays.append(d)
    availability = hits / len(epochs)
    latency = (sum(delays) / len(delays)) if delays else None
    return availability, latency
