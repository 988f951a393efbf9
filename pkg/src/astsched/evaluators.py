"""Benchmark scoring: five evaluators, one per benchmark kind.

Each evaluator emits a MetricsReport whose scalar values are exactly
reproducible from the per-entity breakdown.  All functions are pure
given a plan; they never mutate scenario or session state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .coverage_geom import GeoPolygon, area_recall, stereo_pair_valid, swath_footprint
from .errors import NoCoverageError, UnknownRequestError
from .netgraph import availability_latency
from .scenario.geometry import GeometryCache
from .scenario.model import (
    Action,
    RequestSpec,
    Scenario,
    StripDefinition,
    TargetSpec,
)

DEFAULT_SAMPLE_STEP_S = 60.0

SCALAR_NAMES = ("u_max", "u_rms", "m_gap_hours", "m_map", "m_cov",
                "m_avail", "m_lat_ms")


@dataclass
class MetricsReport:
    benchmark_kind: str
    scalars: dict = field(default_factory=dict)
    breakdown: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        scalars = {k: self.scalars[k] for k in SCALAR_NAMES if k in self.scalars}
        return {
            "benchmark_kind": self.benchmark_kind,
            "metrics": scalars,
            "breakdown": self.breakdown,
        }


# --- benchmark 1: ground-station allocation ----------------------------------

def eval_satnet(requests: dict[str, RequestSpec],
                allocations: list[Action]) -> MetricsReport:
    """Unsatisfied-ratio metrics.  Allocated time clamps at each request's
    required duration, so overfulfillment never pushes U_m below zero."""
    granted: dict[str, float] = {rid: 0.0 for rid in requests}
    for a in allocations:
        if a.counterpart_id not in requests:
            raise UnknownRequestError(f"allocation '{a.id}' references unknown "
                                      f"request '{a.counterpart_id}'")
        granted[a.counterpart_id] += a.end - a.start

    by_mission: dict[str, list[RequestSpec]] = {}
    for r in requests.values():
        by_mission.setdefault(r.mission_id, []).append(r)

    per_mission: dict[str, float] = {}
    for mission_id, reqs in sorted(by_mission.items()):
        t_req = sum(r.required_s for r in reqs)
        t_alloc = sum(min(granted[r.id], r.required_s) for r in reqs)
        per_mission[mission_id] = (t_req - t_alloc) / t_req

    if per_mission:
        values = list(per_mission.values())
        u_max = max(values)
        u_rms = math.sqrt(sum(u * u for u in values) / len(values))
    else:
        u_max = u_rms = 0.0
    return MetricsReport(
        benchmark_kind="satnet",
        scalars={"u_max": u_max, "u_rms": u_rms},
        breakdown={"per_mission_unsatisfied": per_mission},
    )


# --- benchmark 2: revisit ----------------------------------------------------

def _observations_by_target(actions: list[Action]) -> dict[str, list[Action]]:
    out: dict[str, list[Action]] = {}
    for a in actions:
        if a.kind == "observe":
            out.setdefault(a.counterpart_id, []).append(a)
    return out


def _midpoints(obs: list[Action]) -> list[float]:
    return sorted((a.start + a.end) / 2.0 for a in obs)


def _mapping_fraction(targets: list[TargetSpec],
                      by_target: dict[str, list[Action]]) -> tuple[float, dict]:
    """Mean per-target quota fulfillment, min(observations, quota)/quota."""
    per_target = {}
    for t in targets:
        count = len(by_target.get(t.id, []))
        per_target[t.id] = {"observations": count, "quota": t.quota,
                            "fraction": min(count, t.quota) / t.quota}
    m_map = (sum(v["fraction"] for v in per_target.values()) / len(per_target)
             if per_target else 0.0)
    return m_map, per_target


def eval_revisit(actions: list[Action], monitoring_targets: list[TargetSpec],
                 mapping_targets: list[TargetSpec],
                 horizon: float) -> MetricsReport:
    """Mean revisit gap over monitoring targets (observation midpoints) and
    mean quota fulfillment over mapping targets.  A target seen fewer than
    twice contributes the full horizon as its mean gap."""
    by_target = _observations_by_target(actions)

    per_target_gaps: dict[str, dict] = {}
    means = []
    for t in monitoring_targets:
        mids = _midpoints(by_target.get(t.id, []))
        gaps = [b - a for a, b in zip(mids, mids[1:])]
        mean_gap = (sum(gaps) / len(gaps)) if gaps else horizon
        per_target_gaps[t.id] = {"midpoints_s": mids, "gaps_s": gaps,
                                 "mean_gap_s": mean_gap}
        means.append(mean_gap)
    m_gap_s = (sum(means) / len(means)) if means else horizon

    m_map, per_mapping = _mapping_fraction(mapping_targets, by_target)
    return MetricsReport(
        benchmark_kind="revisit",
        scalars={"m_gap_hours": m_gap_s / 3600.0, "m_map": m_map},
        breakdown={"per_monitoring_target": per_target_gaps,
                   "per_mapping_target": per_mapping},
    )


# --- benchmark 3: regional mapping -------------------------------------------

def observation_footprints(actions: list[Action],
                           strips: dict[str, StripDefinition],
                           cache: GeometryCache) -> list[GeoPolygon]:
    """Swath footprints of committed strip observations.  Windows too short
    to overlap the axis along-track yield no footprint."""
    footprints = []
    step = cache.scenario.scan_step
    for a in actions:
        if a.kind != "observe" or a.counterpart_id not in strips:
            continue
        strip = strips[a.counterpart_id]
        n = max(2, int(math.ceil((a.end - a.start) / step)) + 1)
        times = [a.start + (a.end - a.start) * i / (n - 1) for i in range(n)]
        track = [cache.subsat(a.satellite_id, t) for t in times]
        try:
            footprints.append(swath_footprint(track, strip.axis, strip.width_km))
        except NoCoverageError:
            continue
    return footprints


def eval_regional(actions: list[Action], polygon_targets: list[TargetSpec],
                  strips: dict[str, StripDefinition],
                  cache: GeometryCache) -> MetricsReport:
    footprints = observation_footprints(actions, strips, cache)
    polys = [t.polygon for t in polygon_targets]
    m_cov = area_recall(footprints, polys)
    per_polygon = {
        t.id: area_recall(footprints, [t.polygon]) for t in polygon_targets
    }
    return MetricsReport(
        benchmark_kind="regional",
        scalars={"m_cov": m_cov},
        breakdown={"per_polygon_recall": per_polygon,
                   "footprint_count": len(footprints)},
    )


# --- benchmark 4: stereo -----------------------------------------------------

def eval_stereo(actions: list[Action], stereo_targets: list[TargetSpec],
                cache: GeometryCache) -> MetricsReport:
    """A stereo target counts as covered when at least one unordered pair of
    its committed observations forms a valid doublet."""
    by_target = _observations_by_target(actions)
    per_target: dict[str, dict] = {}
    covered = 0
    for t in stereo_targets:
        obs = by_target.get(t.id, [])
        views = []
        for a in obs:
            mid = (a.start + a.end) / 2.0
            views.append((mid, cache.view(a.satellite_id, t.point, mid)))
        found = None
        for i in range(len(views)):
            for j in range(i + 1, len(views)):
                if stereo_pair_valid(views[i], views[j], t.stereo).valid:
                    found = (obs[i].id, obs[j].id)
                    break
            if found:
                break
        per_target[t.id] = {"observations": len(obs),
                            "doublet_found": found is not None,
                            "doublet": list(found) if found else None}
        if found:
            covered += 1
    m_cov = covered / len(stereo_targets) if stereo_targets else 0.0
    return MetricsReport(
        benchmark_kind="stereo",
        scalars={"m_cov": m_cov},
        breakdown={"per_stereo_target": per_target},
    )


# --- benchmark 5: relay latency ----------------------------------------------

def eval_latency(scenario: Scenario, actions: list[Action],
                 mapping_targets: list[TargetSpec], cache: GeometryCache,
                 step: float = DEFAULT_SAMPLE_STEP_S) -> MetricsReport:
    """Availability and mean latency over station pairs, plus mapping quota
    fulfillment.  Latency is absent (None) when no pair ever connects."""
    links = [a for a in actions if a.kind in ("downlink", "isl")]
    per_pair: dict[str, dict] = {}
    avails = []
    latencies = []
    for pair in scenario.station_pairs:
        avail, lat = availability_latency(scenario, links, pair,
                                          (0.0, scenario.horizon), step, cache)
        key = f"{pair[0]}-{pair[1]}"
        per_pair[key] = {"availability": avail,
                         "latency_ms": None if lat is None else lat * 1000.0}
        avails.append(avail)
        if lat is not None:
            latencies.append(lat)
    m_avail = (sum(avails) / len(avails)) if avails else 0.0
    m_lat_ms = (sum(latencies) / len(latencies) * 1000.0) if latencies else None

    by_target = _observations_by_target(actions)
    m_map, per_mapping = _mapping_fraction(mapping_targets, by_target)
    return MetricsReport(
        benchmark_kind="latency",
        scalars={"m_map": m_map, "m_avail": m_avail, "m_lat_ms": m_lat_ms},
        breakdown={"per_station_pair": per_pair,
                   "per_mapping_target": per_mapping},
    )


# --- dispatch ----------------------------------------------------------------

def evaluate(scenario: Scenario, actions: list[Action],
             strips: dict[str, StripDefinition] | None = None,
             cache: GeometryCache | None = None,
             step: float = DEFAULT_SAMPLE_STEP_S) -> MetricsReport:
    """Score a plan with the evaluator matching the scenario's benchmark."""
    strips = strips or {}
    cache = cache or GeometryCache(scenario)
    kind = scenario.benchmark_kind
    targets = list(scenario.targets.values())
    monitoring = [t for t in targets if t.kind == "monitoring"]
    mapping = [t for t in targets if t.kind == "mapping"]
    if kind == "satnet":
        allocs = [a for a in actions if a.kind == "allocate"]
        return eval_satnet(scenario.requests, allocs)
    if kind == "revisit":
        return eval_revisit(actions, monitoring, mapping, scenario.horizon)
    if kind == "regional":
        polygons = [t for t in targets if t.kind == "polygon"]
        return eval_regional(actions, polygons, strips, cache)
    if kind == "stereo":
        stereo = [t for t in targets if t.kind == "stereo"]
        return eval_stereo(actions, stereo, cache)
    if kind == "latency":
        return eval_latency(scenario, actions, mapping, cache, step)
    raise ValueError(f"unknown benchmark kind {kind!r}")
