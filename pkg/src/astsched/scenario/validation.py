"""The staged-plan validation pipeline.

Stages run in a fixed order (schema, visibility, kinematic, resource,
terminal) and every stage reports all of its findings; nothing stops at
the first problem.  Actions that already failed schema checks are
excluded from the physical stages so one bad id does not cascade.
"""

from __future__ import annotations

from collections import defaultdict

from .. import resource_sim
from ..attitude import maneuver_feasible
from ..errors import OrderingError
from ..netgraph import isl_link_feasible
from .geometry import GeometryCache
from .model import (
    ACTION_KINDS,
    Action,
    Finding,
    Scenario,
    StripDefinition,
    TargetSpec,
    ValidationReport,
)

WINDOW_SLACK_S = 1.0    # access-window boundaries are only refined to 1 s


def _frange(start: float, end: float, step: float):
    t = start
    while t < end:
        yield t
        t += step
    yield end


def validate_plan(scenario: Scenario, actions: list[Action],
                  strips: dict[str, StripDefinition],
                  cache: GeometryCache | None = None) -> ValidationReport:
    cache = cache or GeometryCache(scenario)
    report = ValidationReport()
    ok: list[Action] = []
    seen_ids = set()
    for action in actions:
        findings = _schema_findings(scenario, action, strips, seen_ids)
        seen_ids.add(action.id)
        report.findings.extend(findings)
        if not findings:
            ok.append(action)

    for action in ok:
        report.findings.extend(_visibility_findings(scenario, action, strips, cache))

    report.findings.extend(_kinematic_findings(scenario, ok, strips, cache))
    report.findings.extend(_resource_findings(scenario, ok, cache))
    report.findings.extend(_terminal_findings(scenario, ok))
    return report


# --- stage 1: schema --------------------------------------------------------

def _schema_findings(scenario: Scenario, a: Action,
                     strips: dict[str, StripDefinition], seen_ids) -> list[Finding]:
    def err(msg, **fields):
        return Finding("schema", "error", f"action '{a.id}': {msg}",
                       {"action_id": a.id, **fields})

    out = []
    if a.id in seen_ids:
        out.append(err("duplicate action id"))
    if a.kind not in ACTION_KINDS:
        out.append(err(f"unknown kind {a.kind!r}"))
        return out
    if not a.start < a.end:
        out.append(err(f"window start {a.start} must precede end {a.end}"))
    if a.start < 0.0 or a.end > scenario.horizon:
        out.append(err(f"window [{a.start}, {a.end}] outside horizon "
                       f"[0, {scenario.horizon}]"))

    if a.kind == "allocate":
        req = scenario.requests.get(a.counterpart_id)
        if req is None:
            out.append(err(f"unknown request '{a.counterpart_id}'"))
        elif a.satellite_id != req.resource_id:
            out.append(err(f"allocation resource '{a.satellite_id}' does not match "
                           f"request resource '{req.resource_id}'"))
        return out

    if a.satellite_id not in scenario.satellites:
        out.append(err(f"unknown satellite '{a.satellite_id}'"))
        return out

    if a.kind == "observe":
        target = scenario.targets.get(a.counterpart_id)
        if target is None and a.counterpart_id not in strips:
            out.append(err(f"unknown target or strip '{a.counterpart_id}'"))
        elif target is not None and target.kind == "polygon":
            out.append(err("polygon targets are observed via registered strips"))
    elif a.kind == "downlink":
        if a.counterpart_id not in scenario.stations:
            out.append(err(f"unknown station '{a.counterpart_id}'"))
    elif a.kind == "isl":
        if a.counterpart_id not in scenario.satellites:
            out.append(err(f"unknown partner satellite '{a.counterpart_id}'"))
        elif a.counterpart_id == a.satellite_id:
            out.append(err("ISL partner must differ from the satellite"))
        if a.satellite2_id not in (None, a.counterpart_id):
            out.append(err("satellite2_id must match counterpart_id for ISL"))
    return out


# --- stage 2: visibility ----------------------------------------------------

def _windows_for(scenario: Scenario, a: Action,
                 strips: dict[str, StripDefinition], cache: GeometryCache):
    if a.kind == "observe":
        if a.counterpart_id in strips:
            return cache.windows_strip(a.satellite_id, strips[a.counterpart_id])
        target = scenario.targets[a.counterpart_id]
        return cache.windows_point(a.satellite_id, target.id, target.point,
                                   target.min_elevation)
    if a.kind == "downlink":
        station = scenario.stations[a.counterpart_id]
        return cache.windows_point(a.satellite_id, station.id, station.point,
                                   station.min_elevation)
    return None


def _visibility_findings(scenario: Scenario, a: Action,
                         strips: dict[str, StripDefinition],
                         cache: GeometryCache) -> list[Finding]:
    def err(msg, **fields):
        return Finding("visibility", "error", f"action '{a.id}': {msg}",
                       {"action_id": a.id, "epoch": a.start, **fields})

    if a.kind == "allocate":
        req = scenario.requests[a.counterpart_id]
        for ws, we in req.candidate_windows:
            if a.start >= ws - 1e-9 and a.end <= we + 1e-9:
                return []
        return [err(f"window [{a.start:.0f}, {a.end:.0f}] lies inside no candidate "
                    f"window of request '{req.id}'")]

    if a.kind == "isl":
        samples = list(_frange(a.start, a.end, scenario.scan_step))
        for t in samples:
            r1 = cache.state_at(a.satellite_id, t).position
            r2 = cache.state_at(a.counterpart_id, t).position
            feasible, reason = isl_link_feasible(r1, r2, scenario.isl_max_range_km)
            if not feasible:
                return [err(f"ISL to '{a.counterpart_id}' infeasible at "
                            f"t={t:.0f}s ({reason})", epoch=t)]
        return []

    windows = _windows_for(scenario, a, strips, cache)
    for w in windows:
        if a.start >= w.start - WINDOW_SLACK_S and a.end <= w.end + WINDOW_SLACK_S:
            return []
    return [err(f"window [{a.start:.0f}, {a.end:.0f}] lies inside no access window "
                f"of '{a.counterpart_id}' "
                f"({len(windows)} windows over the horizon)")]


# --- stage 3: kinematic -----------------------------------------------------

def _obs_point(scenario: Scenario, a: Action, strips: dict[str, StripDefinition]):
    if a.counterpart_id in strips:
        axis = strips[a.counterpart_id].axis
        return type(axis[0])(
            (axis[0].latitude + axis[1].latitude) / 2.0,
            (axis[0].longitude + axis[1].longitude) / 2.0)
    target: TargetSpec = scenario.targets[a.counterpart_id]
    return target.point


def _kinematic_findings(scenario: Scenario, actions: list[Action],
                        strips: dict[str, StripDefinition],
                        cache: GeometryCache) -> list[Finding]:
    out = []
    by_sat: dict[str, list[Action]] = defaultdict(list)
    for a in actions:
        if a.kind == "observe":
            by_sat[a.satellite_id].append(a)
    for sat_id, obs in by_sat.items():
        obs.sort(key=lambda a: (a.start, a.end, a.id))
        params = scenario.satellites[sat_id].agility
        for prev, nxt in zip(obs, obs[1:]):
            if nxt.start < prev.end:
                out.append(Finding(
                    "kinematic", "error",
                    f"actions '{prev.id}' and '{nxt.id}' overlap on satellite "
                    f"'{sat_id}' (one boresight cannot track two targets)",
                    {"action_id": nxt.id, "epoch": nxt.start}))
                continue
            q_i = cache.pointing(sat_id, _obs_point(scenario, prev, strips), prev.end)
            q_j = cache.pointing(sat_id, _obs_point(scenario, nxt, strips), nxt.start)
            try:
                check = maneuver_feasible(q_i, q_j, prev.end, nxt.start, params)
            except OrderingError:
                continue
            if not check.feasible:
                out.append(Finding(
                    "kinematic", "error",
                    f"slew from '{prev.id}' to '{nxt.id}' on satellite '{sat_id}' "
                    f"needs {check.required:.1f}s but the gap is {check.gap:.1f}s "
                    f"(deficit {check.deficit:.1f}s)",
                    {"action_id": nxt.id, "epoch": nxt.start,
                     "deficit_s": check.deficit, "required_s": check.required,
                     "gap_s": check.gap}))
    return out


# --- stage 4: resources -----------------------------------------------------

def _sat_sim_actions(scenario: Scenario, actions: list[Action], sat_id: str):
    out = []
    for a in actions:
        if a.kind == "allocate":
            continue
        if a.satellite_id == sat_id:
            out.append((a.kind, a.start, a.end))
        elif a.kind == "isl" and a.counterpart_id == sat_id:
            out.append((a.kind, a.start, a.end))
    return out


def _resource_findings(scenario: Scenario, actions: list[Action],
                       cache: GeometryCache) -> list[Finding]:
    out = []
    involved = sorted({a.satellite_id for a in actions if a.kind != "allocate"}
                      | {a.counterpart_id for a in actions if a.kind == "isl"})
    horizon = (0.0, scenario.horizon)
    for sat_id in involved:
        params = scenario.satellites[sat_id].resources
        sim_actions = _sat_sim_actions(scenario, actions, sat_id)
        energy = resource_sim.simulate_energy(params, sim_actions, horizon,
                                              cache.lighting(sat_id))
        for v in energy.violations:
            out.append(Finding(
                "energy", "error",
                f"satellite '{sat_id}': battery goes {v.magnitude:.2f} Wh below "
                f"zero starting at t={v.epoch:.0f}s",
                {"satellite_id": sat_id, "epoch": v.epoch, "magnitude": v.magnitude}))
        storage = resource_sim.simulate_storage(params, sim_actions, horizon)
        for v in storage.violations:
            what = ("buffer exceeds capacity by "
                    if v.kind == resource_sim.STORAGE_OVERFLOW
                    else "downlink drains an empty buffer, losing ")
            out.append(Finding(
                "storage", "error",
                f"satellite '{sat_id}': {what}{v.magnitude:.2f} Gbit at "
                f"t={v.epoch:.0f}s",
                {"satellite_id": sat_id, "epoch": v.epoch, "kind": v.kind,
                 "magnitude": v.magnitude}))
    return out


# --- stage 5: terminal capacity ---------------------------------------------

def _terminal_findings(scenario: Scenario, actions: list[Action]) -> list[Finding]:
    out = []
    involved = sorted({a.satellite_id for a in actions if a.kind != "allocate"}
                      | {a.counterpart_id for a in actions if a.kind == "isl"})
    for sat_id in involved:
        params = scenario.satellites[sat_id].resources
        sim_actions = _sat_sim_actions(scenario, actions, sat_id)
        for v in resource_sim.check_terminal_capacity(params, sim_actions):
            out.append(Finding(
                "terminal", "error",
                f"satellite '{sat_id}': {int(v.magnitude)} link(s) beyond terminal "
                f"capacity {params.n_term} during [{v.epoch:.0f}, {v.end:.0f}]s",
                {"satellite_id": sat_id, "epoch": v.epoch, "end": v.end}))

    # allocations: one antenna serves one request at a time
    by_resource: dict[str, list[Action]] = defaultdict(list)
    for a in actions:
        if a.kind == "allocate":
            by_resource[a.satellite_id].append(a)
    for resource_id, allocs in by_resource.items():
        allocs.sort(key=lambda a: (a.start, a.end, a.id))
        for prev, nxt in zip(allocs, allocs[1:]):
            if nxt.start < prev.end:
                out.append(Finding(
                    "terminal", "error",
                    f"allocations '{prev.id}' and '{nxt.id}' overlap on resource "
                    f"'{resource_id}'",
                    {"epoch": nxt.start, "resource_id": resource_id}))
    return out
