"""Scenario documents: immutable inventory plus horizon and constraint
parameters, with schema-validated JSON (canonical) / YAML (input-only)
serialization.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import yaml

from ..astrodynamics.frames import GeodeticPoint
from ..astrodynamics.tle import TwoLineElement, parse_tle
from ..attitude import AgilityParams
from ..coverage_geom import GeoPolygon, StereoParams
from ..errors import ParseError, SchemaError
from ..resource_sim import ResourceParams
from ..timebase import jd_from_utc

SCHEMA_VERSION = 1

BENCHMARK_KINDS = ("satnet", "revisit", "regional", "stereo", "latency")
ACTION_KINDS = ("observe", "downlink", "isl", "allocate")
TARGET_KINDS = ("monitoring", "mapping", "polygon", "stereo")

DEFAULT_HORIZON_S = 345600.0          # 4 days
DEFAULT_ELEVATION_MASK_DEG = 5.0
DEFAULT_SCAN_STEP_S = 10.0


@dataclass(frozen=True)
class GroundSite:
    id: str
    point: GeodeticPoint
    min_elevation: float = DEFAULT_ELEVATION_MASK_DEG


@dataclass(frozen=True)
class SatelliteSpec:
    id: str
    tle: TwoLineElement
    resources: ResourceParams
    agility: AgilityParams
    max_off_nadir_deg: float = 30.0


@dataclass(frozen=True)
class TargetSpec:
    id: str
    kind: str                                  # monitoring | mapping | polygon | stereo
    point: GeodeticPoint | None = None
    polygon: GeoPolygon | None = None
    quota: int | None = None                   # mapping
    stereo: StereoParams | None = None         # stereo
    min_elevation: float = 10.0                # observation mask for point targets


@dataclass(frozen=True)
class RequestSpec:
    id: str
    mission_id: str
    resource_id: str
    required_s: float
    candidate_windows: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class StripDefinition:
    id: str
    parent_polygon_id: str
    axis: tuple[GeodeticPoint, GeodeticPoint]
    width_km: float


@dataclass
class Action:
    id: str
    kind: str                                  # observe | downlink | isl | allocate
    satellite_id: str                          # resource id for allocate
    counterpart_id: str                        # target/strip/station/request id
    start: float
    end: float
    satellite2_id: str | None = None           # second participant for isl
    status: str = "staged"

    def window(self) -> tuple[float, float]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Finding:
    constraint: str            # visibility | kinematic | energy | storage | terminal | schema
    severity: str              # error | warning
    message: str
    fields: dict = field(default_factory=dict)


@dataclass
class ValidationReport:
    findings: list[Finding] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "invalid" if self.errors() else "valid"

    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "findings": [
                {"constraint": f.constraint, "severity": f.severity,
                 "message": f.message, **({"fields": f.fields} if f.fields else {})}
                for f in self.findings
            ],
        }


@dataclass
class Scenario:
    id: str
    benchmark_kind: str
    epoch_anchor: str
    horizon: float = DEFAULT_HORIZON_S
    satellites: dict[str, SatelliteSpec] = field(default_factory=dict)
    stations: dict[str, GroundSite] = field(default_factory=dict)
    targets: dict[str, TargetSpec] = field(default_factory=dict)
    requests: dict[str, RequestSpec] = field(default_factory=dict)
    station_pairs: list[tuple[str, str]] = field(default_factory=list)
    isl_max_range_km: float = 5000.0
    scan_step: float = DEFAULT_SCAN_STEP_S

    def __post_init__(self):
        self.anchor_jd = jd_from_utc(self.epoch_anchor)

    def entity_categories(self, entity_id: str) -> str | None:
        for name, table in (("satellite", self.satellites), ("station", self.stations),
                            ("target", self.targets), ("request", self.requests)):
            if entity_id in table:
                return name
        return None


# --- serialization ----------------------------------------------------------

def _point_to_dict(p: GeodeticPoint) -> dict:
    d = {"lat_deg": p.latitude, "lon_deg": p.longitude}
    if p.altitude:
        d["alt_km"] = p.altitude
    return d


def _point_from_dict(d: dict, where: str) -> GeodeticPoint:
    try:
        return GeodeticPoint(float(d["lat_deg"]), float(d["lon_deg"]),
                             float(d.get("alt_km", 0.0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{where}: bad geodetic point: {exc}") from None


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "id": sc.id,
        "benchmark_kind": sc.benchmark_kind,
        "epoch_anchor": sc.epoch_anchor,
        "horizon_s": sc.horizon,
        "isl_max_range_km": sc.isl_max_range_km,
        "scan_step_s": sc.scan_step,
        "satellites": [
            {
                "id": s.id,
                "tle": list(s.tle.raw_lines),
                "max_off_nadir_deg": s.max_off_nadir_deg,
                "agility": {
                    "omega_max_deg_s": math.degrees(s.agility.omega_max),
                    "alpha_max_deg_s2": math.degrees(s.agility.alpha_max),
                    "t_settle_s": s.agility.t_settle,
                },
                "resources": {
                    "e0_wh": s.resources.e0, "e_max_wh": s.resources.e_max,
                    "p_solar_w": s.resources.p_solar, "p_idle_w": s.resources.p_idle,
                    "p_action_w": dict(s.resources.p_action),
                    "d0_gbit": s.resources.d0, "d_max_gbit": s.resources.d_max,
                    "obs_rate_gbit_s": s.resources.obs_rate,
                    "downlink_rate_gbit_s": s.resources.downlink_rate,
                    "n_term": s.resources.n_term,
                },
            }
            for s in sc.satellites.values()
        ],
        "stations": [
            {"id": g.id, **_point_to_dict(g.point), "min_elevation_deg": g.min_elevation}
            for g in sc.stations.values()
        ],
        "targets": [_target_to_dict(t) for t in sc.targets.values()],
        "requests": [
            {
                "id": r.id, "mission_id": r.mission_id, "resource_id": r.resource_id,
                "required_s": r.required_s,
                "candidate_windows": [list(w) for w in r.candidate_windows],
            }
            for r in sc.requests.values()
        ],
        "station_pairs": [list(p) for p in sc.station_pairs],
    }


def _target_to_dict(t: TargetSpec) -> dict:
    d: dict[str, Any] = {"id": t.id, "kind": t.kind}
    if t.point is not None:
        d.update(_point_to_dict(t.point))
        d["min_elevation_deg"] = t.min_elevation
    if t.polygon is not None:
        d["ring"] = [[p.latitude, p.longitude] for p in t.polygon.ring]
    if t.quota is not None:
        d["quota"] = t.quota
    if t.stereo is not None:
        d["stereo"] = {
            "az_min_deg": t.stereo.az_min, "az_max_deg": t.stereo.az_max,
            "t_max_s": t.stereo.t_max, "el_min_deg": t.stereo.el_min,
        }
    return d


def _require(d: dict, key: str, where: str):
    if key not in d:
        raise SchemaError(f"{where}: missing field '{key}'")
    return d[key]


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise SchemaError("scenario document must be a mapping")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {version!r}")
    kind = _require(doc, "benchmark_kind", "scenario")
    if kind not in BENCHMARK_KINDS:
        raise SchemaError(f"scenario: unknown benchmark_kind {kind!r}")
    sc = Scenario(
        id=str(_require(doc, "id", "scenario")),
        benchmark_kind=kind,
        epoch_anchor=str(_require(doc, "epoch_anchor", "scenario")),
        horizon=float(doc.get("horizon_s", DEFAULT_HORIZON_S)),
        isl_max_range_km=float(doc.get("isl_max_range_km", 5000.0)),
        scan_step=float(doc.get("scan_step_s", DEFAULT_SCAN_STEP_S)),
    )
    if sc.horizon <= 0:
        raise SchemaError("scenario: horizon_s must be positive")

    for s in doc.get("satellites", []):
        sid = str(_require(s, "id", "satellite"))
        if sid in sc.satellites:
            raise SchemaError(f"satellite '{sid}': duplicate id")
        tle_lines = _require(s, "tle", f"satellite '{sid}'")
        try:
            tle = parse_tle(tle_lines[0], tle_lines[1])
        except Exception as exc:
            raise SchemaError(f"satellite '{sid}': bad TLE: {exc}") from None
        ag = s.get("agility", {})
        res = s.get("resources", {})
        try:
            agility = AgilityParams(
                omega_max=math.radians(float(ag.get("omega_max_deg_s", 1.0))),
                alpha_max=math.radians(float(ag.get("alpha_max_deg_s2", 0.5))),
                t_settle=float(ag.get("t_settle_s", 5.0)),
            )
            resources = ResourceParams(
                e0=float(res.get("e0_wh", 500.0)),
                e_max=float(res.get("e_max_wh", 1000.0)),
                p_solar=float(res.get("p_solar_w", 300.0)),
                p_idle=float(res.get("p_idle_w", 50.0)),
                p_action=dict(res.get("p_action_w", {"observe": 120.0, "downlink": 80.0, "isl": 60.0})),
                d0=float(res.get("d0_gbit", 0.0)),
                d_max=float(res.get("d_max_gbit", 128.0)),
                obs_rate=float(res.get("obs_rate_gbit_s", 0.45)),
                downlink_rate=float(res.get("downlink_rate_gbit_s", 1.2)),
                n_term=int(res.get("n_term", 1)),
            )
        except ValueError as exc:
            raise SchemaError(f"satellite '{sid}': {exc}") from None
        sc.satellites[sid] = SatelliteSpec(
            id=sid, tle=tle, resources=resources, agility=agility,
            max_off_nadir_deg=float(s.get("max_off_nadir_deg", 30.0)),
        )

    for g in doc.get("stations", []):
        gid = str(_require(g, "id", "station"))
        if gid in sc.stations:
            raise SchemaError(f"station '{gid}': duplicate id")
        sc.stations[gid] = GroundSite(
            id=gid, point=_point_from_dict(g, f"station '{gid}'"),
            min_elevation=float(g.get("min_elevation_deg", DEFAULT_ELEVATION_MASK_DEG)),
        )

    for t in doc.get("targets", []):
        tid = str(_require(t, "id", "target"))
        if tid in sc.targets:
            raise SchemaError(f"target '{tid}': duplicate id")
        tkind = _require(t, "kind", f"target '{tid}'")
        if tkind not in TARGET_KINDS:
            raise SchemaError(f"target '{tid}': unknown kind {tkind!r}")
        point = polygon = stereo = None
        quota = None
        if tkind == "polygon":
            ring = _require(t, "ring", f"target '{tid}'")
            try:
                polygon = GeoPolygon.from_latlon(ring)
            except Exception as exc:
                raise SchemaError(f"target '{tid}': bad ring: {exc}") from None
        else:
            point = _point_from_dict(t, f"target '{tid}'")
        if tkind == "mapping":
            quota = int(_require(t, "quota", f"target '{tid}'"))
            if quota < 1:
                raise SchemaError(f"target '{tid}': quota must be >= 1")
        if tkind == "stereo":
            sp = _require(t, "stereo", f"target '{tid}'")
            try:
                stereo = StereoParams(
                    az_min=float(_require(sp, "az_min_deg", f"target '{tid}' stereo")),
                    az_max=float(_require(sp, "az_max_deg", f"target '{tid}' stereo")),
                    t_max=float(_require(sp, "t_max_s", f"target '{tid}' stereo")),
                    el_min=float(_require(sp, "el_min_deg", f"target '{tid}' stereo")),
                )
            except ValueError as exc:
                raise SchemaError(f"target '{tid}': {exc}") from None
        sc.targets[tid] = TargetSpec(
            id=tid, kind=tkind, point=point, polygon=polygon, quota=quota,
            stereo=stereo, min_elevation=float(t.get("min_elevation_deg", 10.0)),
        )

    for r in doc.get("requests", []):
        rid = str(_require(r, "id", "request"))
        if rid in sc.requests:
            raise SchemaError(f"request '{rid}': duplicate id")
        windows = []
        for w in _require(r, "candidate_windows", f"request '{rid}'"):
            if len(w) != 2 or not w[0] < w[1]:
                raise SchemaError(f"request '{rid}': bad candidate window {w!r}")
            windows.append((float(w[0]), float(w[1])))
        required = float(_require(r, "required_s", f"request '{rid}'"))
        if required <= 0:
            raise SchemaError(f"request '{rid}': required_s must be positive")
        sc.requests[rid] = RequestSpec(
            id=rid, mission_id=str(_require(r, "mission_id", f"request '{rid}'")),
            resource_id=str(_require(r, "resource_id", f"request '{rid}'")),
            required_s=required, candidate_windows=tuple(windows),
        )

    for pair in doc.get("station_pairs", []):
        if len(pair) != 2:
            raise SchemaError(f"station pair {pair!r} must have two entries")
        a, b = str(pair[0]), str(pair[1])
        for node in (a, b):
            if node not in sc.stations:
                raise SchemaError(f"station pair names unknown station '{node}'")
        sc.station_pairs.append((a, b))

    return sc


def load_scenario(path) -> Scenario:
    """Load and fully validate a scenario document (JSON or YAML)."""
    text = open(path, "r", encoding="utf-8").read()
    name = str(path)
    try:
        if name.endswith((".yaml", ".yml")):
            doc = yaml.safe_load(text)
        else:
            doc = json.loads(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ParseError(f"{name}: {exc}") from None
    return scenario_from_dict(doc)


def save_scenario(sc: Scenario, path) -> None:
    """Write the canonical JSON form."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(sc), fh, indent=2, sort_keys=True)
        fh.write("\n")


# --- action (de)serialization ----------------------------------------------

def action_to_dict(a: Action) -> dict:
    d = {
        "id": a.id, "kind": a.kind, "satellite_id": a.satellite_id,
        "counterpart_id": a.counterpart_id, "start_s": a.start, "end_s": a.end,
        "status": a.status,
    }
    if a.satellite2_id is not None:
        d["satellite2_id"] = a.satellite2_id
    return d


def action_from_dict(d: dict) -> Action:
    try:
        return Action(
            id=str(d["id"]), kind=str(d["kind"]),
            satellite_id=str(d["satellite_id"]),
            counterpart_id=str(d["counterpart_id"]),
            start=float(d["start_s"]), end=float(d["end_s"]),
            satellite2_id=(str(d["satellite2_id"]) if d.get("satellite2_id") else None),
            status=str(d.get("status", "staged")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad action record: {exc}") from None


def plan_to_dict(scenario_id: str, actions: list[Action],
                 strips: dict[str, StripDefinition]) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "scenario_id": scenario_id,
        "actions": [action_to_dict(a) for a in actions],
        "strips": [strip_to_dict(s) for s in strips.values()],
    }


def plan_from_dict(doc: dict) -> tuple[str, list[Action], dict[str, StripDefinition]]:
    if not isinstance(doc, dict):
        raise SchemaError("plan document must be a mapping")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc.get('schema_version')!r}")
    actions = [action_from_dict(d) for d in doc.get("actions", [])]
    strips = {}
    for d in doc.get("strips", []):
        strip = strip_from_dict(d)
        strips[strip.id] = strip
    return str(doc.get("scenario_id", "")), actions, strips


def load_plan(path) -> tuple[str, list[Action], dict[str, StripDefinition]]:
    try:
        doc = json.load(open(path, "r", encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return plan_from_dict(doc)


def save_plan(path, scenario_id: str, actions: list[Action],
              strips: dict[str, StripDefinition]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_dict(scenario_id, actions, strips), fh,
                  indent=2, sort_keys=True)
        fh.write("\n")


def strip_to_dict(s: StripDefinition) -> dict:
    return {
        "id": s.id, "parent_polygon_id": s.parent_polygon_id,
        "axis": [_point_to_dict(s.axis[0]), _point_to_dict(s.axis[1])],
        "width_km": s.width_km,
    }


def strip_from_dict(d: dict) -> StripDefinition:
    try:
        return StripDefinition(
            id=str(d["id"]), parent_polygon_id=str(d["parent_polygon_id"]),
            axis=(_point_from_dict(d["axis"][0], "strip axis"),
                  _point_from_dict(d["axis"][1], "strip axis")),
            width_km=float(d["width_km"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"bad strip record: {exc}") from None
