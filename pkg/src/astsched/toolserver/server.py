"""JSON-RPC 2.0 tool server over newline-delimited stdio.

One server owns one session and holds the advisory write lock for its
lifetime.  Requests are handled strictly serially; every mutation is
persisted to the state file before its response is written, so a crash
between requests never loses an acknowledged change.
"""

from __future__ import annotations

import json
import math
import os
import sys

import jsonschema

from .. import resource_sim
from ..errors import AstschedError, ValidationError
from ..evaluators import evaluate
from ..scenario import Action, Session, StripDefinition, load_scenario
from ..scenario.model import GeodeticPoint, action_to_dict, strip_to_dict
from .catalog import MAX_TRACK_POINTS, PAGE_SIZE, TOOLS, tool_descriptors

PARSE_ERROR = -32700
METHOD_NOT_FOUND = -32601
INVALID_PARAMS = -32602

STATE_DIR_ENV = "AST_SCHED_STATE_DIR"


def default_state_path(scenario_path: str, scenario_id: str) -> str:
    directory = os.environ.get(STATE_DIR_ENV) or \
        os.path.dirname(os.path.abspath(scenario_path))
    return os.path.join(directory, f"{scenario_id}.state.json")


class ToolServer:
    def __init__(self, scenario_path: str, state_path: str | None = None):
        self.scenario = load_scenario(scenario_path)
        self.state_path = state_path or default_state_path(scenario_path,
                                                           self.scenario.id)
        self.session = Session(self.scenario)
        self.session.acquire_lock(self.state_path)
        if os.path.exists(self.state_path):
            self.session.restore(self.state_path)

    def close(self) -> None:
        self.session.release_lock()

    # --- request handling ---------------------------------------------------

    def handle_line(self, line: str) -> str:
        try:
            request = json.loads(line)
        except json.JSONDecodeError as exc:
            return self._error(None, PARSE_ERROR, f"parse error: {exc}")
        rid = request.get("id") if isinstance(request, dict) else None
        if not isinstance(request, dict) or "method" not in request:
            return self._error(rid, PARSE_ERROR, "not a JSON-RPC request object")
        method = request["method"]
        params = request.get("params") or {}

        if method == "tools/list":
            return self._result(rid, {"tools": tool_descriptors()})
        if method != "tools/call":
            return self._error(rid, METHOD_NOT_FOUND,
                               f"unknown method {method!r}")

        name = params.get("name")
        if name not in TOOLS:
            return self._error(rid, METHOD_NOT_FOUND, f"unknown tool {name!r}")
        arguments = params.get("arguments") or {}
        try:
            jsonschema.validate(arguments, TOOLS[name]["input_schema"])
        except jsonschema.ValidationError as exc:
            return self._error(rid, INVALID_PARAMS,
                               f"invalid params for {name}: {exc.message}")
        try:
            result = getattr(self, f"_tool_{name}")(arguments)
        except ValidationError as exc:
            result = {"success": False,
                      "error": {"type": "ValidationError",
                                "message": str(exc),
                                "report": exc.report.to_dict()}}
        except AstschedError as exc:
            result = {"success": False,
                      "error": {"type": type(exc).__name__,
                                "message": str(exc)}}
        return self._result(rid, result)

    def serve_forever(self, stdin=None, stdout=None) -> None:
        stdin = stdin or sys.stdin
        stdout = stdout or sys.stdout
        for line in stdin:
            if not line.strip():
                continue
            stdout.write(self.handle_line(line) + "\n")
            stdout.flush()

    @staticmethod
    def _result(rid, result) -> str:
        return json.dumps({"jsonrpc": "2.0", "id": rid, "result": result},
                          sort_keys=True)

    @staticmethod
    def _error(rid, code: int, message: str) -> str:
        return json.dumps({"jsonrpc": "2.0", "id": rid,
                           "error": {"code": code, "message": message}},
                          sort_keys=True)

    # --- read tools ----------------------------------------------------------

    @staticmethod
    def _page(items: list, cursor: int) -> dict:
        window = items[cursor:cursor + PAGE_SIZE]
        nxt = cursor + PAGE_SIZE if cursor + PAGE_SIZE < len(items) else None
        return {"items": window, "next_cursor": nxt, "total": len(items)}

    def _tool_list_satellites(self, args: dict) -> dict:
        items = []
        for s in self.scenario.satellites.values():
            items.append({
                "id": s.id,
                "inclination_deg": s.tle.inclination,
                "mean_motion_rev_day": s.tle.mean_motion,
                "max_off_nadir_deg": s.max_off_nadir_deg,
                "battery_wh": s.resources.e_max,
                "storage_gbit": s.resources.d_max,
                "terminal_capacity": s.resources.n_term,
            })
        return self._page(items, args.get("cursor", 0))

    def _tool_list_stations(self, args: dict) -> dict:
        items = [
            {"id": g.id, "lat_deg": g.point.latitude,
             "lon_deg": g.point.longitude, "min_elevation_deg": g.min_elevation}
            for g in self.scenario.stations.values()
        ]
        return self._page(items, args.get("cursor", 0))

    def _tool_list_targets(self, args: dict) -> dict:
        items = []
        for t in self.scenario.targets.values():
            entry: dict = {"id": t.id, "kind": t.kind}
            if t.point is not None:
                entry["lat_deg"] = t.point.latitude
                entry["lon_deg"] = t.point.longitude
                entry["min_elevation_deg"] = t.min_elevation
            if t.polygon is not None:
                entry["ring"] = [[p.latitude, p.longitude]
                                 for p in t.polygon.ring]
            if t.quota is not None:
                entry["quota"] = t.quota
            if t.stereo is not None:
                entry["stereo"] = {
                    "az_min_deg": t.stereo.az_min, "az_max_deg": t.stereo.az_max,
                    "t_max_s": t.stereo.t_max, "el_min_deg": t.stereo.el_min,
                }
            items.append(entry)
        return self._page(items, args.get("cursor", 0))

    def _tool_get_access_windows(self, args: dict) -> dict:
        sat_id = args["satellite_id"]
        cp = args["counterpart_id"]
        sc = self.scenario
        if sat_id not in sc.satellites:
            return {"success": False,
                    "error": {"type": "UnknownEntityError",
                              "message": f"unknown satellite '{sat_id}'"}}
        cache = self.session.cache
        if cp in sc.targets and sc.targets[cp].point is not None:
            t = sc.targets[cp]
            windows = cache.windows_point(sat_id, cp, t.point, t.min_elevation)
        elif cp in sc.stations:
            g = sc.stations[cp]
            windows = cache.windows_point(sat_id, cp, g.point, g.min_elevation)
        elif cp in self.session.strips:
            windows = cache.windows_strip(sat_id, self.session.strips[cp])
        else:
            return {"success": False,
                    "error": {"type": "UnknownEntityError",
                              "message": f"unknown counterpart '{cp}' (point "
                                         "target, station, or strip)"}}
        return {"windows": [
            {"start_s": w.start, "end_s": w.end,
             "peak_elevation_deg": w.peak_elevation}
            for w in windows
        ]}

    def _tool_get_ground_track(self, args: dict) -> dict:
        sat_id = args["satellite_id"]
        if sat_id not in self.scenario.satellites:
            return {"success": False,
                    "error": {"type": "UnknownEntityError",
                              "message": f"unknown satellite '{sat_id}'"}}
        start, end, step = args["start_s"], args["end_s"], args["step_s"]
        if end <= start:
            return {"success": False,
                    "error": {"type": "SchemaError",
                              "message": "end_s must exceed start_s"}}
        n = int(math.floor((end - start) / step)) + 1
        if n > MAX_TRACK_POINTS:
            return {"success": False,
                    "error": {"type": "SchemaError",
                              "message": f"{n} samples exceed the "
                                         f"{MAX_TRACK_POINTS}-point cap; "
                                         "raise step_s or shrink the span"}}
        points = []
        for i in range(n):
            t = start + i * step
            p = self.session.cache.subsat(sat_id, t)
            points.append({"t_s": t, "lat_deg": p.latitude,
                           "lon_deg": p.longitude})
        return {"points": points}

    def _tool_get_state_summary(self, args: dict) -> dict:
        session = self.session
        sc = self.scenario
        resources = {}
        involved = sorted({a.satellite_id for a in session.actions.values()
                           if a.kind != "allocate"})
        for sat_id in involved:
            params = sc.satellites[sat_id].resources
            acts = [(a.kind, a.start, a.end) for a in session.actions.values()
                    if a.kind != "allocate" and
                    (a.satellite_id == sat_id or
                     (a.kind == "isl" and a.counterpart_id == sat_id))]
            timeline = resource_sim.simulate(
                params, acts, (0.0, sc.horizon),
                session.cache.lighting(sat_id))
            stride = max(1, len(timeline.breakpoints) // 50)
            resources[sat_id] = {
                "energy_wh": [
                    [timeline.breakpoints[i], round(timeline.energy[i], 3)]
                    for i in range(0, len(timeline.breakpoints), stride)],
                "storage_gbit": [
                    [timeline.breakpoints[i], round(timeline.storage[i], 3)]
                    for i in range(0, len(timeline.breakpoints), stride)],
                "violations": len(timeline.violations),
            }
        return {
            "scenario_id": sc.id,
            "benchmark_kind": sc.benchmark_kind,
            "committed": session.committed,
            "actions": [action_to_dict(a) for a in session.actions.values()],
            "strips": [strip_to_dict(s) for s in session.strips.values()],
            "resources": resources,
        }

    # --- mutating tools -------------------------------------------------------

    def _persist(self) -> None:
        self.session.persist(self.state_path)

    def _tool_register_strip(self, args: dict) -> dict:
        axis = (GeodeticPoint(args["axis"][0][0], args["axis"][0][1]),
                GeodeticPoint(args["axis"][1][0], args["axis"][1][1]))
        strip = StripDefinition(args.get("id", ""), args["parent_polygon_id"],
                                axis, args["width_km"])
        strip_id = self.session.register_strip(strip)
        self._persist()
        return {"success": True, "strip_id": strip_id}

    def _tool_stage_action(self, args: dict) -> dict:
        action = Action(args.get("id", ""), args["kind"], args["satellite_id"],
                        args["counterpart_id"], args["start_s"], args["end_s"])
        action_id, report = self.session.stage_action(action)
        staged = report.verdict == "valid"
        if staged:
            self._persist()
        return {"success": staged, "action_id": action_id if staged else None,
                "report": report.to_dict()}

    def _tool_unstage_action(self, args: dict) -> dict:
        report = self.session.unstage_action(args["action_id"])
        self._persist()
        return {"success": True, "report": report.to_dict()}

    def _tool_validate_plan(self, args: dict) -> dict:
        return self.session.validate().to_dict()

    def _tool_commit_plan(self, args: dict) -> dict:
        actions = self.session.commit()
        self._persist()
        return {"success": True,
                "actions": [action_to_dict(a) for a in actions]}

    def _tool_evaluate(self, args: dict) -> dict:
        if not self.session.committed and not args.get("dry_run", False):
            return {"success": False,
                    "error": {"type": "SessionCommittedError",
                              "message": "official scores require a committed "
                                         "plan; pass dry_run to score the "
                                         "staged set"}}
        report = evaluate(self.scenario, list(self.session.actions.values()),
                          self.session.strips, self.session.cache)
        return report.to_dict()


def serve(scenario_path: str, state_path: str | None = None) -> None:
    server = ToolServer(scenario_path, state_path)
    try:
        server.serve_forever()
    finally:
        server.close()
