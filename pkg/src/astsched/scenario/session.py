"""Stateful planning session: mutable action registry with
validation-on-stage, strip registration, commit, and advisory-locked
file-backed persistence.

A session is single-writer.  Cross-process exclusion uses a sibling
``.lock`` file with ``flock``; writes are atomic (temp file + rename),
so a reader never sees a torn state file at the canonical path.
"""

from __future__ import annotations

import fcntl
import json
import os
import tempfile

from ..coverage_geom import GeoPolygon, LocalProjection, intersection_area, polygon_area
from ..errors import (
    CorruptStateError,
    GeometryError,
    LockHeldError,
    SchemaError,
    SessionCommittedError,
    UnknownActionError,
    UnknownEntityError,
    UnknownPolygonError,
    ValidationError,
)
from .geometry import GeometryCache
from .model import (
    Action,
    Scenario,
    StripDefinition,
    ValidationReport,
    action_from_dict,
    action_to_dict,
    strip_from_dict,
    strip_to_dict,
)
from .validation import validate_plan

STATE_SCHEMA_VERSION = 1


class Session:
    def __init__(self, scenario: Scenario, backend: str = "sgp4"):
        self.scenario = scenario
        self.cache = GeometryCache(scenario, backend=backend)
        self.actions: dict[str, Action] = {}
        self.strips: dict[str, StripDefinition] = {}
        self.committed = False
        self._counter = 0
        self._lock_fd: int | None = None
        self._lock_path: str | None = None

    # --- registry mutations -------------------------------------------------

    def _require_open(self) -> None:
        if self.committed:
            raise SessionCommittedError("session is committed and read-only")

    def next_action_id(self) -> str:
        self._counter += 1
        return f"a{self._counter:04d}"

    def _check_entities(self, action: Action) -> None:
        sc = self.scenario
        if action.kind == "allocate":
            if action.counterpart_id not in sc.requests:
                raise UnknownEntityError(f"unknown request '{action.counterpart_id}'")
            return
        if action.satellite_id not in sc.satellites:
            raise UnknownEntityError(f"unknown satellite '{action.satellite_id}'")
        if action.kind == "observe":
            if (action.counterpart_id not in sc.targets
                    and action.counterpart_id not in self.strips):
                raise UnknownEntityError(
                    f"unknown target or strip '{action.counterpart_id}'")
        elif action.kind == "downlink":
            if action.counterpart_id not in sc.stations:
                raise UnknownEntityError(f"unknown station '{action.counterpart_id}'")
        elif action.kind == "isl":
            if action.counterpart_id not in sc.satellites:
                raise UnknownEntityError(
                    f"unknown partner satellite '{action.counterpart_id}'")

    def stage_action(self, action: Action) -> tuple[str, ValidationReport]:
        """Validate the registry plus the candidate; admit the candidate only
        when the combined set is violation-free.  The report always carries
        all findings."""
        self._require_open()
        self._check_entities(action)
        if not action.id:
            action.id = self.next_action_id()
        if action.id in self.actions:
            raise SchemaError(f"action id '{action.id}' already staged")
        candidate = list(self.actions.values()) + [action]
        report = validate_plan(self.scenario, candidate, self.strips, self.cache)
        if report.verdict == "valid":
            action.status = "staged"
            self.actions[action.id] = action
        return action.id, report

    def unstage_action(self, action_id: str) -> ValidationReport:
        self._require_open()
        if action_id not in self.actions:
            raise UnknownActionError(f"no staged action '{action_id}'")
        del self.actions[action_id]
        report = self.validate()
        assert report.verdict == "valid", \
            "removal broke the registry; staged set was not validation-closed"
        return report

    def register_strip(self, strip: StripDefinition) -> str:
        self._require_open()
        target = self.scenario.targets.get(strip.parent_polygon_id)
        if target is None or target.kind != "polygon":
            raise UnknownPolygonError(
                f"no polygon target '{strip.parent_polygon_id}'")
        a, b = strip.axis
        if abs(a.latitude - b.latitude) < 1e-9 and abs(a.longitude - b.longitude) < 1e-9:
            raise GeometryError("strip axis endpoints coincide")
        if strip.width_km <= 0.0:
            raise GeometryError("strip width must be positive")
        if intersection_area(_strip_rectangle(strip), target.polygon) <= 0.0:
            raise GeometryError(
                f"strip rectangle is disjoint from polygon '{target.id}'")
        if not strip.id:
            self._counter += 1
            strip = StripDefinition(f"strip{self._counter:04d}",
                                    strip.parent_polygon_id, strip.axis,
                                    strip.width_km)
        if strip.id in self.strips:
            raise SchemaError(f"strip id '{strip.id}' already registered")
        self.strips[strip.id] = strip
        return strip.id

    def validate(self) -> ValidationReport:
        return validate_plan(self.scenario, list(self.actions.values()),
                             self.strips, self.cache)

    def commit(self) -> list[Action]:
        """Revalidate the whole registry; on success freeze the session."""
        self._require_open()
        report = self.validate()
        if report.errors():
            raise ValidationError(report)
        for action in self.actions.values():
            action.status = "committed"
        self.committed = True
        return list(self.actions.values())

    # --- persistence --------------------------------------------------------

    def state_dict(self) -> dict:
        return {
            "schema_version": STATE_SCHEMA_VERSION,
            "scenario_id": self.scenario.id,
            "committed": self.committed,
            "action_counter": self._counter,
            "actions": [action_to_dict(a) for a in self.actions.values()],
            "strips": [strip_to_dict(s) for s in self.strips.values()],
        }

    def acquire_lock(self, state_path: str) -> None:
        """Hold the session write lock for this session's lifetime."""
        if self._lock_fd is not None:
            return
        self._lock_fd = _take_lock(state_path)
        self._lock_path = state_path

    def release_lock(self) -> None:
        if self._lock_fd is not None:
            fcntl.flock(self._lock_fd, fcntl.LOCK_UN)
            os.close(self._lock_fd)
            self._lock_fd = None
            self._lock_path = None

    def persist(self, state_path: str) -> None:
        """Atomically write the session state; transiently takes the advisory
        lock unless this session already holds it."""
        transient = self._lock_fd is None or self._lock_path != state_path
        fd = _take_lock(state_path) if transient else self._lock_fd
        try:
            _atomic_write_json(state_path, self.state_dict())
        finally:
            if transient:
                fcntl.flock(fd, fcntl.LOCK_UN)
                os.close(fd)

    def restore(self, state_path: str) -> None:
        """Replace registry contents with a persisted state."""
        try:
            with open(state_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise
        except (json.JSONDecodeError, OSError) as exc:
            raise CorruptStateError(f"{state_path}: {exc}") from None
        try:
            if doc["schema_version"] != STATE_SCHEMA_VERSION:
                raise CorruptStateError(
                    f"unsupported state schema_version {doc['schema_version']!r}")
            if doc["scenario_id"] != self.scenario.id:
                raise CorruptStateError(
                    f"state belongs to scenario '{doc['scenario_id']}', "
                    f"session holds '{self.scenario.id}'")
            strips = {d["id"]: strip_from_dict(d) for d in doc["strips"]}
            actions = {d["id"]: action_from_dict(d) for d in doc["actions"]}
            committed = bool(doc["committed"])
            counter = int(doc.get("action_counter", len(actions)))
        except (KeyError, TypeError, SchemaError) as exc:
            raise CorruptStateError(f"{state_path}: {exc}") from None
        self.strips = strips
        self.actions = actions
        self.committed = committed
        self._counter = counter


def _lock_file_for(state_path: str) -> str:
    return str(state_path) + ".lock"


def _take_lock(state_path: str) -> int:
    lock_path = _lock_file_for(state_path)
    fd = os.open(lock_path, os.O_RDWR | os.O_CREAT, 0o644)
    try:
        fcntl.flock(fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
    except BlockingIOError:
        holder = ""
        try:
            with open(lock_path, "r", encoding="utf-8") as fh:
                holder = fh.read().strip()
        except OSError:
            pass
        os.close(fd)
        suffix = f" (held by {holder})" if holder else ""
        raise LockHeldError(
            f"write lock on {state_path} is held by another process{suffix}"
        ) from None
    os.ftruncate(fd, 0)
    os.write(fd, f"pid {os.getpid()}".encode())
    return fd


def _atomic_write_json(path: str, doc: dict) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".state-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _strip_rectangle(strip: StripDefinition) -> GeoPolygon:
    """The strip's ground rectangle: axis buffered laterally by width/2."""
    from shapely.geometry import LineString

    a, b = strip.axis
    origin = type(a)((a.latitude + b.latitude) / 2.0,
                     (a.longitude + b.longitude) / 2.0)
    proj = LocalProjection(origin)
    seg = LineString([proj.forward(a), proj.forward(b)])
    quad = seg.buffer(strip.width_km / 2.0, cap_style=2, join_style=2)
    ring = [proj.inverse(x, y) for x, y in quad.exterior.coords[:-1]]
    return GeoPolygon(tuple(ring))
