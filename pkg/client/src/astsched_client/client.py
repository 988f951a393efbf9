"""Synchronous client for the astsched tool server.

connect() spawns ``astsched serve`` as a subprocess, fetches the tool
catalog over newline-delimited JSON-RPC, and refuses to proceed if it
differs from the pinned copy shipped with this package.  The returned
SessionHandle exposes one typed method per tool; arguments are checked
against the tool's input schema before anything touches the wire, and
every request/response line pair is recorded in a transcript.

The client is deliberately thin: it holds no planning state of its own,
sends one request at a time, and never retries.  All session state lives
in the server's state file.
"""

from __future__ import annotations

import json
import subprocess
from importlib import resources

import jsonschema


class SpawnError(RuntimeError):
    """The server process could not be started or died during handshake."""

    def __init__(self, message: str, stderr: str = ""):
        super().__init__(message)
        self.stderr = stderr


class CatalogMismatchError(RuntimeError):
    """The server's tool catalog differs from the pinned copy."""


class TransportError(RuntimeError):
    """The wire to the server broke mid-session."""

    def __init__(self, message: str, stderr: str = ""):
        super().__init__(message)
        self.stderr = stderr


class ToolError(RuntimeError):
    """The server returned a domain error object for a tool call."""

    def __init__(self, error_type: str, message: str, report: dict | None = None):
        super().__init__(f"{error_type}: {message}")
        self.error_type = error_type
        self.message = message
        self.report = report


def pinned_catalog() -> list[dict]:
    """The tool descriptors this client was built against."""
    text = resources.files(__package__).joinpath("tools.json").read_text()
    return json.loads(text)


def connect(scenario_path: str, state_path: str | None = None,
            server_cmd: list[str] | None = None) -> "SessionHandle":
    """Spawn a tool server for the scenario and hand back a live handle.

    server_cmd overrides the command line used to start the server; the
    default expects the astsched entry point on PATH.  Raises SpawnError
    if the process dies before answering, CatalogMismatchError if its
    tools/list response does not match the pinned catalog byte for byte.
    """
    if server_cmd is None:
        server_cmd = ["astsched", "serve", scenario_path]
        if state_path is not None:
            server_cmd += ["--state", state_path]
    try:
        process = subprocess.Popen(
            server_cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
            stderr=subprocess.PIPE, text=True)
    except OSError as exc:
        raise SpawnError(f"could not start {server_cmd[0]!r}: {exc}") from exc
    handle = SessionHandle(process)
    try:
        response = handle._roundtrip({"jsonrpc": "2.0", "id": handle._next_id(),
                                      "method": "tools/list"})
    except TransportError as exc:
        stderr = handle._drain()
        raise SpawnError("server exited during handshake", stderr) from exc
    catalog = response["result"]["tools"]
    if catalog != pinned_catalog():
        handle.close()
        raise CatalogMismatchError(
            "server tool catalog does not match the pinned client copy; "
            "refusing to continue against unknown semantics")
    handle.scenario_id = handle.get_state_summary()["scenario_id"]
    return handle


class SessionHandle:
    """One spawned server, one caller, one outstanding request at a time."""

    def __init__(self, process: subprocess.Popen):
        self._process = process
        self._request_id = 0
        self._schemas = {t["name"]: t["input_schema"] for t in pinned_catalog()}
        self.scenario_id: str | None = None
        #: list of (request_line, response_line) pairs, newline-stripped
        self.transcript: list[tuple[str, str]] = []

    # --- lifecycle -----------------------------------------------------------

    def close(self) -> None:
        if self._process.stdin and not self._process.stdin.closed:
            self._process.stdin.close()
        try:
            self._process.wait(timeout=10)
        except subprocess.TimeoutExpired:
            self._process.kill()
            self._process.wait()

    def __enter__(self) -> "SessionHandle":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    # --- wire ----------------------------------------------------------------

    def _next_id(self) -> int:
        self._request_id += 1
        return self._request_id

    def _drain(self) -> str:
        try:
            return self._process.communicate(timeout=5)[1] or ""
        except subprocess.TimeoutExpired:
            self._process.kill()
            return self._process.communicate()[1] or ""

    def _roundtrip(self, request: dict) -> dict:
        line = json.dumps(request, sort_keys=True)
        try:
            self._process.stdin.write(line + "\n")
            self._process.stdin.flush()
        except (BrokenPipeError, ValueError) as exc:
            raise TransportError("server pipe closed while sending",
                                 self._drain()) from exc
        reply = self._process.stdout.readline()
        if not reply:
            raise TransportError("server closed the stream without replying",
                                 self._drain())
        self.transcript.append((line, reply.rstrip("\n")))
        return json.loads(reply)

    def _call(self, tool: str, arguments: dict) -> dict:
        arguments = {k: v for k, v in arguments.items() if v is not None}
        # Client-side gate: a schema-invalid call never reaches the wire.
        jsonschema.validate(arguments, self._schemas[tool])
        response = self._roundtrip({
            "jsonrpc": "2.0", "id": self._next_id(), "method": "tools/call",
            "params": {"name": tool, "arguments": arguments},
        })
        if "error" in response:
            err = response["error"]
            raise ToolError(f"rpc_{err['code']}", err["message"])
        result = response["result"]
        if isinstance(result, dict) and "error" in result:
            err = result["error"]
            raise ToolError(err["type"], err["message"], err.get("report"))
        return result

    # --- one typed method per tool -------------------------------------------

    def list_satellites(self, cursor: int | None = None) -> dict:
        return self._call("list_satellites", {"cursor": cursor})

    def list_stations(self, cursor: int | None = None) -> dict:
        return self._call("list_stations", {"cursor": cursor})

    def list_targets(self, cursor: int | None = None) -> dict:
        return self._call("list_targets", {"cursor": cursor})

    def get_access_windows(self, satellite_id: str,
                           counterpart_id: str) -> dict:
        return self._call("get_access_windows",
                          {"satellite_id": satellite_id,
                           "counterpart_id": counterpart_id})

    def get_ground_track(self, satellite_id: str, start_s: float,
                         end_s: float, step_s: float) -> dict:
        return self._call("get_ground_track",
                          {"satellite_id": satellite_id, "start_s": start_s,
                           "end_s": end_s, "step_s": step_s})

    def get_state_summary(self) -> dict:
        return self._call("get_state_summary", {})

    def register_strip(self, parent_polygon_id: str,
                       axis: list[list[float]], width_km: float,
                       id: str | None = None) -> dict:
        return self._call("register_strip",
                          {"parent_polygon_id": parent_polygon_id,
                           "axis": axis, "width_km": width_km, "id": id})

    def stage_action(self, kind: str, satellite_id: str, counterpart_id: str,
                     start_s: float, end_s: float,
                     id: str | None = None) -> dict:
        return self._call("stage_action",
                          {"kind": kind, "satellite_id": satellite_id,
                           "counterpart_id": counterpart_id,
                           "start_s": start_s, "end_s": end_s, "id": id})

    def unstage_action(self, action_id: str) -> dict:
        return self._call("unstage_action", {"action_id": action_id})

    def validate_plan(self) -> dict:
        return self._call("validate_plan", {})

    def commit_plan(self) -> dict:
        return self._call("commit_plan", {})

    def evaluate(self, dry_run: bool | None = None) -> dict:
        return self._call("evaluate", {"dry_run": dry_run})
