"""The tool catalog: names, descriptions, and JSON schemas for every tool
the server exposes.  Input schemas are enforced on every call; output
schemas document the response shape and are checked in tests."""

from __future__ import annotations

PAGE_SIZE = 100
MAX_TRACK_POINTS = 500

_CURSOR = {
    "type": "object",
    "properties": {"cursor": {"type": "integer", "minimum": 0}},
    "additionalProperties": False,
}

_PAGE_OUT = {
    "type": "object",
    "properties": {
        "items": {"type": "array"},
        "next_cursor": {"type": ["integer", "null"]},
        "total": {"type": "integer"},
    },
    "required": ["items", "next_cursor", "total"],
}

_REPORT_OUT = {
    "type": "object",
    "properties": {
        "verdict": {"type": "string", "enum": ["valid", "invalid"]},
        "findings": {"type": "array"},
    },
    "required": ["verdict", "findings"],
}

_MUTATION_OUT = {
    "type": "object",
    "properties": {
        "success": {"type": "boolean"},
        "report": _REPORT_OUT,
        "error": {"type": "object"},
    },
    "required": ["success"],
}

TOOLS: dict[str, dict] = {
    "list_satellites": {
        "description": "Satellite inventory: ids, orbit elements summary, "
                       "resource and agility parameters. Paginated.",
        "input_schema": _CURSOR,
        "output_schema": _PAGE_OUT,
    },
    "list_stations": {
        "description": "Ground station inventory: ids, coordinates, "
                       "elevation masks. Paginated.",
        "input_schema": _CURSOR,
        "output_schema": _PAGE_OUT,
    },
    "list_targets": {
        "description": "Target inventory: point targets with kind-specific "
                       "parameters, polygon targets with rings. Paginated.",
        "input_schema": _CURSOR,
        "output_schema": _PAGE_OUT,
    },
    "get_access_windows": {
        "description": "Access windows between a satellite and a target, "
                       "station, or registered strip over the horizon.",
        "input_schema": {
            "type": "object",
            "properties": {
                "satellite_id": {"type": "string"},
                "counterpart_id": {"type": "string"},
            },
            "required": ["satellite_id", "counterpart_id"],
            "additionalProperties": False,
        },
        "output_schema": {
            "type": "object",
            "properties": {"windows": {"type": "array"}},
            "required": ["windows"],
        },
    },
    "get_ground_track": {
        "description": "Sub-satellite ground track points over a time span "
                       f"(at most {MAX_TRACK_POINTS} samples per call).",
        "input_schema": {
            "type": "object",
            "properties": {
                "satellite_id": {"type": "string"},
                "start_s": {"type": "number", "minimum": 0},
                "end_s": {"type": "number", "minimum": 0},
                "step_s": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["satellite_id", "start_s", "end_s", "step_s"],
            "additionalProperties": False,
        },
        "output_schema": {
            "type": "object",
            "properties": {"points": {"type": "array"}},
            "required": ["points"],
        },
    },
    "get_state_summary": {
        "description": "Session state: staged actions, registered strips, "
                       "commit status, and per-satellite energy/storage "
                       "timelines under the staged plan.",
        "input_schema": {"type": "object", "additionalProperties": False},
        "output_schema": {
            "type": "object",
            "properties": {
                "scenario_id": {"type": "string"},
                "committed": {"type": "boolean"},
                "actions": {"type": "array"},
                "strips": {"type": "array"},
                "resources": {"type": "object"},
            },
            "required": ["scenario_id", "committed", "actions", "strips"],
        },
    },
    "register_strip": {
        "description": "Register an observation strip over a polygon target: "
                       "a ground axis plus a swath width.",
        "input_schema": {
            "type": "object",
            "properties": {
                "parent_polygon_id": {"type": "string"},
                "axis": {
                    "type": "array", "minItems": 2, "maxItems": 2,
                    "items": {
                        "type": "array", "minItems": 2, "maxItems": 2,
                        "items": {"type": "number"},
                    },
                },
                "width_km": {"type": "number", "exclusiveMinimum": 0},
                "id": {"type": "string"},
            },
            "required": ["parent_polygon_id", "axis", "width_km"],
            "additionalProperties": False,
        },
        "output_schema": _MUTATION_OUT,
    },
    "stage_action": {
        "description": "Stage an action (observe, downlink, isl, allocate). "
                       "The whole staged set is validated; the action is "
                       "admitted only if no violations result.",
        "input_schema": {
            "type": "object",
            "properties": {
                "kind": {"type": "string",
                         "enum": ["observe", "downlink", "isl", "allocate"]},
                "satellite_id": {"type": "string"},
                "counterpart_id": {"type": "string"},
                "start_s": {"type": "number"},
                "end_s": {"type": "number"},
                "id": {"type": "string"},
            },
            "required": ["kind", "satellite_id", "counterpart_id",
                         "start_s", "end_s"],
            "additionalProperties": False,
        },
        "output_schema": _MUTATION_OUT,
    },
    "unstage_action": {
        "description": "Remove a staged action by id.",
        "input_schema": {
            "type": "object",
            "properties": {"action_id": {"type": "string"}},
            "required": ["action_id"],
            "additionalProperties": False,
        },
        "output_schema": _MUTATION_OUT,
    },
    "validate_plan": {
        "description": "Run the full validation pipeline over the staged set "
                       "and report every finding.",
        "input_schema": {"type": "object", "additionalProperties": False},
        "output_schema": _REPORT_OUT,
    },
    "commit_plan": {
        "description": "Freeze the session: revalidate everything and mark "
                       "all staged actions committed.",
        "input_schema": {"type": "object", "additionalProperties": False},
        "output_schema": _MUTATION_OUT,
    },
    "evaluate": {
        "description": "Score the plan with the scenario's benchmark "
                       "evaluator. Official scores require a committed plan; "
                       "pass dry_run to score the staged set.",
        "input_schema": {
            "type": "object",
            "properties": {"dry_run": {"type": "boolean"}},
            "additionalProperties": False,
        },
        "output_schema": {
            "type": "object",
            "properties": {
                "benchmark_kind": {"type": "string"},
                "metrics": {"type": "object"},
                "breakdown": {"type": "object"},
            },
            "required": ["benchmark_kind", "metrics", "breakdown"],
        },
    },
}


def tool_descriptors() -> list[dict]:
    return [
        {"name": name, "description": spec["description"],
         "input_schema": spec["input_schema"],
         "output_schema": spec["output_schema"]}
        for name, spec in TOOLS.items()
    ]
