"""Scenario model, geometry caching, plan validation, and sessions."""

from .geometry import GeometryCache
from .model import (
    ACTION_KINDS,
    BENCHMARK_KINDS,
    SCHEMA_VERSION,
    TARGET_KINDS,
    Action,
    Finding,
    GroundSite,
    RequestSpec,
    SatelliteSpec,
    Scenario,
    StripDefinition,
    TargetSpec,
    ValidationReport,
    action_from_dict,
    action_to_dict,
    load_plan,
    load_scenario,
    plan_from_dict,
    plan_to_dict,
    save_plan,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    strip_from_dict,
    strip_to_dict,
)
from .session import Session
from .validation import validate_plan

__all__ = [
    "ACTION_KINDS", "BENCHMARK_KINDS", "SCHEMA_VERSION", "TARGET_KINDS",
    "Action", "Finding", "GroundSite", "RequestSpec", "SatelliteSpec",
    "Scenario", "StripDefinition", "TargetSpec", "ValidationReport",
    "GeometryCache", "Session", "validate_plan",
    "action_from_dict", "action_to_dict", "strip_from_dict", "strip_to_dict",
    "load_scenario", "save_scenario", "scenario_from_dict", "scenario_to_dict",
    "load_plan", "save_plan", "plan_from_dict", "plan_to_dict",
]
