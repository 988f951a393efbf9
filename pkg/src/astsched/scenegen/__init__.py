"""Procedural scenario generation from bundled TLE and city catalogs."""

from .generator import (
    City,
    GenConfig,
    effective_inclination_band,
    feasibility_screen,
    generate,
    load_city_db,
    load_resource_defaults,
    load_tle_catalog,
)

__all__ = [
    "City", "GenConfig", "effective_inclination_band", "feasibility_screen",
    "generate", "load_city_db", "load_resource_defaults", "load_tle_catalog",
]
