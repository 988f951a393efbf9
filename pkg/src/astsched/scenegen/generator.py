"""Procedural scenario generation.

Satellites are subsampled from a named archetype in a bundled TLE
catalog; point targets are drawn from a city table filtered to the
constellation's effective inclination band; regional polygons are
synthesized as buffered convex hulls around seed cities.  Everything is
deterministic under (config, seed).
"""

from __future__ import annotations

import csv
import json
import math
import random
from dataclasses import dataclass
from importlib import resources

import numpy as np
from shapely.geometry import MultiPoint

from ..astrodynamics.tle import TwoLineElement, parse_tle
from ..coverage_geom import GeoPolygon, LocalProjection, polygon_area
from ..errors import EmptyBandError, InsufficientCatalogError
from ..scenario import GeometryCache, Scenario, scenario_from_dict, scenario_to_dict
from ..scenario.model import GeodeticPoint

DEFAULT_ANCHOR = "2025-07-17T12:00:00Z"
DEFAULT_HORIZON_S = 345600.0

# A fixed table of plausible ground-station sites the generator draws from.
STATION_SITES = [
    ("svalbard", 78.229, 15.408), ("fairbanks", 64.859, -147.854),
    ("kiruna", 67.857, 20.964), ("wallops", 37.940, -75.467),
    ("santiago_gs", -33.151, -70.668), ("perth_gs", -31.802, 115.885),
    ("hartebeesthoek", -25.890, 27.685), ("kourou", 5.252, -52.805),
]


@dataclass(frozen=True)
class City:
    name: str
    latitude: float
    longitude: float
    population: int


@dataclass
class GenConfig:
    benchmark_kind: str
    archetype: str = "iss_band"
    n_satellites: int = 10
    n_targets: int | None = None        # derived from the ratio when None
    n_polygons: int = 2
    n_pairs: int = 2
    n_missions: int = 4
    sat_target_ratio: float | None = None
    epoch_anchor: str = DEFAULT_ANCHOR
    horizon: float = DEFAULT_HORIZON_S
    seed: int = 0

    def __post_init__(self):
        if not 10 <= self.n_satellites <= 100:
            raise ValueError("n_satellites must lie in [10, 100]")
        for name in ("n_polygons", "n_pairs", "n_missions"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_targets is not None and self.n_targets < 1:
            raise ValueError("n_targets must be positive")


def _data_path(name: str):
    return resources.files("astsched.scenegen") / "data" / name


def load_tle_catalog(path=None) -> dict[str, list[TwoLineElement]]:
    """Catalog of TLEs grouped by archetype via the sidecar index."""
    tle_path = path or _data_path("tle_catalog.tle")
    index_path = (str(path) + ".json") if path else _data_path("archetypes.json")
    if path is None:
        index = json.loads(_data_path("archetypes.json").read_text())
    else:
        index = json.loads(open(index_path).read())
    by_id: dict[int, TwoLineElement] = {}
    lines = [ln.rstrip("\n") for ln in str(
        tle_path.read_text() if hasattr(tle_path, "read_text")
        else open(tle_path).read()).splitlines()]
    i = 0
    while i < len(lines):
        if lines[i].startswith("1 "):
            tle = parse_tle(lines[i], lines[i + 1])
            by_id[tle.satellite_id] = tle
            i += 2
        else:
            i += 1
    return {name: [by_id[sid] for sid in ids if sid in by_id]
            for name, ids in index.items()}


def load_city_db(path=None) -> list[City]:
    src = path or _data_path("cities.csv")
    text = src.read_text() if hasattr(src, "read_text") else open(src).read()
    out = []
    for row in csv.DictReader(text.splitlines()):
        out.append(City(row["name"], float(row["lat"]), float(row["lon"]),
                        int(row["population"])))
    return out


def load_resource_defaults(path=None) -> dict:
    src = path or _data_path("resource_defaults.json")
    text = src.read_text() if hasattr(src, "read_text") else open(src).read()
    return json.loads(text)


def effective_inclination_band(tles: list[TwoLineElement]) -> float:
    """Average effective inclination min(i, 180 - i), capped at 90 deg."""
    eff = [min(t.inclination, 180.0 - t.inclination) for t in tles]
    return min(90.0, sum(eff) / len(eff))


def _default_target_count(config: GenConfig) -> int:
    if config.n_targets is not None:
        return config.n_targets
    ratio = config.sat_target_ratio
    if ratio is None:
        ratio = 1.0 if config.benchmark_kind == "stereo" else 4.0
    return max(1, round(config.n_satellites / ratio))


def _mean_period_s(tles: list[TwoLineElement]) -> float:
    return sum(86400.0 / t.mean_motion for t in tles) / len(tles)


def _synth_polygon(rng: random.Random, seed_city: City) -> GeoPolygon:
    """Convex hull around a seed city scaled to 10,000 - 100,000 km^2."""
    area_target = rng.uniform(10000.0, 100000.0)
    origin = GeodeticPoint(seed_city.latitude, seed_city.longitude)
    proj = LocalProjection(origin)
    radius = math.sqrt(area_target / math.pi) * 1.3
    pts = [(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
           for _ in range(rng.randint(6, 9))]
    hull = MultiPoint(pts).convex_hull
    scale = math.sqrt(area_target / hull.area)
    ring = [proj.inverse(x * scale, y * scale)
            for x, y in hull.exterior.coords[:-1]]
    poly = GeoPolygon(tuple(ring))
    assert 9000.0 < polygon_area(poly) < 110000.0
    return poly


def _sample_cities(rng: random.Random, cities: list[City], band: float,
                   count: int) -> list[City]:
    eligible = [c for c in cities if abs(c.latitude) <= band]
    if not eligible:
        raise EmptyBandError(
            f"no cities within the +/-{band:.1f} deg inclination band")
    if len(eligible) < count:
        raise EmptyBandError(
            f"only {len(eligible)} cities within the band, need {count}")
    return rng.sample(eligible, count)


def generate(config: GenConfig, tle_catalog=None, city_db=None,
             resource_defaults=None, screen: bool = True) -> Scenario:
    """Build a scenario per the config; retries infeasible point targets up
    to 10 times each before surfacing them in the feasibility report."""
    catalog = tle_catalog if tle_catalog is not None else load_tle_catalog()
    cities = city_db if city_db is not None else load_city_db()
    defaults = (resource_defaults if resource_defaults is not None
                else load_resource_defaults())
    if config.archetype not in catalog:
        raise InsufficientCatalogError(
            f"archetype '{config.archetype}' not in the catalog "
            f"(have: {sorted(catalog)})")
    family = catalog[config.archetype]
    if len(family) < config.n_satellites:
        raise InsufficientCatalogError(
            f"archetype '{config.archetype}' holds {len(family)} satellites, "
            f"need {config.n_satellites}")
    if not cities:
        raise EmptyBandError("city database is empty")

    rng = random.Random(config.seed)
    tles = rng.sample(family, config.n_satellites)
    band = effective_inclination_band(tles)
    res = defaults.get(config.archetype, next(iter(defaults.values())))

    doc: dict = {
        "schema_version": 1,
        "id": f"{config.benchmark_kind}-{config.archetype}-s{config.seed}",
        "benchmark_kind": config.benchmark_kind,
        "epoch_anchor": config.epoch_anchor,
        "horizon_s": config.horizon,
        "satellites": [
            {
                "id": f"sat-{t.satellite_id}",
                "tle": list(t.raw_lines),
                "max_off_nadir_deg": res["max_off_nadir_deg"],
                "agility": res["agility"],
                "resources": {k: v for k, v in res.items()
                              if k not in ("agility", "max_off_nadir_deg")},
            }
            for t in tles
        ],
        "stations": [],
        "targets": [],
        "requests": [],
        "station_pairs": [],
    }

    kind = config.benchmark_kind
    if kind == "satnet":
        _gen_satnet(config, rng, doc)
    elif kind in ("revisit", "latency"):
        _gen_point_targets(config, rng, doc, cities, band,
                           with_stations=(kind == "latency"))
    elif kind == "regional":
        _gen_regional(config, rng, doc, cities, band)
    elif kind == "stereo":
        _gen_stereo(config, rng, doc, cities, band, _mean_period_s(tles))
    else:
        raise ValueError(f"unknown benchmark kind {kind!r}")

    scenario = scenario_from_dict(doc)
    if screen and kind != "satnet":
        scenario = _retry_infeasible(scenario, doc, rng, cities, band)
    return scenario


def _gen_satnet(config: GenConfig, rng: random.Random, doc: dict) -> None:
    """Antenna-time missions: overlapping candidate windows on a small set
    of shared resources, oversubscribed so contention is guaranteed."""
    n_antennas = min(3, config.n_missions)
    antennas = [STATION_SITES[i] for i in range(n_antennas)]
    doc["stations"] = [
        {"id": name, "lat_deg": lat, "lon_deg": lon, "min_elevation_deg": 10.0}
        for name, lat, lon in antennas
    ]
    horizon = config.horizon
    for m in range(config.n_missions):
        mission_id = f"mission-{m + 1:02d}"
        for k in range(rng.randint(2, 3)):
            antenna = antennas[rng.randrange(n_antennas)][0]
            windows = []
            for _ in range(rng.randint(2, 4)):
                start = rng.uniform(0.0, horizon - 4000.0)
                windows.append((round(start, 0),
                                round(start + rng.uniform(1200.0, 3600.0), 0)))
            windows.sort()
            total = sum(e - s for s, e in windows)
            doc["requests"].append({
                "id": f"req-{m + 1:02d}-{k + 1}",
                "mission_id": mission_id,
                "resource_id": antenna,
                "required_s": round(total * rng.uniform(0.5, 0.9), 0),
                "candidate_windows": [list(w) for w in windows],
            })


def _gen_point_targets(config: GenConfig, rng: random.Random, doc: dict,
                       cities: list[City], band: float,
                       with_stations: bool) -> None:
    count = _default_target_count(config)
    chosen = _sample_cities(rng, cities, band, count)
    for i, city in enumerate(chosen):
        # roughly 60/40 monitoring/mapping for revisit; all mapping for latency
        if config.benchmark_kind == "latency" or i % 5 >= 3:
            doc["targets"].append({
                "id": f"map-{i + 1:03d}", "kind": "mapping",
                "lat_deg": city.latitude, "lon_deg": city.longitude,
                "quota": rng.randint(2, 6), "min_elevation_deg": 10.0,
            })
        else:
            doc["targets"].append({
                "id": f"mon-{i + 1:03d}", "kind": "monitoring",
                "lat_deg": city.latitude, "lon_deg": city.longitude,
                "min_elevation_deg": 10.0,
            })
    n_stations = max(2, min(len(STATION_SITES), 2 * config.n_pairs)) \
        if with_stations else rng.randint(1, 3)
    sites = rng.sample(STATION_SITES, n_stations)
    doc["stations"] = [
        {"id": name, "lat_deg": lat, "lon_deg": lon, "min_elevation_deg": 5.0}
        for name, lat, lon in sites
    ]
    if with_stations:
        names = [s[0] for s in sites]
        pairs = []
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                pairs.append((names[i], names[j]))
        rng.shuffle(pairs)
        doc["station_pairs"] = [list(p) for p in pairs[:config.n_pairs]]


def _gen_regional(config: GenConfig, rng: random.Random, doc: dict,
                  cities: list[City], band: float) -> None:
    seeds = _sample_cities(rng, cities, max(0.0, band - 5.0), config.n_polygons)
    for i, city in enumerate(seeds):
        poly = _synth_polygon(rng, city)
        doc["targets"].append({
            "id": f"region-{i + 1:02d}", "kind": "polygon",
            "ring": [[p.latitude, p.longitude] for p in poly.ring],
        })
    sites = rng.sample(STATION_SITES, 2)
    doc["stations"] = [
        {"id": name, "lat_deg": lat, "lon_deg": lon, "min_elevation_deg": 5.0}
        for name, lat, lon in sites
    ]


def _gen_stereo(config: GenConfig, rng: random.Random, doc: dict,
                cities: list[City], band: float, period_s: float) -> None:
    count = _default_target_count(config)
    chosen = _sample_cities(rng, cities, band, count)

    def jitter(x: float) -> float:
        return x * rng.uniform(0.8, 1.2)

    for i, city in enumerate(chosen):
        az_min = jitter(15.0)
        az_max = max(az_min + 5.0, jitter(45.0))
        doc["targets"].append({
            "id": f"stereo-{i + 1:03d}", "kind": "stereo",
            "lat_deg": city.latitude, "lon_deg": city.longitude,
            "min_elevation_deg": 10.0,
            "stereo": {
                "az_min_deg": round(az_min, 3), "az_max_deg": round(az_max, 3),
                "t_max_s": round(jitter(period_s), 0),
                "el_min_deg": round(jitter(55.0), 3),
            },
        })
    sites = rng.sample(STATION_SITES, 2)
    doc["stations"] = [
        {"id": name, "lat_deg": lat, "lon_deg": lon, "min_elevation_deg": 5.0}
        for name, lat, lon in sites
    ]


def feasibility_screen(scenario: Scenario,
                       cache: GeometryCache | None = None) -> list[str]:
    """Point targets with no access window from any satellite; read-only."""
    cache = cache or GeometryCache(scenario)
    failures = []
    for target in scenario.targets.values():
        if target.point is None:
            continue
        seen = False
        for sat_id in scenario.satellites:
            if cache.windows_point(sat_id, target.id, target.point,
                                   target.min_elevation):
                seen = True
                break
        if not seen:
            failures.append(target.id)
    return failures


def _retry_infeasible(scenario: Scenario, doc: dict, rng: random.Random,
                      cities: list[City], band: float) -> Scenario:
    """Redraw each unreachable point target's city up to 10 times."""
    failures = feasibility_screen(scenario)
    attempts = 0
    while failures and attempts < 10:
        attempts += 1
        eligible = [c for c in cities if abs(c.latitude) <= band]
        for entry in doc["targets"]:
            if entry["id"] in failures and "lat_deg" in entry:
                city = rng.choice(eligible)
                entry["lat_deg"] = city.latitude
                entry["lon_deg"] = city.longitude
        scenario = scenario_from_dict(doc)
        failures = feasibility_screen(scenario)
    return scenario
