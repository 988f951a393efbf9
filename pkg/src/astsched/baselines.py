"""Reference solvers: shared candidate enumeration, a benchmark-aware
greedy scheduler, and simulated annealing over binary candidate masks.

These are deliberately simple reference implementations, not optimized
schedulers; they exist to anchor benchmark scores, not to win them.
Both emit only plans that commit cleanly (zero violation findings).
"""

from __future__ import annotations

import copy
import math
import random
import time
from dataclasses import dataclass, field

import numpy as np

from .coverage_geom import stereo_pair_valid
from .evaluators import MetricsReport, evaluate
from .netgraph import GRAZING_FLOOR_KM, grazing_altitude_km
from .scenario import (
    Action,
    GeometryCache,
    Scenario,
    Session,
    StripDefinition,
    validate_plan,
)
from .scenario.model import GeodeticPoint

OBS_SLICE_S = 60.0
MIN_SLICE_S = 10.0
DEFAULT_TIME_BUDGET_S = 1200.0


@dataclass
class CandidateAction:
    prototype: Action
    index: int
    score: float = 0.0


@dataclass
class SAParams:
    initial_temp: float | None = None        # None: calibrated from early moves
    cooling: float = 0.995
    iterations: int = 20000
    move_weights: tuple[float, float, float] = (4.0, 1.0, 2.0)   # add, remove, swap
    seed: int = 0
    time_budget_s: float = DEFAULT_TIME_BUDGET_S

    def __post_init__(self):
        if self.initial_temp is not None and self.initial_temp <= 0.0:
            raise ValueError("initial_temp must be positive")
        if not 0.0 < self.cooling < 1.0:
            raise ValueError("cooling must lie in (0, 1)")
        if any(w < 0.0 for w in self.move_weights) or not any(self.move_weights):
            raise ValueError("move weights must be nonnegative, not all zero")


@dataclass
class SolveResult:
    actions: list[Action]
    strips: dict[str, StripDefinition]
    fitness: float
    metrics: MetricsReport
    session: Session = field(repr=False, default=None)


# --- candidate enumeration ---------------------------------------------------

def _slice_window(start: float, end: float) -> list[tuple[float, float]]:
    """Fixed 60 s slices; a shorter final slice is kept when it is >= 10 s."""
    out = []
    t = start
    while t + OBS_SLICE_S <= end:
        out.append((t, t + OBS_SLICE_S))
        t += OBS_SLICE_S
    if end - t >= MIN_SLICE_S:
        out.append((t, end))
    return out


def isl_windows(cache: GeometryCache, sat1: str, sat2: str,
                max_range_km: float) -> list[tuple[float, float]]:
    """Intervals where an inter-satellite link is geometrically feasible."""
    from .astrodynamics.access import _scan_windows

    p1 = cache.positions(sat1)
    p2 = cache.positions(sat2)
    d = p2 - p1
    rng = np.linalg.norm(d, axis=1)
    graze = np.array([grazing_altitude_km(p1[i], p2[i]) for i in range(len(p1))])
    mask = (rng <= max_range_km) & (graze >= GRAZING_FLOOR_KM)

    def margin(t: float) -> float:
        r1 = cache.state_at(sat1, t).position
        r2 = cache.state_at(sat2, t).position
        m_range = max_range_km - float(np.linalg.norm(r2 - r1))
        m_los = grazing_altitude_km(r1, r2) - GRAZING_FLOOR_KM
        return min(m_range, m_los)

    return _scan_windows(mask, cache.times, margin, 0.0, cache.scenario.horizon)


def enumerate_candidates(scenario: Scenario, cache: GeometryCache | None = None,
                         strips: dict[str, StripDefinition] | None = None
                         ) -> list[CandidateAction]:
    """All individually schedulable actions, deterministically ordered by
    (satellite id, counterpart id, start).  Observations come as 60 s
    slices; downlinks and ISLs come as whole windows."""
    cache = cache or GeometryCache(scenario)
    strips = strips or {}
    protos: list[Action] = []

    for sat_id in sorted(scenario.satellites):
        for tgt_id in sorted(scenario.targets):
            target = scenario.targets[tgt_id]
            if target.kind == "polygon":
                continue
            windows = cache.windows_point(sat_id, tgt_id, target.point,
                                          target.min_elevation)
            for w in windows:
                for a, b in _slice_window(w.start, w.end):
                    protos.append(Action("", "observe", sat_id, tgt_id, a, b))
        for strip_id in sorted(strips):
            for w in cache.windows_strip(sat_id, strips[strip_id]):
                for a, b in _slice_window(w.start, w.end):
                    protos.append(Action("", "observe", sat_id, strip_id, a, b))
        for st_id in sorted(scenario.stations):
            station = scenario.stations[st_id]
            for w in cache.windows_point(sat_id, st_id, station.point,
                                         station.min_elevation):
                protos.append(Action("", "downlink", sat_id, st_id, w.start, w.end))

    if scenario.benchmark_kind == "latency":
        sats = sorted(scenario.satellites)
        for i, s1 in enumerate(sats):
            for s2 in sats[i + 1:]:
                for a, b in isl_windows(cache, s1, s2, scenario.isl_max_range_km):
                    protos.append(Action("", "isl", s1, s2, a, b))

    for req_id in sorted(scenario.requests):
        req = scenario.requests[req_id]
        for ws, we in req.candidate_windows:
            for a, b in _slice_window(ws, we):
                protos.append(Action("", "allocate", req.resource_id, req_id, a, b))

    protos.sort(key=lambda a: (a.satellite_id, a.counterpart_id, a.start, a.end))
    return [CandidateAction(prototype=p, index=i) for i, p in enumerate(protos)]


# --- regional strip synthesis ------------------------------------------------

def default_strips_for(scenario: Scenario, cache: GeometryCache
                       ) -> dict[str, StripDefinition]:
    """North-south strips tiling each polygon target's bounding box, spaced
    one swath width apart.  Width is twice the narrowest satellite's
    off-nadir reach, clamped to a practical band."""
    if not scenario.satellites:
        return {}
    reach = min(cache.off_nadir_reach_km(s) for s in scenario.satellites)
    width = max(20.0, min(150.0, 2.0 * reach))
    strips: dict[str, StripDefinition] = {}
    n = 0
    for tgt_id in sorted(scenario.targets):
        target = scenario.targets[tgt_id]
        if target.kind != "polygon":
            continue
        lats = [p.latitude for p in target.polygon.ring]
        lons = [p.longitude for p in target.polygon.ring]
        lat_lo, lat_hi = min(lats), max(lats)
        lon_lo, lon_hi = min(lons), max(lons)
        mid_lat = (lat_lo + lat_hi) / 2.0
        km_per_deg_lon = 111.32 * math.cos(math.radians(mid_lat))
        step_deg = width / max(km_per_deg_lon, 1.0)
        lon = lon_lo + step_deg / 2.0
        while lon < lon_hi + step_deg / 2.0:
            n += 1
            strips[f"strip{n:04d}"] = StripDefinition(
                id=f"strip{n:04d}", parent_polygon_id=tgt_id,
                axis=(GeodeticPoint(lat_lo, lon), GeodeticPoint(lat_hi, lon)),
                width_km=width)
            lon += step_deg
    return strips


# --- fitness -----------------------------------------------------------------

def fitness(benchmark_kind: str, scenario: Scenario, actions: list[Action],
            strips: dict[str, StripDefinition] | None = None,
            cache: GeometryCache | None = None) -> float:
    """Scalar objective, higher is better.  Declared plumbing: the source
    material for the benchmarks names no fitness formulas."""
    report = evaluate(scenario, actions, strips, cache)
    s = report.scalars
    if benchmark_kind == "satnet":
        return -s["u_rms"]
    if benchmark_kind == "revisit":
        return -s["m_gap_hours"] / 96.0 + s["m_map"]
    if benchmark_kind in ("regional", "stereo"):
        return s["m_cov"]
    if benchmark_kind == "latency":
        lat_norm = (s["m_lat_ms"] / 200.0) if s["m_lat_ms"] is not None else 0.0
        return s["m_avail"] + s["m_map"] - lat_norm
    raise ValueError(f"unknown benchmark kind {benchmark_kind!r}")


# --- greedy ------------------------------------------------------------------

class _GreedyState:
    """Book-keeping the scorers read: staged actions grouped by purpose."""

    def __init__(self, scenario: Scenario, cache: GeometryCache):
        self.scenario = scenario
        self.cache = cache
        self.obs_by_target: dict[str, list[Action]] = {}
        self.alloc_by_request: dict[str, float] = {}
        self.link_count = 0

    def note(self, action: Action) -> None:
        if action.kind == "observe":
            self.obs_by_target.setdefault(action.counterpart_id, []).append(action)
        elif action.kind == "allocate":
            self.alloc_by_request[action.counterpart_id] = \
                self.alloc_by_request.get(action.counterpart_id, 0.0) + \
                (action.end - action.start)
        else:
            self.link_count += 1


def _score_revisit(c: CandidateAction, st: _GreedyState) -> float:
    """Gap since the target's last staged observation (larger is hungrier)."""
    if c.prototype.kind != "observe":
        return -math.inf
    obs = st.obs_by_target.get(c.prototype.counterpart_id, [])
    prior = [a.end for a in obs if a.end <= c.prototype.start]
    return c.prototype.start - (max(prior) if prior else 0.0) + \
        (st.scenario.horizon if not obs else 0.0)


def _score_satnet(c: CandidateAction, st: _GreedyState) -> float:
    """Longest-unsatisfied-mission first."""
    if c.prototype.kind != "allocate":
        return -math.inf
    req = st.scenario.requests[c.prototype.counterpart_id]
    mission_reqs = [r for r in st.scenario.requests.values()
                    if r.mission_id == req.mission_id]
    deficit = sum(
        max(0.0, r.required_s - st.alloc_by_request.get(r.id, 0.0))
        for r in mission_reqs)
    if st.alloc_by_request.get(req.id, 0.0) >= req.required_s or deficit <= 0.0:
        return -math.inf
    return deficit


def _score_stereo(c: CandidateAction, st: _GreedyState) -> float:
    """Azimuth-separation pairing bonus: completing a valid doublet beats
    opening a new target, which beats piling onto covered ones."""
    p = c.prototype
    if p.kind != "observe":
        return -math.inf
    target = st.scenario.targets.get(p.counterpart_id)
    if target is None or target.kind != "stereo":
        return -math.inf
    obs = st.obs_by_target.get(p.counterpart_id, [])
    if not obs:
        return 1.0
    mid = (p.start + p.end) / 2.0
    view = st.cache.view(p.satellite_id, target.point, mid)
    best = 0.0
    for a in obs:
        amid = (a.start + a.end) / 2.0
        aview = st.cache.view(a.satellite_id, target.point, amid)
        verdict = stereo_pair_valid((amid, aview), (mid, view), target.stereo)
        if verdict.valid:
            best = max(best, 1000.0)
    return best if best > 0.0 else 0.1


def _score_regional(c: CandidateAction, st: _GreedyState) -> float:
    """Incremental-area estimate: new along-strip seconds swept."""
    p = c.prototype
    if p.kind != "observe" or p.counterpart_id not in getattr(st, "strips", {}):
        return -math.inf
    covered = [(a.start, a.end) for a in st.obs_by_target.get(p.counterpart_id, [])]
    novel = p.end - p.start
    for s, e in covered:
        novel -= max(0.0, min(p.end, e) - max(p.start, s))
    return novel


def _score_latency(c: CandidateAction, st: _GreedyState) -> float:
    """Link-first, then mapping observations."""
    p = c.prototype
    if p.kind in ("downlink", "isl"):
        return 1000.0 + (p.end - p.start) / st.scenario.horizon
    if p.kind == "observe":
        target = st.scenario.targets.get(p.counterpart_id)
        if target is not None and target.kind == "mapping":
            done = len(st.obs_by_target.get(p.counterpart_id, []))
            return 1.0 if done < (target.quota or 0) else 0.01
    return -math.inf


SCORERS = {
    "revisit": _score_revisit,
    "satnet": _score_satnet,
    "stereo": _score_stereo,
    "regional": _score_regional,
    "latency": _score_latency,
}


def _fresh(proto: Action) -> Action:
    return Action("", proto.kind, proto.satellite_id, proto.counterpart_id,
                  proto.start, proto.end, proto.satellite2_id)


def _make_session(scenario: Scenario,
                  strips: dict[str, StripDefinition]) -> Session:
    session = Session(scenario)
    for strip in strips.values():
        session.register_strip(copy.deepcopy(strip))
    return session


def greedy_schedule(scenario: Scenario, scorer=None,
                    cache: GeometryCache | None = None,
                    time_budget_s: float = DEFAULT_TIME_BUDGET_S,
                    commit: bool = True) -> SolveResult:
    """Stage the highest-scoring valid candidate until nothing stages.
    Rejected candidates are discarded; ties break on (start, id order)."""
    deadline = time.monotonic() + time_budget_s
    scorer = scorer or SCORERS[scenario.benchmark_kind]
    session = Session(scenario)
    cache = cache or session.cache
    session.cache = cache
    strips = (default_strips_for(scenario, cache)
              if scenario.benchmark_kind == "regional" else {})
    for strip in strips.values():
        session.register_strip(copy.deepcopy(strip))

    candidates = enumerate_candidates(scenario, cache, session.strips)
    state = _GreedyState(scenario, cache)
    state.strips = session.strips
    remaining = list(candidates)
    while remaining and time.monotonic() < deadline:
        for c in remaining:
            c.score = scorer(c, state)
        remaining.sort(key=lambda c: (-c.score, c.prototype.start, c.index))
        best = remaining.pop(0)
        if best.score == -math.inf:
            break
        _, report = session.stage_action(_fresh(best.prototype))
        if report.verdict == "valid":
            state.note(best.prototype)

    actions = list(session.actions.values())
    if commit:
        session.commit()
    fit = fitness(scenario.benchmark_kind, scenario, actions, session.strips, cache)
    metrics = evaluate(scenario, actions, session.strips, cache)
    return SolveResult(actions=actions, strips=dict(session.strips),
                       fitness=fit, metrics=metrics, session=session)


# --- simulated annealing -----------------------------------------------------

def metropolis_accept(delta_energy: float, temp: float,
                      rng: random.Random) -> bool:
    """Metropolis criterion: improvements always pass, worsenings pass with
    probability exp(-dE/T)."""
    return delta_energy <= 0.0 or rng.random() < math.exp(-delta_energy / temp)


def _mask_actions(candidates: list[CandidateAction],
                  mask: list[bool]) -> list[Action]:
    out = []
    for c, on in zip(candidates, mask):
        if on:
            a = _fresh(c.prototype)
            a.id = f"c{c.index:05d}"
            out.append(a)
    return out


def sa_schedule(scenario: Scenario, params: SAParams | None = None,
                cache: GeometryCache | None = None) -> SolveResult:
    """Simulated annealing over the binary candidate mask, warm-started from
    greedy.  Energy is negated fitness; worsening moves pass the Metropolis
    test exp(-dE/T) under geometric cooling; the best-seen mask is what gets
    committed, so the result never scores below greedy."""
    params = params or SAParams()
    rng = random.Random(params.seed)
    deadline = time.monotonic() + params.time_budget_s

    warm = greedy_schedule(scenario, cache=cache,
                           time_budget_s=params.time_budget_s / 4.0,
                           commit=False)
    cache = cache or warm.session.cache
    strips = warm.strips
    candidates = enumerate_candidates(scenario, cache, strips)

    def matches(proto: Action, staged: Action) -> bool:
        return (proto.kind == staged.kind
                and proto.satellite_id == staged.satellite_id
                and proto.counterpart_id == staged.counterpart_id
                and proto.start == staged.start and proto.end == staged.end)

    mask = [False] * len(candidates)
    for staged in warm.actions:
        for c in candidates:
            if not mask[c.index] and matches(c.prototype, staged):
                mask[c.index] = True
                break

    def energy_of(m: list[bool]) -> float | None:
        acts = _mask_actions(candidates, m)
        report = validate_plan(scenario, acts, strips, cache)
        if report.errors():
            return None
        return -fitness(scenario.benchmark_kind, scenario, acts, strips, cache)

    energy = energy_of(mask)
    assert energy is not None, "warm-start plan failed validation"
    best_mask = list(mask)
    best_energy = energy

    def propose(m: list[bool]) -> list[bool] | None:
        on = [i for i, v in enumerate(m) if v]
        off = [i for i, v in enumerate(m) if not v]
        moves = []
        weights = []
        w_add, w_rm, w_swap = params.move_weights
        if off and w_add:
            moves.append("add"); weights.append(w_add)
        if on and w_rm:
            moves.append("remove"); weights.append(w_rm)
        if on and off and w_swap:
            moves.append("swap"); weights.append(w_swap)
        if not moves:
            return None
        move = rng.choices(moves, weights=weights)[0]
        nm = list(m)
        if move == "add":
            nm[rng.choice(off)] = True
        elif move == "remove":
            nm[rng.choice(on)] = False
        else:
            nm[rng.choice(on)] = False
            nm[rng.choice(off)] = True
        return nm

    temp = params.initial_temp
    if temp is None:
        # calibrate so the median early worsening move is accepted at p = 0.8
        worsenings = []
        probe_rng = random.Random(params.seed + 1)
        saved = rng.getstate()
        rng.setstate(probe_rng.getstate())
        for _ in range(100):
            nm = propose(mask)
            if nm is None:
                break
            ne = energy_of(nm)
            if ne is not None and ne > energy:
                worsenings.append(ne - energy)
            if time.monotonic() > deadline:
                break
        rng.setstate(saved)
        if worsenings:
            worsenings.sort()
            median = worsenings[len(worsenings) // 2]
            temp = median / math.log(1.0 / 0.8)
        else:
            temp = 1.0

    for _ in range(params.iterations):
        if time.monotonic() > deadline:
            break
        nm = propose(mask)
        if nm is None:
            break
        ne = energy_of(nm)
        if ne is not None:
            if metropolis_accept(ne - energy, temp, rng):
                mask, energy = nm, ne
                if energy < best_energy:
                    best_energy = energy
                    best_mask = list(mask)
        temp *= params.cooling

    session = _make_session(scenario, strips)
    session.cache = cache
    for c, on in zip(candidates, best_mask):
        if on:
            _, report = session.stage_action(_fresh(c.prototype))
            assert report.verdict == "valid", "best-seen mask failed staging"
    actions = session.commit()
    metrics = evaluate(scenario, actions, session.strips, cache)
    return SolveResult(actions=actions, strips=dict(session.strips),
                       fitness=-best_energy, metrics=metrics, session=session)
