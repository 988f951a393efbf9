"""Per-satellite resource timelines: energy, data storage, terminal capacity.

All rates are piecewise-constant, so integration is event-driven and
exact: breakpoints are action edges, lighting transitions, and any
clamp/zero crossings the integration itself introduces.  Violations are
data, not exceptions; the validation pipeline turns them into findings.

Lighting arrives as explicit lit intervals so the simulator stays
decoupled from the propagation stack (and trivially testable).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

ENERGY_NEGATIVE = "energy_negative"
STORAGE_OVERFLOW = "storage_overflow"
STORAGE_UNDERFLOW = "storage_underflow"
TERMINAL_CAPACITY = "terminal_capacity"

OBSERVE = "observe"
DOWNLINK = "downlink"
ISL = "isl"
LINK_KINDS = (DOWNLINK, ISL)


@dataclass(frozen=True)
class ResourceParams:
    e0: float                          # Wh
    e_max: float                       # Wh
    p_solar: float                     # W while lit
    p_idle: float                      # W
    p_action: dict                     # action kind -> W increment
    d0: float                          # Gbit
    d_max: float                       # Gbit
    obs_rate: float                    # Gbit/s
    downlink_rate: float               # Gbit/s
    n_term: int = 1

    def __post_init__(self):
        if not 0.0 <= self.e0 <= self.e_max:
            raise ValueError(f"e0 {self.e0} outside [0, e_max {self.e_max}]")
        if not 0.0 <= self.d0 <= self.d_max:
            raise ValueError(f"d0 {self.d0} outside [0, d_max {self.d_max}]")
        if self.obs_rate < 0 or self.downlink_rate < 0:
            raise ValueError("rates must be nonnegative")
        if self.n_term < 1:
            raise ValueError("n_term must be >= 1")


@dataclass(frozen=True)
class Violation:
    epoch: float
    kind: str
    magnitude: float
    end: float | None = None


@dataclass
class ResourceTimeline:
    breakpoints: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)
    storage: list[float] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)


def _interval(action) -> tuple[str, float, float]:
    """Accept (kind, start, end) tuples or objects with those attributes."""
    if isinstance(action, tuple):
        return action[0], float(action[1]), float(action[2])
    return action.kind, float(action.start), float(action.end)


def _segment_edges(actions: Iterable, horizon: tuple[float, float],
                   extra: Iterable[float] = ()) -> list[float]:
    h0, h1 = horizon
    edges = {h0, h1}
    for a in actions:
        _, s, e = _interval(a)
        edges.add(min(max(s, h0), h1))
        edges.add(min(max(e, h0), h1))
    for t in extra:
        if h0 < t < h1:
            edges.add(t)
    return sorted(edges)


def _active_kinds(actions: Sequence, t: float) -> list[str]:
    out = []
    for a in actions:
        kind, s, e = _interval(a)
        if s <= t < e:
            out.append(kind)
    return out


def _is_lit(lit_intervals: Sequence[tuple[float, float]], t: float) -> bool:
    for a, b in lit_intervals:
        if a <= t < b:
            return True
    return False


def simulate_energy(params: ResourceParams, actions: Sequence,
                    horizon: tuple[float, float],
                    lit_intervals: Sequence[tuple[float, float]]) -> ResourceTimeline:
    """Battery level in Wh: E(0) + integral of (generation - consumption),
    clamped at e_max.  One energy_negative violation per below-zero excursion,
    stamped at the downward crossing with the excursion's depth."""
    lit_edges = [t for a, b in lit_intervals for t in (a, b)]
    edges = _segment_edges(actions, horizon, lit_edges)
    tl = ResourceTimeline(breakpoints=[edges[0]], energy=[params.e0])
    e = params.e0
    below = e < 0.0
    excursion_min = e
    excursion_start = edges[0]
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        mid = a
        p_con = params.p_idle + sum(
            params.p_action.get(k, 0.0) for k in _active_kinds(actions, mid))
        p_gen = params.p_solar if _is_lit(lit_intervals, mid) else 0.0
        rate = (p_gen - p_con) / 3600.0          # Wh/s
        seg_end = b
        t = a
        while t < seg_end - 1e-12:
            e_next = e + rate * (seg_end - t)
            if below and e < 0.0 and e_next > 0.0:
                # recovery crossing comes before any e_max clamp on the way up
                t_cross = t + (0.0 - e) / rate
                tl.breakpoints.append(t_cross)
                tl.energy.append(0.0)
                tl.violations.append(Violation(
                    excursion_start, ENERGY_NEGATIVE, abs(excursion_min), t_cross))
                below = False
                e = 0.0
                t = t_cross
                continue
            if rate > 0.0 and e < params.e_max and e_next > params.e_max:
                t_cross = t + (params.e_max - e) / rate
                e = params.e_max
                tl.breakpoints.append(t_cross)
                tl.energy.append(e)
                t = t_cross
                continue
            if e >= params.e_max and rate > 0.0:
                e_next = params.e_max
            if not below and e > 0.0 and e_next < 0.0:
                t_cross = t + (0.0 - e) / rate
                e = 0.0
                tl.breakpoints.append(t_cross)
                tl.energy.append(0.0)
                below = True
                excursion_min = 0.0
                excursion_start = t_cross
                t = t_cross
                continue
            e = e_next
            if below:
                excursion_min = min(excursion_min, e)
            t = seg_end
        tl.breakpoints.append(seg_end)
        tl.energy.append(e)
    if below:
        tl.violations.append(Violation(
            excursion_start, ENERGY_NEGATIVE, abs(excursion_min), edges[-1]))
    return tl


def simulate_storage(params: ResourceParams, actions: Sequence,
                     horizon: tuple[float, float]) -> ResourceTimeline:
    """Data buffer in Gbit: +obs_rate per active observation, -downlink_rate
    per active downlink.  The buffer floors at zero; draining an empty buffer
    with an active downlink is a storage_underflow.  Exceeding d_max keeps
    integrating and flags a storage_overflow per excursion."""
    edges = _segment_edges(actions, horizon)
    tl = ResourceTimeline(breakpoints=[edges[0]], storage=[params.d0])
    d = params.d0
    above = d > params.d_max
    over_peak = d
    over_start = edges[0]
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        kinds = _active_kinds(actions, a)
        n_obs = kinds.count(OBSERVE)
        n_dl = kinds.count(DOWNLINK)
        rate = params.obs_rate * n_obs - params.downlink_rate * n_dl
        seg_end = b
        t = a
        while t < seg_end - 1e-12:
            d_next = d + rate * (seg_end - t)
            if rate < 0.0 and d > 0.0 and d_next < 0.0:
                t_cross = t + (0.0 - d) / rate
                d = 0.0
                tl.breakpoints.append(t_cross)
                tl.storage.append(0.0)
                tl.violations.append(Violation(
                    t_cross, STORAGE_UNDERFLOW,
                    abs(rate) * (seg_end - t_cross), seg_end))
                t = t_cross
                continue
            if d <= 0.0 and rate < 0.0:
                if n_dl > 0 and t == a:
                    tl.violations.append(Violation(
                        t, STORAGE_UNDERFLOW, abs(rate) * (seg_end - t), seg_end))
                d_next = 0.0
            if not above and d < params.d_max and d_next > params.d_max:
                t_cross = t + (params.d_max - d) / rate
                d = params.d_max
                tl.breakpoints.append(t_cross)
                tl.storage.append(d)
                above = True
                over_peak = d
                over_start = t_cross
                t = t_cross
                continue
            if above and d > params.d_max and d_next < params.d_max:
                t_cross = t + (params.d_max - d) / rate
                tl.breakpoints.append(t_cross)
                tl.storage.append(params.d_max)
                tl.violations.append(Violation(
                    over_start, STORAGE_OVERFLOW, over_peak - params.d_max, t_cross))
                above = False
                d = params.d_max
                t = t_cross
                continue
            d = d_next
            if above:
                over_peak = max(over_peak, d)
            t = seg_end
        tl.breakpoints.append(seg_end)
        tl.storage.append(d)
    if above:
        tl.violations.append(Violation(
            over_start, STORAGE_OVERFLOW, over_peak - params.d_max, edges[-1]))
    return tl


def check_terminal_capacity(params: ResourceParams, actions: Sequence) -> list[Violation]:
    """Maximal intervals where simultaneous link actions exceed n_term.
    Observations never count against terminal capacity."""
    events: list[tuple[float, int]] = []
    for a in actions:
        kind, s, e = _interval(a)
        if kind in LINK_KINDS and e > s:
            events.append((s, 1))
            events.append((e, -1))
    if not events:
        return []
    # releases before acquisitions at equal epochs: touching links never overlap
    events.sort(key=lambda ev: (ev[0], ev[1]))
    count = 0
    violations = []
    over_since = None
    max_excess = 0
    for t, delta in events:
        count += delta
        if count > params.n_term:
            if over_since is None:
                over_since = t
                max_excess = 0
            max_excess = max(max_excess, count - params.n_term)
        elif over_since is not None:
            if t > over_since:
                violations.append(Violation(over_since, TERMINAL_CAPACITY,
                                            float(max_excess), t))
            over_since = None
    return violations


def simulate(params: ResourceParams, actions: Sequence,
             horizon: tuple[float, float],
             lit_intervals: Sequence[tuple[float, float]]) -> ResourceTimeline:
    """Full timeline: merged energy + storage curves plus all violations."""
    e_tl = simulate_energy(params, actions, horizon, lit_intervals)
    d_tl = simulate_storage(params, actions, horizon)
    merged = ResourceTimeline()
    merged.breakpoints = sorted(set(e_tl.breakpoints) | set(d_tl.breakpoints))
    merged.energy = [value_at(e_tl.breakpoints, e_tl.energy, t) for t in merged.breakpoints]
    merged.storage = [value_at(d_tl.breakpoints, d_tl.storage, t) for t in merged.breakpoints]
    merged.violations = sorted(
        e_tl.violations + d_tl.violations + check_terminal_capacity(params, actions),
        key=lambda v: (v.epoch, v.kind))
    return merged


def value_at(breakpoints: Sequence[float], values: Sequence[float], t: float) -> float:
    """Linear interpolation on a piecewise-linear timeline."""
    if t <= breakpoints[0]:
        return values[0]
    if t >= breakpoints[-1]:
        return values[-1]
    import bisect
    i = bisect.bisect_right(breakpoints, t) - 1
    a, b = breakpoints[i], breakpoints[i + 1]
    if b == a:
        return values[i + 1]
    frac = (t - a) / (b - a)
    return values[i] + frac * (values[i + 1] - values[i])
