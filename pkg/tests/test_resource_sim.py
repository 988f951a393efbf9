"""Resource simulation against a dense 1 s forward-Euler oracle, plus
hand-built violation fixtures."""

import numpy as np
import pytest

from astsched.resource_sim import (
    ENERGY_NEGATIVE,
    STORAGE_OVERFLOW,
    STORAGE_UNDERFLOW,
    TERMINAL_CAPACITY,
    ResourceParams,
    check_terminal_capacity,
    simulate,
    simulate_energy,
    simulate_storage,
    value_at,
)

PARAMS = ResourceParams(
    e0=50.0, e_max=100.0, p_solar=300.0, p_idle=100.0,
    p_action={"observe": 200.0, "downlink": 150.0, "isl": 100.0},
    d0=1.0, d_max=4.0, obs_rate=0.05, downlink_rate=0.1, n_term=1)


def dense_oracle(params, actions, horizon, lit):
    """Independent 1 s Euler integration with the same clamp semantics:
    energy caps at e_max, storage floors at zero.  Returns per-second energy
    and storage arrays plus aggregate violation evidence."""
    h0, h1 = horizon
    n = int(round(h1 - h0))
    times = [h0 + i for i in range(n + 1)]
    e, d = params.e0, params.d0
    energy, storage = [e], [d]
    neg_depths = []            # min depth of each below-zero energy excursion
    cur_min = None
    over_peaks = []            # peak of each above-d_max storage excursion
    cur_peak = None
    underflow_total = 0.0
    term_over_seconds = 0
    for t in times[:-1]:
        active = [k for k, s, end in actions if s <= t < end]
        p_con = params.p_idle + sum(params.p_action.get(k, 0.0) for k in active)
        p_gen = params.p_solar if any(a <= t < b for a, b in lit) else 0.0
        e = min(params.e_max, e + (p_gen - p_con) / 3600.0)
        if e < 0.0:
            cur_min = e if cur_min is None else min(cur_min, e)
        elif cur_min is not None:
            neg_depths.append(-cur_min)
            cur_min = None

        n_obs = active.count("observe")
        n_dl = active.count("downlink")
        rate = params.obs_rate * n_obs - params.downlink_rate * n_dl
        if rate < 0.0:
            underflow_total += max(0.0, -rate - d)
        d = max(0.0, d + rate)
        if d > params.d_max:
            cur_peak = d if cur_peak is None else max(cur_peak, d)
        elif cur_peak is not None:
            over_peaks.append(cur_peak - params.d_max)
            cur_peak = None

        links = sum(1 for k, s, end in actions
                    if k in ("downlink", "isl") and s <= t < end)
        if links > params.n_term:
            term_over_seconds += 1

        energy.append(e)
        storage.append(d)
    if cur_min is not None:
        neg_depths.append(-cur_min)
    if cur_peak is not None:
        over_peaks.append(cur_peak - params.d_max)
    return times, energy, storage, neg_depths, over_peaks, underflow_total, term_over_seconds


def random_case(rng):
    horizon = (0.0, 600.0)
    actions = []
    for _ in range(rng.integers(0, 7)):
        s = int(rng.integers(0, 580))
        e = int(rng.integers(s + 5, min(s + 120, 600)))
        kind = rng.choice(["observe", "downlink", "isl"])
        actions.append((str(kind), float(s), float(e)))
    lit = []
    cursor = 0
    for _ in range(rng.integers(0, 3)):
        a = int(rng.integers(cursor, 500))
        b = int(rng.integers(a + 20, 600))
        lit.append((float(a), float(b)))
        cursor = b + 1
        if cursor >= 480:
            break
    params = ResourceParams(
        e0=float(rng.uniform(0.0, 1.0)),       # scarce battery: forces crossings
        e_max=float(rng.uniform(1.0, 5.0)),
        p_solar=float(rng.uniform(150.0, 400.0)),
        p_idle=float(rng.uniform(30.0, 120.0)),
        p_action={"observe": 200.0, "downlink": 150.0, "isl": 100.0},
        d0=float(rng.uniform(0.0, 2.0)),
        d_max=float(rng.uniform(2.0, 5.0)),
        obs_rate=float(rng.uniform(0.01, 0.08)),
        downlink_rate=float(rng.uniform(0.02, 0.15)),
        n_term=int(rng.integers(1, 3)))
    return params, actions, horizon, lit


def test_simulation_matches_dense_euler_oracle():
    """100 random action sets: curves agree at every second within 1e-6 and
    the violation evidence (counts, depths, totals) matches."""
    rng = np.random.default_rng(23)
    for case in range(100):
        params, actions, horizon, lit = random_case(rng)
        tl = simulate(params, actions, horizon, lit)
        (times, energy, storage, neg_depths, over_peaks,
         underflow_total, term_over) = dense_oracle(params, actions, horizon, lit)
        for t, e_ref, d_ref in zip(times, energy, storage):
            assert value_at(tl.breakpoints, tl.energy, t) == pytest.approx(
                e_ref, abs=1e-6), (case, t)
            assert value_at(tl.breakpoints, tl.storage, t) == pytest.approx(
                d_ref, abs=1e-6), (case, t)

        lib_neg = sorted(v.magnitude for v in tl.violations
                         if v.kind == ENERGY_NEGATIVE)
        assert lib_neg == pytest.approx(sorted(neg_depths), abs=1e-6), case

        lib_over = sorted(v.magnitude for v in tl.violations
                          if v.kind == STORAGE_OVERFLOW)
        assert lib_over == pytest.approx(sorted(over_peaks), abs=1e-6), case

        lib_under = sum(v.magnitude for v in tl.violations
                        if v.kind == STORAGE_UNDERFLOW)
        assert lib_under == pytest.approx(underflow_total, abs=1e-6), case

        lib_term = sum(v.end - v.epoch for v in tl.violations
                       if v.kind == TERMINAL_CAPACITY)
        assert lib_term == pytest.approx(float(term_over), abs=1e-9), case


def test_energy_charges_and_clamps():
    p = ResourceParams(e0=50.0, e_max=60.0, p_solar=3700.0, p_idle=100.0,
                       p_action={}, d0=0.0, d_max=1.0,
                       obs_rate=0.0, downlink_rate=0.0)
    tl = simulate_energy(p, [], (0.0, 36000.0), [(0.0, 36000.0)])
    # net +3600 W = +1 Wh/s until the cap, reached exactly at t = 10 s
    assert value_at(tl.breakpoints, tl.energy, 5.0) == pytest.approx(55.0)
    assert value_at(tl.breakpoints, tl.energy, 10.0) == pytest.approx(60.0)
    assert value_at(tl.breakpoints, tl.energy, 30000.0) == pytest.approx(60.0)
    assert tl.violations == []


def test_energy_negative_excursion_depth_and_epoch():
    p = ResourceParams(e0=1.0, e_max=10.0, p_solar=3600.0, p_idle=3600.0,
                       p_action={"observe": 3600.0}, d0=0.0, d_max=9.0,
                       obs_rate=0.0, downlink_rate=0.0)
    # idle alone balances solar; the 10 s observation drains 1 Wh/s in dark
    actions = [("observe", 5.0, 15.0)]
    tl = simulate_energy(p, actions, (0.0, 30.0), [])
    # dark idle: -1 Wh/s, crossing zero at t=1; the observation doubles the
    # drain over [5, 15], so e(15) = -24 and e(30) = -39
    assert len(tl.violations) == 1
    v = tl.violations[0]
    assert v.kind == ENERGY_NEGATIVE
    assert v.epoch == pytest.approx(1.0)
    assert v.magnitude == pytest.approx(39.0)
    assert value_at(tl.breakpoints, tl.energy, 15.0) == pytest.approx(-24.0)


def test_storage_overflow_and_recovery():
    p = ResourceParams(e0=100.0, e_max=100.0, p_solar=500.0, p_idle=10.0,
                       p_action={}, d0=3.5, d_max=4.0,
                       obs_rate=0.1, downlink_rate=0.2)
    actions = [("observe", 0.0, 10.0), ("downlink", 10.0, 20.0)]
    tl = simulate_storage(p, actions, (0.0, 20.0))
    # fills to 4.5 (0.5 above cap) then drains back under at t = 12.5
    over = [v for v in tl.violations if v.kind == STORAGE_OVERFLOW]
    assert len(over) == 1
    assert over[0].epoch == pytest.approx(5.0)
    assert over[0].magnitude == pytest.approx(0.5)
    assert over[0].end == pytest.approx(12.5)
    assert value_at(tl.breakpoints, tl.storage, 20.0) == pytest.approx(2.5)


def test_storage_underflow_on_empty_buffer():
    p = ResourceParams(e0=100.0, e_max=100.0, p_solar=0.0, p_idle=10.0,
                       p_action={}, d0=0.5, d_max=4.0,
                       obs_rate=0.1, downlink_rate=0.1)
    tl = simulate_storage(p, [("downlink", 0.0, 20.0)], (0.0, 20.0))
    under = [v for v in tl.violations if v.kind == STORAGE_UNDERFLOW]
    assert len(under) == 1
    assert under[0].epoch == pytest.approx(5.0)        # buffer empties here
    assert under[0].magnitude == pytest.approx(1.5)    # 15 s of unserved drain
    assert value_at(tl.breakpoints, tl.storage, 20.0) == 0.0


def test_terminal_capacity_overlap_and_touching():
    p = PARAMS
    overlapping = [("downlink", 0.0, 100.0), ("isl", 50.0, 150.0)]
    v = check_terminal_capacity(p, overlapping)
    assert len(v) == 1
    assert v[0].kind == TERMINAL_CAPACITY
    assert (v[0].epoch, v[0].end) == (50.0, 100.0)
    assert v[0].magnitude == 1.0

    touching = [("downlink", 0.0, 100.0), ("downlink", 100.0, 200.0)]
    assert check_terminal_capacity(p, touching) == []

    obs = [("observe", 0.0, 100.0), ("downlink", 0.0, 100.0)]
    assert check_terminal_capacity(p, obs) == []


def test_params_validation():
    with pytest.raises(ValueError):
        ResourceParams(e0=-1.0, e_max=10.0, p_solar=0, p_idle=0, p_action={},
                       d0=0, d_max=1, obs_rate=0, downlink_rate=0)
    with pytest.raises(ValueError):
        ResourceParams(e0=5.0, e_max=10.0, p_solar=0, p_idle=0, p_action={},
                       d0=2.0, d_max=1.0, obs_rate=0, downlink_rate=0)
    with pytest.raises(ValueError):
        ResourceParams(e0=5.0, e_max=10.0, p_solar=0, p_idle=0, p_action={},
                       d0=0, d_max=1, obs_rate=0, downlink_rate=0, n_term=0)


def test_value_at_interpolates():
    bp = [0.0, 10.0, 20.0]
    vals = [0.0, 10.0, 0.0]
    assert value_at(bp, vals, -5.0) == 0.0
    assert value_at(bp, vals, 5.0) == 5.0
    assert value_at(bp, vals, 15.0) == 5.0
    assert value_at(bp, vals, 25.0) == 0.0
