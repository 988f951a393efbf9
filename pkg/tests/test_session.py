"""Session semantics: validation-gated staging, strip registration,
commit freezing, advisory locking, and crash-safe persistence.

The crash tests fork real child processes that die mid-sequence at
injected kill points; the invariant is that the canonical state file is
always either absent or a fully restorable, validation-clean snapshot.
"""

import json
import os
import time

import pytest

from astsched.errors import (
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
from astsched.astrodynamics.frames import GeodeticPoint
from astsched.scenario import (
    Action,
    GeometryCache,
    Session,
    StripDefinition,
    scenario_from_dict,
)
from conftest import scenario_doc


def session_doc():
    doc = scenario_doc(kind="regional", horizon=43200.0, n_sats=1)
    doc["targets"] = [
        {"id": "t1", "kind": "monitoring", "lat_deg": 40.0, "lon_deg": -75.0},
        {"id": "p1", "kind": "polygon",
         "ring": [[40.0, -75.0], [40.0, -73.0], [42.0, -73.0], [42.0, -75.0]]},
    ]
    doc["requests"] = [
        {"id": "r1", "mission_id": "m1", "resource_id": "gs1",
         "required_s": 120.0, "candidate_windows": [[0.0, 600.0]]},
    ]
    return doc


@pytest.fixture(scope="module")
def scenario():
    return scenario_from_dict(session_doc())


@pytest.fixture(scope="module")
def cache(scenario):
    return GeometryCache(scenario)


@pytest.fixture(scope="module")
def obs_windows(scenario, cache):
    target = scenario.targets["t1"]
    windows = [w for w in cache.windows_point("sat1", "t1", target.point,
                                              target.min_elevation)
               if w.end - w.start >= 60.0]
    assert len(windows) >= 2, "fixture needs two usable passes"
    return windows


def make_session(scenario, cache):
    s = Session(scenario)
    s.cache = cache
    return s


def mid_obs(window, aid=""):
    mid = (window.start + window.end) / 2.0
    return Action(id=aid, kind="observe", satellite_id="sat1",
                  counterpart_id="t1", start=mid - 20.0, end=mid + 20.0)


def good_strip(sid=""):
    return StripDefinition(
        id=sid, parent_polygon_id="p1",
        axis=(GeodeticPoint(40.2, -74.0), GeodeticPoint(41.8, -74.0)),
        width_km=50.0)


def test_stage_admits_valid_and_autoassigns_ids(scenario, cache, obs_windows):
    s = make_session(scenario, cache)
    aid, report = s.stage_action(mid_obs(obs_windows[0]))
    assert aid == "a0001"
    assert report.verdict == "valid"
    assert s.actions[aid].status == "staged"
    aid2, _ = s.stage_action(mid_obs(obs_windows[1]))
    assert aid2 == "a0002"


def test_stage_rejects_invalid_and_keeps_registry(scenario, cache, obs_windows):
    s = make_session(scenario, cache)
    w = obs_windows[0]
    bad = Action(id="", kind="observe", satellite_id="sat1",
                 counterpart_id="t1", start=w.end + 600.0, end=w.end + 660.0)
    _, report = s.stage_action(bad)
    assert report.verdict == "invalid"
    assert s.actions == {}


def test_stage_unknown_entities(scenario, cache):
    s = make_session(scenario, cache)
    cases = [
        Action(id="", kind="observe", satellite_id="ghost",
               counterpart_id="t1", start=0.0, end=60.0),
        Action(id="", kind="observe", satellite_id="sat1",
               counterpart_id="nowhere", start=0.0, end=60.0),
        Action(id="", kind="downlink", satellite_id="sat1",
               counterpart_id="gs9", start=0.0, end=60.0),
        Action(id="", kind="isl", satellite_id="sat1",
               counterpart_id="sat9", start=0.0, end=60.0),
        Action(id="", kind="allocate", satellite_id="gs1",
               counterpart_id="r9", start=0.0, end=60.0),
    ]
    for action in cases:
        with pytest.raises(UnknownEntityError):
            s.stage_action(action)


def test_stage_duplicate_id(scenario, cache, obs_windows):
    s = make_session(scenario, cache)
    aid, _ = s.stage_action(mid_obs(obs_windows[0]))
    with pytest.raises(SchemaError):
        s.stage_action(mid_obs(obs_windows[1], aid=aid))


def test_unstage(scenario, cache, obs_windows):
    s = make_session(scenario, cache)
    aid, _ = s.stage_action(mid_obs(obs_windows[0]))
    report = s.unstage_action(aid)
    assert report.verdict == "valid"
    assert s.actions == {}
    with pytest.raises(UnknownActionError):
        s.unstage_action(aid)


def test_register_strip_paths(scenario, cache):
    s = make_session(scenario, cache)
    sid = s.register_strip(good_strip())
    assert sid == "strip0001"
    with pytest.raises(SchemaError):
        s.register_strip(good_strip(sid=sid))
    with pytest.raises(UnknownPolygonError):
        s.register_strip(StripDefinition("x", "t1", good_strip().axis, 50.0))
    with pytest.raises(UnknownPolygonError):
        s.register_strip(StripDefinition("x", "p9", good_strip().axis, 50.0))
    same = (GeodeticPoint(41.0, -74.0), GeodeticPoint(41.0, -74.0))
    with pytest.raises(GeometryError):
        s.register_strip(StripDefinition("x", "p1", same, 50.0))
    with pytest.raises(GeometryError):
        s.register_strip(StripDefinition("x", "p1", good_strip().axis, 0.0))
    far = (GeodeticPoint(10.0, 10.0), GeodeticPoint(11.0, 10.0))
    with pytest.raises(GeometryError):
        s.register_strip(StripDefinition("x", "p1", far, 50.0))


def test_commit_freezes_session(scenario, cache, obs_windows):
    s = make_session(scenario, cache)
    aid, _ = s.stage_action(mid_obs(obs_windows[0]))
    committed = s.commit()
    assert [a.status for a in committed] == ["committed"]
    assert s.committed
    for call in (lambda: s.stage_action(mid_obs(obs_windows[1])),
                 lambda: s.unstage_action(aid),
                 lambda: s.register_strip(good_strip()),
                 lambda: s.commit()):
        with pytest.raises(SessionCommittedError):
            call()


def test_commit_rejects_restored_invalid_state(scenario, cache, obs_windows, tmp_path):
    donor = make_session(scenario, cache)
    w = obs_windows[0]
    donor.actions["a0001"] = Action(
        id="a0001", kind="observe", satellite_id="sat1", counterpart_id="t1",
        start=w.end + 600.0, end=w.end + 660.0)
    path = str(tmp_path / "bad.state.json")
    donor.persist(path)

    s = make_session(scenario, cache)
    s.restore(path)
    with pytest.raises(ValidationError) as err:
        s.commit()
    assert err.value.report.verdict == "invalid"


def test_persist_restore_round_trip(scenario, cache, obs_windows, tmp_path):
    s = make_session(scenario, cache)
    s.stage_action(mid_obs(obs_windows[0]))
    s.register_strip(good_strip())
    path = str(tmp_path / "s.state.json")
    s.persist(path)

    fresh = make_session(scenario, cache)
    fresh.restore(path)
    assert fresh.state_dict() == s.state_dict()
    # the counter resumes past restored ids
    assert fresh.next_action_id() == "a0003"


def test_restore_error_paths(scenario, cache, tmp_path):
    s = make_session(scenario, cache)
    with pytest.raises(FileNotFoundError):
        s.restore(str(tmp_path / "missing.json"))

    torn = tmp_path / "torn.json"
    torn.write_text('{"schema_version": 1, "scen')
    with pytest.raises(CorruptStateError):
        s.restore(str(torn))

    wrong_version = tmp_path / "vers.json"
    doc = s.state_dict()
    doc["schema_version"] = 9
    wrong_version.write_text(json.dumps(doc))
    with pytest.raises(CorruptStateError):
        s.restore(str(wrong_version))

    wrong_scenario = tmp_path / "scen.json"
    doc = s.state_dict()
    doc["scenario_id"] = "someone-else"
    wrong_scenario.write_text(json.dumps(doc))
    with pytest.raises(CorruptStateError):
        s.restore(str(wrong_scenario))


def test_lock_exclusion_within_process(scenario, cache, tmp_path):
    path = str(tmp_path / "locked.state.json")
    holder = make_session(scenario, cache)
    holder.acquire_lock(path)
    rival = make_session(scenario, cache)
    with pytest.raises(LockHeldError) as err:
        rival.acquire_lock(path)
    assert str(os.getpid()) in str(err.value)
    # persisting with the held lock must not deadlock against itself
    holder.persist(path)
    holder.release_lock()
    rival.acquire_lock(path)
    rival.release_lock()


# --- crash safety -----------------------------------------------------------

def run_child_sequence(kill_at, state_path, scenario, cache, obs_windows):
    """Fork a child that performs the canonical mutate-persist sequence and
    dies at the kill_at-th kill point.  Returns the child's exit code."""
    pid = os.fork()
    if pid != 0:
        _, status = os.waitpid(pid, 0)
        return os.WEXITSTATUS(status)

    # --- child ---
    try:
        count = [0]

        def maybe_die():
            count[0] += 1
            if count[0] == kill_at:
                os._exit(17)

        real_replace, real_fsync = os.replace, os.fsync

        def chaos_replace(src, dst):
            maybe_die()
            real_replace(src, dst)
            maybe_die()

        def chaos_fsync(fd):
            maybe_die()
            real_fsync(fd)

        os.replace = chaos_replace
        os.fsync = chaos_fsync

        s = make_session(scenario, cache)
        s.acquire_lock(state_path)
        ops = [
            lambda: s.stage_action(mid_obs(obs_windows[0])),
            lambda: s.persist(state_path),
            lambda: s.register_strip(good_strip()),
            lambda: s.persist(state_path),
            lambda: s.stage_action(mid_obs(obs_windows[1])),
            lambda: s.persist(state_path),
            lambda: s.unstage_action("a0001"),
            lambda: s.persist(state_path),
            lambda: s.commit(),
            lambda: s.persist(state_path),
        ]
        for op in ops:
            maybe_die()
            op()
        os._exit(0)
    except BaseException:
        os._exit(99)


def test_crash_at_every_kill_point_leaves_restorable_state(
        scenario, cache, obs_windows, tmp_path):
    """25 kill points (between ops, before fsync, around rename): after each
    crash the canonical file is absent or a valid, restorable snapshot."""
    survived_to_end = 0
    for kill_at in range(1, 26):
        trial_dir = tmp_path / f"k{kill_at:02d}"
        trial_dir.mkdir()
        state_path = str(trial_dir / "s.state.json")
        code = run_child_sequence(kill_at, state_path, scenario, cache, obs_windows)
        assert code in (0, 17), f"kill point {kill_at} misbehaved (exit {code})"
        if code == 0:
            survived_to_end += 1
        if os.path.exists(state_path):
            doc = json.loads(open(state_path).read())   # never torn
            fresh = make_session(scenario, cache)
            fresh.restore(state_path)
            assert fresh.validate().verdict == "valid"
            assert set(fresh.actions) <= {"a0001", "a0003"}
            if fresh.committed:
                assert set(fresh.actions) == {"a0003"}
            assert doc["scenario_id"] == scenario.id
    # the sequence only runs to completion once the kill point passes the
    # last persist; some trials must crash mid-flight for this test to bite
    assert survived_to_end < 25


def test_completed_sequence_state(scenario, cache, obs_windows, tmp_path):
    state_path = str(tmp_path / "done.state.json")
    code = run_child_sequence(999, state_path, scenario, cache, obs_windows)
    assert code == 0
    fresh = make_session(scenario, cache)
    fresh.restore(state_path)
    assert fresh.committed
    assert set(fresh.actions) == {"a0003"}
    assert set(fresh.strips) == {"strip0002"}


# --- lock contention --------------------------------------------------------

def contention_trial(scenario, state_path, n_children=4):
    """All children attempt the lock while every attempt is in flight;
    returns the number of winners."""
    start_r, start_w = os.pipe()
    ack_r, ack_w = os.pipe()
    done_r, done_w = os.pipe()
    pids = []
    for _ in range(n_children):
        pid = os.fork()
        if pid == 0:
            try:
                os.read(start_r, 1)
                s = Session(scenario)
                try:
                    s.acquire_lock(state_path)
                    won = True
                except LockHeldError:
                    won = False
                os.write(ack_w, b"x")
                os.read(done_r, 1)          # hold until everyone attempted
                os._exit(0 if won else 3)
            except BaseException:
                os._exit(99)
        pids.append(pid)
    os.write(start_w, b"g" * n_children)
    for _ in range(n_children):
        os.read(ack_r, 1)
    os.write(done_w, b"g" * n_children)
    winners = 0
    for pid in pids:
        _, status = os.waitpid(pid, 0)
        code = os.WEXITSTATUS(status)
        assert code in (0, 3), f"contender crashed with {code}"
        winners += code == 0
    for fd in (start_r, start_w, ack_r, ack_w, done_r, done_w):
        os.close(fd)
    return winners


def test_lock_contention_exactly_one_winner(scenario, tmp_path):
    for trial in range(50):
        state_path = str(tmp_path / f"trial{trial:02d}.state.json")
        assert contention_trial(scenario, state_path) == 1, trial
