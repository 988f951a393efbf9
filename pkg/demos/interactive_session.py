"""
Interactive planning with a validated session
=============================================

A Session is the gatekeeper between intent and a committed plan: every
staged action is re-validated against the whole registry, rejected
actions leave no trace, and the state survives process crashes through
an atomically written state file.
"""

import os
import tempfile

from astsched.astrodynamics.tle import format_tle
from astsched.scenario import Action, Session, scenario_from_dict

# ----------------------------------------------------------------------
# 1. A two-satellite scenario written out longhand, to show the document
#    format the generator normally produces for us.  The element-set
#    writer takes care of the fixed-column layout and checksums.
# ----------------------------------------------------------------------
def elements(satellite_id, inclination, raan, mean_motion):
    l1, l2 = format_tle(satellite_id=satellite_id, epoch_year=2025,
                        epoch_days=198.5, inclination=inclination, raan=raan,
                        eccentricity=0.0008, arg_perigee=40.0,
                        mean_anomaly=300.0, mean_motion=mean_motion,
                        bstar=1e-4)
    return [l1, l2]


doc = {
    "schema_version": 1,
    "id": "walkthrough",
    "benchmark_kind": "revisit",
    "epoch_anchor": "2025-07-17T12:00:00Z",
    "horizon_s": 43200.0,
    "satellites": [
        {"id": "sat1", "tle": elements(90001, 51.6, 120.0, 15.2)},
        {"id": "sat2", "tle": elements(90002, 97.6, 200.0, 14.8)},
    ],
    "stations": [{"id": "gs1", "lat_deg": 48.0, "lon_deg": 11.0}],
    "targets": [{"id": "t1", "kind": "monitoring",
                 "lat_deg": 40.0, "lon_deg": -75.0}],
    "requests": [],
    "station_pairs": [],
}
scenario = scenario_from_dict(doc)
session = Session(scenario)

# ----------------------------------------------------------------------
# 2. Find a real pass and stage an observation inside it.  Ids are
#    assigned by the session (a0001, a0002, ...).
# ----------------------------------------------------------------------
target = scenario.targets["t1"]
window = session.cache.windows_point("sat1", "t1", target.point,
                                     target.min_elevation)[0]
mid = (window.start + window.end) / 2.0
action_id, report = session.stage_action(Action(
    "", "observe", "sat1", "t1", mid - 30.0, mid + 30.0))
print(f"staged {action_id}: verdict {report.verdict}")

# ----------------------------------------------------------------------
# 3. Invalid actions bounce with a full findings list and the registry
#    stays untouched.  Here: an observation after the window closes.
# ----------------------------------------------------------------------
bad_id, report = session.stage_action(Action(
    "", "observe", "sat1", "t1", window.end + 600.0, window.end + 700.0))
print(f"rejected stage: verdict {report.verdict}")
for finding in report.findings:
    print(f"  [{finding.constraint}] {finding.message}")
print(f"registry still holds {sorted(session.actions)}")

# ----------------------------------------------------------------------
# 4. Persistence is atomic (write, fsync, rename): a crash at any point
#    leaves either the previous state or the new one, never a torn file.
# ----------------------------------------------------------------------
state_path = os.path.join(tempfile.mkdtemp(), "walkthrough.state.json")
session.persist(state_path)
restored = Session(scenario)
restored.restore(state_path)
print(f"restored actions: {sorted(restored.actions)}")

# ----------------------------------------------------------------------
# 5. Committing freezes the session; the plan is now scoreable and any
#    further mutation raises SessionCommittedError.
# ----------------------------------------------------------------------
committed = session.commit()
print(f"committed {len(committed)} action(s); "
      f"statuses {[a.status for a in committed]}")
