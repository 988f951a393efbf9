"""astsched: physics-grounded satellite mission-planning environment.

Subpackages:

- astrodynamics: TLE parsing, SGP4 propagation, visibility geometry
- attitude: agile-body kinematics and slew feasibility
- resource_sim: energy/storage/terminal-capacity timelines
- coverage_geom: polygon areas, swath footprints, stereo doublets
- netgraph: time-varying contact graphs and relay latency
- scenario: scenario documents, staged-action sessions, persistence
- evaluators: the five benchmark scoring functions
- baselines: greedy and simulated-annealing reference solvers
- scenegen: procedural scenario generation
- toolserver: JSON-RPC stdio tool server and batch CLI
"""

__version__ = "0.1.0"
