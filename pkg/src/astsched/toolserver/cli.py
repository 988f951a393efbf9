"""Batch command line: generate / validate / solve / evaluate / serve /
windows.  All outputs are JSON, written to a file or stdout; exit code 0
on success, 1 on a domain error, 2 on a usage error."""

from __future__ import annotations

import argparse
import json
import sys

from ..baselines import SAParams, greedy_schedule, sa_schedule
from ..errors import AstschedError
from ..evaluators import evaluate
from ..scenario import (
    GeometryCache,
    load_plan,
    load_scenario,
    plan_to_dict,
    save_scenario,
    validate_plan,
)
from ..scenegen import GenConfig, generate
from .server import serve


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out and out != "-":
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_generate(args) -> int:
    config = GenConfig(
        benchmark_kind=args.kind, archetype=args.archetype,
        n_satellites=args.n_satellites, n_targets=args.n_targets,
        n_polygons=args.n_polygons, n_pairs=args.n_pairs,
        n_missions=args.n_missions, epoch_anchor=args.anchor,
        horizon=args.horizon, seed=args.seed,
    )
    scenario = generate(config)
    if args.out and args.out != "-":
        save_scenario(scenario, args.out)
    else:
        from ..scenario import scenario_to_dict
        _emit(scenario_to_dict(scenario), None)
    return 0


def _cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    _, actions, strips = load_plan(args.plan)
    report = validate_plan(scenario, actions, strips)
    _emit(report.to_dict(), args.out)
    return 0 if report.verdict == "valid" else 1


def _cmd_solve(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.algo == "greedy":
        result = greedy_schedule(scenario, time_budget_s=args.time_budget)
    else:
        result = sa_schedule(scenario, SAParams(
            seed=args.seed, iterations=args.iterations,
            time_budget_s=args.time_budget))
    _emit(plan_to_dict(scenario.id, result.actions, result.strips), args.out)
    if args.metrics_out:
        _emit(result.metrics.to_dict(), args.metrics_out)
    return 0


def _cmd_evaluate(args) -> int:
    scenario = load_scenario(args.scenario)
    _, actions, strips = load_plan(args.plan)
    report = evaluate(scenario, actions, strips)
    _emit(report.to_dict(), args.out)
    return 0


def _cmd_windows(args) -> int:
    scenario = load_scenario(args.scenario)
    cache = GeometryCache(scenario)
    sats = [args.satellite] if args.satellite else sorted(scenario.satellites)
    out: dict = {"scenario_id": scenario.id, "windows": []}
    for sat_id in sats:
        if sat_id not in scenario.satellites:
            raise AstschedError(f"unknown satellite '{sat_id}'")
        counterparts = []
        for t in scenario.targets.values():
            if t.point is not None:
                counterparts.append((t.id, t.point, t.min_elevation))
        for g in scenario.stations.values():
            counterparts.append((g.id, g.point, g.min_elevation))
        if args.counterpart:
            counterparts = [c for c in counterparts if c[0] == args.counterpart]
        for cp_id, point, mask in counterparts:
            for w in cache.windows_point(sat_id, cp_id, point, mask):
                out["windows"].append({
                    "satellite_id": sat_id, "counterpart_id": cp_id,
                    "start_s": w.start, "end_s": w.end,
                    "peak_elevation_deg": w.peak_elevation,
                })
    _emit(out, args.out)
    return 0


def _cmd_serve(args) -> int:
    serve(args.scenario, args.state)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="astsched",
        description="Satellite mission planning: scenario generation, plan "
                    "validation, baseline solvers, scoring, and the tool "
                    "server.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a scenario")
    p.add_argument("--kind", required=True,
                   choices=["satnet", "revisit", "regional", "stereo", "latency"])
    p.add_argument("--archetype", default="iss_band")
    p.add_argument("--n-satellites", type=int, default=10)
    p.add_argument("--n-targets", type=int, default=None)
    p.add_argument("--n-polygons", type=int, default=2)
    p.add_argument("--n-pairs", type=int, default=2)
    p.add_argument("--n-missions", type=int, default=4)
    p.add_argument("--anchor", default="2025-07-17T12:00:00Z")
    p.add_argument("--horizon", type=float, default=345600.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("validate", help="validate a plan against a scenario")
    p.add_argument("scenario")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("solve", help="run a baseline solver")
    p.add_argument("scenario")
    p.add_argument("--algo", choices=["greedy", "sa"], default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=20000)
    p.add_argument("--time-budget", type=float, default=1200.0)
    p.add_argument("--out", "-o", default="-")
    p.add_argument("--metrics-out", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("evaluate", help="score a plan")
    p.add_argument("scenario")
    p.add_argument("--plan", required=True)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("windows", help="dump access windows")
    p.add_argument("scenario")
    p.add_argument("--satellite", default=None)
    p.add_argument("--counterpart", default=None)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=_cmd_windows)

    p = sub.add_parser("serve", help="run the JSON-RPC tool server on stdio")
    p.add_argument("scenario")
    p.add_argument("--state", default=None)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AstschedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
