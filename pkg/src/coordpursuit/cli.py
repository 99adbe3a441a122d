"""``coordpursuit`` command line: run a scenario, print its parameters, run the battery."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace
from pathlib import Path

from . import harness
from . import scenario as scenario_io
from .core import validate
from .engine import Simulation
from .errors import ConfigError, GameError
from .evader import POLICY_KINDS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VIOLATION = 2
EXIT_NO_CAPTURE = 3


def _write_atomic(path: str, text: str) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, p)


def _load(path: str) -> scenario_io.Scenario:
    try:
        return scenario_io.load(path)
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: no such file") from exc


def cmd_run(args) -> int:
    sc = _load(args.scenario)
    if args.dt is not None:
        sc = replace(sc, config=replace(sc.config, dt=args.dt))
    if args.evader is not None:
        sc = replace(sc, evader=json.loads(args.evader) if args.evader.startswith("{") else {"kind": args.evader})
    sim = Simulation(sc.config, sc.evader, exploratory=sc.exploratory, stop_rule=sc.stop_rule)
    trace, report = sim.run()
    if args.trace:
        _write_atomic(args.trace, trace.to_ndjson())
    if args.csv:
        _write_atomic(args.csv, trace.to_csv())
    doc = report.to_dict()
    doc["events"] = trace.events_dicts()
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.report:
        _write_atomic(args.report, text)
    if report.captured:
        print(f"captured by pursuer {report.capturing_pursuer} at t={report.capture_time:.6g} "
              f"(bound {report.T_bound + report.dt:.6g})")
    else:
        print(f"no capture by t={report.T_bound + report.dt:.6g}")
    if report.guarantee_violated:
        print("capture guarantee violated", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK if report.captured else EXIT_NO_CAPTURE


def cmd_params(args) -> int:
    sc = _load(args.scenario)
    d = validate(sc.config, exploratory=sc.exploratory)
    summary = d.summary()
    if args.json:
        print(json.dumps(summary, indent=2, sort_keys=True))
        return EXIT_OK
    print(f"axis_j      {d.axis_j}{'' if d.hypothesis_holds else '  (condition fails: exploratory)'}")
    print(f"d           {d.d!r}")
    print(f"c           {d.c!r}")
    print(f"T_pre       {d.T_pre!r}")
    for i in range(d.m):
        print(f"pursuer {i + 1}   sigma_i1^2={d.sigma_i1_sq[i]!r}  t_i1={d.t_i1[i]!r}  t_i2={d.t_i2[i]!r}")
    print(f"T_bound     {d.T_bound!r}")
    print(f"dt          {d.dt!r}")
    return EXIT_OK


def cmd_verify(args) -> int:
    policies = args.policies.split(",") if args.policies else None
    specs = harness.policy_specs(policies)
    scenarios = harness.sample_scenarios(args.n, args.seed)
    if args.pinned:
        scenarios = harness.pinned_scenarios() + scenarios
    rep = harness.run_battery(scenarios, specs, out_dir=args.out)
    summary = rep.summary()
    print(json.dumps(summary, indent=2, default=str))
    if args.out:
        harness.write_summary(rep, Path(args.out) / "summary.json")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coordpursuit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="simulate one scenario")
    r.add_argument("scenario")
    r.add_argument("--dt", type=float, default=None, help="override the time step")
    r.add_argument("--evader", default=None,
                   help=f"override the evader: one of {', '.join(POLICY_KINDS)} or a JSON object")
    r.add_argument("--trace", metavar="PATH", help="write the per-step trace as NDJSON")
    r.add_argument("--csv", metavar="PATH", help="write the per-step trace as CSV")
    r.add_argument("--report", metavar="PATH", help="write the capture report as JSON")
    r.set_defaults(func=cmd_run)

    q = sub.add_parser("params", help="print derived quantities without simulating")
    q.add_argument("scenario")
    q.add_argument("--json", action="store_true")
    q.set_defaults(func=cmd_params)

    v = sub.add_parser("verify", help="run the randomized battery")
    v.add_argument("--n", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--policies", default=None, help="comma-separated evader kinds (default: all)")
    v.add_argument("--out", default=None, help="directory for failing scenarios and summary.json")
    v.add_argument("--pinned", action="store_true", help="also run the pinned scenarios")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GameError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
