"""Command-line front end.

Exit codes: 0 success, 2 usage or configuration error, 3 safety violation
(collision in a simulation, failed soundness/safety check in ``verify``),
1 any other failed verification check.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import geometry as geo
from .ellipse import HorizonEllipse, ellipse_area_first_quadrant, min_ellipse_params
from .errors import ConfigError, DomainError
from .export import time_tag, write_ellipse_boundary, write_ellipse_table, write_polyline_csv, write_table
from .sim import GoToGoal, RobotState, plan_tick, run_scenario
from .sim.config import load_config
from .sim.model import fmt
from .verify import SAFETY_SUITES, SUITES, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SAFETY = 0, 1, 2, 3
OUT_ENV = "SAFE_HORIZON_OUT"


class UsageError(Exception):
    pass


def _positive_times(values: Sequence[str]) -> list[float]:
    out = []
    for raw in values:
        try:
            t = float(raw)
        except ValueError:
            raise UsageError(f"--t: not a number: {raw!r}") from None
        if not (t > 0 and math.isfinite(t)):
            raise UsageError(f"--t: time must be positive and finite, got {raw}")
        out.append(t)
    return out


def output_dir(args) -> Path:
    """``--out`` wins, then ``$SAFE_HORIZON_OUT``, then the working directory."""
    raw = args.out or os.environ.get(OUT_ENV) or "."
    path = Path(raw)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_ellipse(args) -> int:
    times = _positive_times(args.t)
    out = output_dir(args)
    write_ellipse_table(out / "ellipse_params.csv", times)
    for t in times:
        A, B = min_ellipse_params(t)
        write_ellipse_boundary(out / f"ellipse_t{time_tag(t)}.csv", HorizonEllipse.at(t))
        print(f"t={fmt(t)} A={fmt(A)} B={fmt(B)}")
    return EXIT_OK


def cmd_hull(args) -> int:
    times = _positive_times(args.t)
    out = output_dir(args)
    for t in times:
        write_polyline_csv(out / f"hull_t{time_tag(t)}.csv", geo.hull_boundary_polyline(t))
        write_polyline_csv(out / f"kset_t{time_tag(t)}.csv", geo.kset_boundary_polyline(t))
        print(f"t={fmt(t)} alpha={fmt(float(geo.alpha(t)))}")
    return EXIT_OK


def _quadrant_areas(t: float) -> tuple[float, float, float]:
    if t > geo.HALF_PI:
        hull, kset = geo.hull_area_first_quadrant(t), geo.kset_area_first_quadrant(t)
    else:
        hull, kset = geo.hull_area_first_quadrant_sampled(t), geo.kset_area_first_quadrant_sampled(t)
    return hull, kset, ellipse_area_first_quadrant(t)


def cmd_jaccard(args) -> int:
    times = _positive_times(args.t)
    rows = []
    for t in times:
        hull, kset, ell = _quadrant_areas(t)
        dk, de = geo.jaccard_nested(hull, kset), geo.jaccard_nested(hull, ell)
        rows.append((t, hull, kset, ell, dk, de))
        print(f"t={fmt(t)} d_J(hull,K)={fmt(dk)} d_J(hull,ellipse)={fmt(de)}")
    write_table(
        output_dir(args) / "jaccard.csv",
        ["t", "hull_area", "kset_area", "ellipse_area", "dj_hull_kset", "dj_hull_ellipse"],
        rows,
    )
    return EXIT_OK


def _load(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.failure = replace(cfg.failure, seed=args.seed)
    return cfg


def cmd_safetime(args) -> int:
    cfg = _load(args)
    world = {i: RobotState(i, spec.pose) for i, spec in enumerate(cfg.robots)}
    cmds, results = plan_tick(world, cfg, 0, GoToGoal(cfg))
    rows = []
    for i in sorted(results):
        r = results[i]
        lim = "" if r.limiting_neighbor is None else r.limiting_neighbor
        rows.append((i, cmds[i].linear, cmds[i].angular, r.horizon, lim, int(r.capped)))
        print(f"robot {i}: v={fmt(cmds[i].linear)} omega={fmt(cmds[i].angular)} "
              f"horizon={fmt(r.horizon)} limiting={lim if lim != '' else '-'}")
    write_table(output_dir(args) / "safetime.csv",
                ["robot_id", "v", "omega", "horizon", "limiting_neighbor", "capped"], rows)
    return EXIT_OK


def _round9(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {str(k): _round9(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round9(v) for v in obj]
    return obj


def cmd_simulate(args) -> int:
    cfg = _load(args)
    if args.baseline:
        cfg.use_horizons = False
    log = run_scenario(cfg)
    out = output_dir(args)
    log.write_csv(out / "simulation_log.csv")
    summary = log.summary()
    summary["use_horizons"] = cfg.use_horizons
    summary["seed"] = cfg.failure.seed
    with open(out / "summary.json", "w") as fh:
        json.dump(_round9(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"collisions={summary['collisions']} min_pair_distance={fmt(summary['min_pair_distance'])}")
    for o in summary["outages"]:
        print(f"outage robot {o['robot_id']} [{fmt(o['start'])}, {fmt(o['end'])}): distance={fmt(o['distance'])}")
    if summary["collisions"]:
        print("safety violation: collision detected", file=sys.stderr)
        return EXIT_SAFETY
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_suite(args.suite, runs=args.runs, seed=args.seed if args.seed is not None else 7)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if not failed:
        return EXIT_OK
    if any(c.name.split(".")[0] in SAFETY_SUITES for c in failed):
        return EXIT_SAFETY
    return EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help=f"output directory (default ${OUT_ENV} or the working directory)")
    p = argparse.ArgumentParser(prog="safe-horizon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    for name, fn, default in (
        ("ellipse", cmd_ellipse, None),
        ("hull", cmd_hull, None),
        ("jaccard", cmd_jaccard, ["2", "3.14159265358979", "5", "10", "25"]),
    ):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--t", nargs="+", required=default is None, default=default, metavar="T")
        s.set_defaults(func=fn)

    for name, fn in (("safetime", cmd_safetime), ("simulate", cmd_simulate)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--config", required=True)
        s.add_argument("--seed", type=int, help="override the failure-model seed")
        if name == "simulate":
            s.add_argument("--baseline", action="store_true", help="send zero horizons (stop on any loss)")
        s.set_defaults(func=fn)

    s = sub.add_parser("verify", parents=[common])
    s.add_argument("suite", choices=[*SUITES, "all"])
    s.add_argument("--runs", type=int, default=100)
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
