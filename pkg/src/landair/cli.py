"""Command-line harness: batch runs, metric extraction, planner inspection."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .batch import ConfigError, load_config, run_batch
from .errors import LogSchemaError, TrajectoryInfeasibleError
from .jlt import AxisBoundary, MotionLimits, plan_axis
from .metrics import extract_metrics
from .sim import LOG_COLUMNS

DEFAULT_OUT_ENV = "LANDAIR_OUT"


class CsvLogView:
    """Read-only SimLog interface over an exported CSV file."""

    def __init__(self, path):
        lines = Path(path).read_text().splitlines()
        idx = 0
        self.header_comment = ""
        if lines and lines[0].startswith("#"):
            self.header_comment = lines[0]
            idx = 1
        if idx >= len(lines) or lines[idx] != LOG_COLUMNS:
            found = lines[idx] if idx < len(lines) else "<missing>"
            raise LogSchemaError(_column_diff(found))
        keys = LOG_COLUMNS.split(",")
        self.rows = {k: [] for k in keys}
        for line in lines[idx + 1:]:
            parts = line.split(",")
            for k, v in zip(keys, parts):
                self.rows[k].append(v if k in ("mode", "event") else float(v))
        self.events = []
        for t, ev in zip(self.rows["t"], self.rows["event"]):
            if ev:
                for part in ev.split(";"):
                    self.events.append((t, part))
        self.target = self._parse_target()
        self.diverged = False

    def _parse_target(self):
        marker = "target=("
        if marker in self.header_comment:
            body = self.header_comment.split(marker, 1)[1].rstrip(")")
            vals = [float(v) for v in body.split(",")[:3]]
            return np.array(vals)
        return np.zeros(3)

    def column(self, name):
        vals = self.rows[name]
        if name in ("mode", "event"):
            return np.array(vals, dtype=object)
        return np.array(vals, dtype=float)

    def event_time(self, name):
        for t, ev in self.events:
            if ev == name:
                return t
        return None


def _column_diff(found: str) -> str:
    expected = LOG_COLUMNS.split(",")
    got = found.split(",")
    missing = [c for c in expected if c not in got]
    extra = [c for c in got if c not in expected]
    return (f"log columns do not match the frozen schema; "
            f"missing={missing} unexpected={extra}")


def _cmd_run(args) -> int:
    try:
        scenarios = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    out_dir = args.out or os.environ.get(DEFAULT_OUT_ENV) or "landair-out"
    result = run_batch(scenarios, out_dir=out_dir, jobs=args.jobs,
                       seed_override=args.seed)
    print(Path(out_dir, "comparison.txt").read_text())
    print(f"metrics: {result.report_path}")
    if not result.all_complete:
        failed = [(n, r) for n, r, m in result.per_run
                  if not m.complete or m.diverged]
        print(f"{len(failed)} run(s) incomplete or diverged: {failed}",
              file=sys.stderr)
        return 1
    return 0


def _cmd_metrics(args) -> int:
    try:
        view = CsvLogView(args.log)
    except LogSchemaError as err:
        print(f"schema error: {err}", file=sys.stderr)
        return 2
    metrics = extract_metrics(view)
    print(json.dumps(metrics.as_dict(), indent=2))
    return 0 if metrics.complete else 1


def _cmd_plan(args) -> int:
    parts = [float(v) for v in args.axis.split(",")]
    if len(parts) not in (6, 7):
        print("expected p0,v0,a0,pT,vT,aT[,T]", file=sys.stderr)
        return 2
    duration = parts[6] if len(parts) == 7 else None
    boundary = AxisBoundary(parts[0], parts[1], parts[2], parts[3], parts[4],
                            parts[5], duration=duration)
    lim = MotionLimits(v_max=args.v_max, j_max=args.j_max)
    try:
        traj = plan_axis(boundary, lim)
    except TrajectoryInfeasibleError as err:
        print(f"infeasible ({err.binding}): {err}", file=sys.stderr)
        return 1
    print(f"duration: {traj.duration:.6f} s"
          + (" (extended)" if traj.extended else ""))
    print(f"cost (squared jerk / T): {traj.cost:.6f}")
    print(f"peak |velocity|: {traj.max_abs_velocity():.6f} m/s")
    print(f"peak |jerk|: {traj.max_abs_jerk():.6f} m/s^3")
    sample = traj.sample(args.rate)
    print("t,p,v,a,j")
    for row in zip(sample["t"], sample["p"], sample["v"], sample["a"], sample["j"]):
        print(",".join(f"{v:.6f}" for v in row))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="landair",
        description="Land-air robot landing simulator and batch harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a batch of scenarios")
    p_run.add_argument("--config", required=True, help="scenario JSON file")
    p_run.add_argument("--out", default=None,
                       help=f"output directory (default ${DEFAULT_OUT_ENV})")
    p_run.add_argument("--jobs", type=int, default=1, help="worker processes")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override every scenario's seed base")
    p_run.set_defaults(func=_cmd_run)

    p_met = sub.add_parser("metrics", help="extract metrics from a log CSV")
    p_met.add_argument("--log", required=True)
    p_met.set_defaults(func=_cmd_metrics)

    p_plan = sub.add_parser("plan", help="inspect a single-axis plan")
    p_plan.add_argument("--axis", required=True,
                        help="p0,v0,a0,pT,vT,aT[,T]")
    p_plan.add_argument("--v-max", type=float, default=3.0)
    p_plan.add_argument("--j-max", type=float, default=80.0)
    p_plan.add_argument("--rate", type=float, default=50.0)
    p_plan.set_defaults(func=_cmd_plan)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
