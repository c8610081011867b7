"""Batch execution of landing scenarios with per-repeat seeding.

The config file is versioned JSON; every scenario cell runs ``repeats``
times with seed = base + repeat index. Runs fan out to a process pool and
aggregation is a deterministic reduce ordered by (scenario, repeat).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controllers import dump_gain_csv
from .errors import SimulationDivergedError
from .metrics import Aggregate, ScenarioMetrics, extract_metrics
from .sim import (
    DisturbanceSpec,
    ScenarioSpec,
    Terrain,
    build_controller,
    CoupledModel,
    run_scenario,
)
from .params import default_params

SCHEMA_VERSION = 1


@dataclass
class BatchScenario:
    """One config-file scenario cell."""

    name: str
    slope_deg: float = 10.0
    controller: str = "proposed"
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    repeats: int = 1
    seed_base: int = 0
    target: tuple = (1.2, 0.0)
    duration: float = 12.0
    descent_speed: float = 0.3
    runout: bool = False

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be >= 1, got {self.repeats}")

    def spec_for_repeat(self, repeat: int, seed_override=None) -> ScenarioSpec:
        base = self.seed_base if seed_override is None else seed_override
        return ScenarioSpec(
            name=f"{self.name}-r{repeat}",
            slope_deg=self.slope_deg,
            controller=self.controller,
            disturbance=self.disturbance,
            seed=base + repeat,
            target_x=self.target[0],
            target_y=self.target[1],
            duration=self.duration,
            descent_speed=self.descent_speed,
            runout=self.runout,
        )


class ConfigError(ValueError):
    """Config file failed validation; message carries the field path."""


def _expect(cond, path, msg):
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def load_config(path) -> list:
    """Parse and validate a batch config file."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path}:{err.lineno}: invalid JSON ({err.msg})") from err
    _expect(isinstance(raw, dict), "<root>", "expected an object")
    _expect(raw.get("schema_version") == SCHEMA_VERSION, "schema_version",
            f"expected {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    scenarios_raw = raw.get("scenarios")
    _expect(isinstance(scenarios_raw, list), "scenarios", "expected a list")
    out = []
    for i, item in enumerate(scenarios_raw):
        path_i = f"scenarios[{i}]"
        _expect(isinstance(item, dict), path_i, "expected an object")
        _expect("name" in item, path_i, "missing 'name'")
        dist_raw = item.get("disturbance", {"kind": "none"})
        _expect(isinstance(dist_raw, dict), f"{path_i}.disturbance",
                "expected an object")
        try:
            dist = DisturbanceSpec(
                kind=dist_raw.get("kind", "none"),
                magnitude=float(dist_raw.get("magnitude_n", 0.0)),
                hold_interval=float(dist_raw.get("hold_interval_s", 0.5)),
            )
        except ValueError as err:
            raise ConfigError(f"{path_i}.disturbance: {err}") from err
        try:
            scenario = BatchScenario(
                name=str(item["name"]),
                slope_deg=float(item.get("slope_deg", 10.0)),
                controller=str(item.get("controller", "proposed")),
                disturbance=dist,
                repeats=int(item.get("repeats", 1)),
                seed_base=int(item.get("seed_base", 0)),
                target=tuple(item.get("target", (1.2, 0.0))),
                duration=float(item.get("duration_s", 12.0)),
                descent_speed=float(item.get("descent_speed", 0.3)),
                runout=bool(item.get("runout", False)),
            )
        except (TypeError, ValueError) as err:
            raise ConfigError(f"{path_i}: {err}") from err
        out.append(scenario)
    return out


def _run_one(args):
    scenario, repeat, out_dir, seed_override = args
    spec = scenario.spec_for_repeat(repeat, seed_override)
    try:
        log = run_scenario(spec)
    except SimulationDivergedError as err:
        partial = err.partial_log
        metrics = ScenarioMetrics(diverged=True)
        if partial is not None and out_dir is not None:
            partial.to_csv(Path(out_dir) / f"{spec.name}.csv")
        return scenario.name, repeat, metrics, None
    metrics = extract_metrics(log)
    csv_path = None
    if out_dir is not None:
        csv_path = Path(out_dir) / f"{spec.name}.csv"
        log.to_csv(csv_path)
    return scenario.name, repeat, metrics, str(csv_path) if csv_path else None


@dataclass
class BatchResult:
    aggregates: dict            # scenario name -> Aggregate
    per_run: list               # (scenario, repeat, ScenarioMetrics)
    all_complete: bool
    report_path: str | None = None

    def summary(self) -> dict:
        return {name: agg.summary() for name, agg in self.aggregates.items()}


def run_batch(scenarios, out_dir=None, jobs: int = 1,
              seed_override=None) -> BatchResult:
    """Run every scenario x repeat; write logs, metrics JSON and the
    comparison table under ``out_dir`` when given."""
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _dump_gains(scenarios, out_dir)
    tasks = [
        (sc, rep, str(out_dir) if out_dir else None, seed_override)
        for sc in scenarios for rep in range(sc.repeats)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, tasks))
    else:
        results = [_run_one(task) for task in tasks]

    results.sort(key=lambda r: ([sc.name for sc in scenarios].index(r[0]), r[1]))
    aggregates: dict = {}
    per_run = []
    for name, repeat, metrics, _ in results:
        aggregates.setdefault(name, Aggregate()).add(metrics)
        per_run.append((name, repeat, metrics))
    all_complete = all(m.complete and not m.diverged for _, _, m in per_run)

    result = BatchResult(aggregates, per_run, all_complete)
    if out_dir is not None:
        payload = {
            "schema_version": SCHEMA_VERSION,
            "scenarios": result.summary(),
            "per_run": [
                {"scenario": name, "repeat": rep, **m.as_dict()}
                for name, rep, m in per_run
            ],
        }
        metrics_path = out_dir / "metrics.json"
        metrics_path.write_text(json.dumps(payload, indent=2, allow_nan=True))
        table = comparison_table(result)
        (out_dir / "comparison.txt").write_text(table)
        result.report_path = str(metrics_path)
    return result


def _dump_gains(scenarios, out_dir: Path) -> None:
    done = set()
    for sc in scenarios:
        if sc.controller != "proposed" or sc.slope_deg in done:
            continue
        done.add(sc.slope_deg)
        terrain = Terrain(math.radians(sc.slope_deg))
        params = default_params()
        model = CoupledModel(params, terrain)
        controller = build_controller("proposed", params, terrain, model)
        dump_gain_csv(controller.gain,
                      out_dir / f"gains_slope{sc.slope_deg:g}.csv")


def comparison_table(result: BatchResult) -> str:
    """Plain-text comparison of the scenario cells (landing time, offsets)."""
    header = (f"{'Scenario':32s} {'Landing Time':>13s} {'Offset mean':>12s} "
              f"{'Offset var':>11s} {'Stroke peak':>12s} {'Pitch ovs':>10s}")
    lines = [header, "-" * len(header)]
    for name, agg in result.aggregates.items():
        s = agg.summary()

        def cell(key, fmt="{:.2f}"):
            if key not in s:
                return "n/a"
            return fmt.format(s[key]["mean"])

        var = "n/a"
        if "landing_offset_mm" in s:
            var = "{:.1f}".format(s["landing_offset_mm"]["variance"])
        lines.append(
            f"{name:32s} {cell('landing_time_s'):>12s}s "
            f"{cell('landing_offset_mm'):>10s}mm "
            f"{var:>11s} "
            f"{cell('peak_suspension_stroke_mm'):>10s}mm "
            f"{cell('pitch_overshoot_deg'):>7s}deg"
        )
    return "\n".join(lines) + "\n"
