"""Scenario metric extraction from simulation logs."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PLAN_EVENT = "mode:hovering->trajectory_planning"
TOUCHDOWN_EVENT = "touchdown"
STROKE_COLUMNS = ("stroke_fl", "stroke_fr", "stroke_rl", "stroke_rr")
CONVERGENCE_BAND = 0.05  # of the peak stroke deviation


@dataclass
class ScenarioMetrics:
    """Landing quality numbers for one run."""

    landing_time: float = math.nan        # s, plan entry to confirmed touchdown
    landing_offset: float = math.nan      # mm, horizontal CoM error at touchdown
    peak_suspension_stroke: float = math.nan   # mm, deviation from settled
    stroke_convergence_time: float = math.nan  # s, into the 5 % band
    pitch_overshoot: float = math.nan     # deg, post-contact swing past final
    complete: bool = False
    diverged: bool = False

    def as_dict(self) -> dict:
        return {
            "landing_time_s": self.landing_time,
            "landing_offset_mm": self.landing_offset,
            "peak_suspension_stroke_mm": self.peak_suspension_stroke,
            "stroke_convergence_time_s": self.stroke_convergence_time,
            "pitch_overshoot_deg": self.pitch_overshoot,
            "complete": self.complete,
            "diverged": self.diverged,
        }


def extract_metrics(log, target=None) -> ScenarioMetrics:
    """Compute landing metrics from a SimLog-like object.

    Needs a confirmed touchdown event; otherwise the result is flagged
    incomplete. Stroke and pitch transients are measured from first wheel
    contact, which precedes the confirmed touchdown.
    """
    out = ScenarioMetrics(diverged=getattr(log, "diverged", False))
    t_plan = log.event_time(PLAN_EVENT)
    t_td = log.event_time(TOUCHDOWN_EVENT)
    if t_td is None or t_plan is None:
        return out

    t = log.column("t")
    if target is None:
        target = log.target
    i_td = int(np.searchsorted(t, t_td))
    i_td = min(i_td, len(t) - 1)

    fn = log.column("fn_total")
    contact_idx = np.flatnonzero(fn > 0.0)
    i_fc = int(contact_idx[0]) if len(contact_idx) else i_td

    x = log.column("x")
    y = log.column("y")
    out.landing_time = float(t_td - t_plan)
    out.landing_offset = 1000.0 * math.hypot(
        float(x[i_td]) - float(target[0]), float(y[i_td]) - float(target[1]))

    strokes = np.stack([log.column(c) for c in STROKE_COLUMNS])
    dev = np.abs(strokes[:, i_fc:])
    peak = float(np.max(dev)) if dev.size else 0.0
    out.peak_suspension_stroke = 1000.0 * peak

    # convergence: last time any corner leaves the band around its final value
    tail = strokes[:, -min(200, strokes.shape[1]):]
    final = tail.mean(axis=1, keepdims=True)
    banded = np.abs(strokes[:, i_fc:] - final) > CONVERGENCE_BAND * max(peak, 1e-9)
    outside = np.flatnonzero(np.any(banded, axis=0))
    if len(outside) == 0:
        out.stroke_convergence_time = 0.0
    else:
        last = i_fc + int(outside[-1]) + 1
        last = min(last, len(t) - 1)
        out.stroke_convergence_time = float(t[last] - t[i_fc])

    pitch = np.degrees(log.column("pitch"))
    pitch_final = float(np.mean(pitch[-min(200, len(pitch)):]))
    out.pitch_overshoot = float(np.max(np.abs(pitch[i_fc:] - pitch_final)))
    out.complete = True
    return out


@dataclass
class Aggregate:
    """Mean and variance of per-repeat metrics for one scenario cell."""

    values: dict = field(default_factory=dict)   # metric -> list
    n_complete: int = 0
    n_failed: int = 0

    def add(self, metrics: ScenarioMetrics) -> None:
        if not metrics.complete:
            self.n_failed += 1
            return
        self.n_complete += 1
        for key, val in metrics.as_dict().items():
            if isinstance(val, bool):
                continue
            self.values.setdefault(key, []).append(val)

    def summary(self) -> dict:
        out = {"n_complete": self.n_complete, "n_failed": self.n_failed}
        for key, vals in self.values.items():
            arr = np.asarray(vals, dtype=float)
            out[key] = {
                "mean": float(arr.mean()),
                "variance": float(arr.var()),
                "values": [float(v) for v in arr],
            }
        return out
