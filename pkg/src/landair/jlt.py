"""Jerk-limited per-axis trajectory generation for take-off and landing.

Each axis is a triple integrator driven by jerk. With no state constraint
active the minimum of the normalized squared-jerk cost under full terminal
state equality is the analytic quintic. When the velocity bound activates,
the plan switches to an entry arc / cruise / exit arc structure whose arc
durations are optimized numerically; when even that cannot satisfy the
bounds within the requested duration, the duration is extended by bisection
to the shortest feasible one and the result is flagged.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import TrajectoryInfeasibleError
from .params import FlightParams

# weight on duration when the caller leaves T free
DEFAULT_DURATION_WEIGHT = 10.0

# internal feasibility sampling rate (Hz); twice the rate the invariants use
_CHECK_RATE = 2000.0
_BOUND_TOL = 1e-9
_T_CAP = 120.0


@dataclass(frozen=True)
class MotionLimits:
    """Input and state bounds the planner must respect."""

    f_min: float = 30.0       # N, thrust floor
    f_max: float = 660.0      # N, thrust ceiling
    omega_max: float = 3.0    # rad/s, body-rate norm bound
    v_max: float = 3.0        # m/s, per-axis speed bound
    j_max: float = 20.0       # m/s^3, per-axis jerk bound

    def __post_init__(self):
        if not 0.0 <= self.f_min < self.f_max:
            raise ValueError(f"need 0 <= f_min < f_max, got [{self.f_min}, {self.f_max}]")
        if self.omega_max <= 0 or self.v_max <= 0 or self.j_max <= 0:
            raise ValueError("omega_max, v_max and j_max must be positive")


@dataclass(frozen=True)
class AxisBoundary:
    """Initial and terminal state for one axis; duration is free when None."""

    p0: float = 0.0
    v0: float = 0.0
    a0: float = 0.0
    pt: float = 0.0
    vt: float = 0.0
    at: float = 0.0
    duration: float | None = None

    def __post_init__(self):
        vals = (self.p0, self.v0, self.a0, self.pt, self.vt, self.at)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite boundary state {vals}")
        if self.duration is not None and not self.duration > 0:
            raise ValueError(f"fixed duration must be positive, got {self.duration}")

    @property
    def at_rest_at_target(self) -> bool:
        return (self.p0 == self.pt and self.v0 == 0.0 and self.vt == 0.0
                and self.a0 == 0.0 and self.at == 0.0)


class _Segment(NamedTuple):
    t0: float
    h: float
    c: np.ndarray  # ascending position coefficients in local time


def _polyval(c: np.ndarray, t):
    out = np.zeros_like(t) if isinstance(t, np.ndarray) else 0.0
    for coeff in c[::-1]:
        out = out * t + coeff
    return out


def _polyder(c: np.ndarray) -> np.ndarray:
    if len(c) <= 1:
        return np.zeros(1)
    return c[1:] * np.arange(1, len(c))


def _poly_max_abs(c: np.ndarray, c_der: np.ndarray, h: float) -> float:
    """Exact max of |poly(c)| over [0, h] via the roots of its derivative."""
    candidates = [0.0, h]
    trimmed = np.trim_zeros(c_der, "b")
    if len(trimmed) >= 2:
        roots = np.roots(trimmed[::-1])
        for r in roots:
            if abs(r.imag) < 1e-12 and -1e-12 <= r.real <= h + 1e-12:
                candidates.append(min(max(r.real, 0.0), h))
    return max(abs(float(_polyval(c, t))) for t in candidates)


class AxisTrajectory:
    """Piecewise-polynomial plan for one axis; position is C2 across joints."""

    def __init__(self, segments: Sequence[_Segment], extended: bool = False):
        if not segments:
            raise ValueError("trajectory needs at least one segment")
        self.segments = list(segments)
        self.duration = segments[-1].t0 + segments[-1].h
        self.extended = extended
        self._starts = np.array([s.t0 for s in self.segments])
        self._vel = [_polyder(s.c) for s in self.segments]
        self._acc = [_polyder(v) for v in self._vel]
        self._jrk = [_polyder(a) for a in self._acc]

    def _locate(self, t: float) -> tuple[int, float]:
        t = min(max(t, 0.0), self.duration)
        i = int(np.searchsorted(self._starts, t, side="right") - 1)
        i = max(0, min(i, len(self.segments) - 1))
        return i, t - self.segments[i].t0

    def position(self, t: float) -> float:
        i, tau = self._locate(t)
        return float(_polyval(self.segments[i].c, tau))

    def velocity(self, t: float) -> float:
        i, tau = self._locate(t)
        return float(_polyval(self._vel[i], tau))

    def acceleration(self, t: float) -> float:
        i, tau = self._locate(t)
        return float(_polyval(self._acc[i], tau))

    def jerk(self, t: float) -> float:
        i, tau = self._locate(t)
        return float(_polyval(self._jrk[i], tau))

    def state(self, t: float) -> tuple[float, float, float]:
        i, tau = self._locate(t)
        return (
            float(_polyval(self.segments[i].c, tau)),
            float(_polyval(self._vel[i], tau)),
            float(_polyval(self._acc[i], tau)),
        )

    def sample(self, rate: float) -> dict:
        n = max(2, int(round(self.duration * rate)) + 1)
        t = np.linspace(0.0, self.duration, n)
        return {
            "t": t,
            "p": np.array([self.position(v) for v in t]),
            "v": np.array([self.velocity(v) for v in t]),
            "a": np.array([self.acceleration(v) for v in t]),
            "j": np.array([self.jerk(v) for v in t]),
        }

    @property
    def jerk_integral(self) -> float:
        """Integral of squared jerk over the whole plan."""
        total = 0.0
        for seg, j in zip(self.segments, self._jrk):
            sq = np.convolve(j, j)
            powers = np.arange(1, len(sq) + 1)
            total += float(np.sum(sq * seg.h**powers / powers))
        return total

    @property
    def cost(self) -> float:
        """Duration-normalized squared-jerk cost."""
        return self.jerk_integral / self.duration

    def max_abs_velocity(self) -> float:
        """Exact peak |velocity|: evaluated at acceleration roots and joints."""
        return max(
            _poly_max_abs(self._vel[i], self._acc[i], seg.h)
            for i, seg in enumerate(self.segments)
        )

    def max_abs_jerk(self) -> float:
        """Exact peak |jerk| (piecewise quadratic: roots of its derivative)."""
        return max(
            _poly_max_abs(self._jrk[i], _polyder(self._jrk[i]), seg.h)
            for i, seg in enumerate(self.segments)
        )

    def within_limits(self, lim: MotionLimits, tol: float = _BOUND_TOL) -> bool:
        return (self.max_abs_velocity() <= lim.v_max + tol
                and self.max_abs_jerk() <= lim.j_max + tol)


def quintic_coefficients(b: AxisBoundary, duration: float) -> np.ndarray:
    """Unique quintic meeting all six boundary conditions."""
    h = float(duration)
    c0, c1, c2 = b.p0, b.v0, 0.5 * b.a0
    m = np.array(
        [
            [h**3, h**4, h**5],
            [3 * h**2, 4 * h**3, 5 * h**4],
            [6 * h, 12 * h**2, 20 * h**3],
        ]
    )
    rhs = np.array(
        [
            b.pt - (c0 + c1 * h + c2 * h * h),
            b.vt - (c1 + 2 * c2 * h),
            b.at - 2 * c2,
        ]
    )
    c3, c4, c5 = np.linalg.solve(m, rhs)
    return np.array([c0, c1, c2, c3, c4, c5])


def _quintic_trajectory(b: AxisBoundary, duration: float, extended=False) -> AxisTrajectory:
    return AxisTrajectory([_Segment(0.0, duration, quintic_coefficients(b, duration))],
                          extended=extended)


def _quintic_local(p0, v0, a0, p1, v1, a1, h) -> np.ndarray:
    """Interpolating quintic between full states, ascending local coefficients."""
    h2 = h * h
    h3 = h2 * h
    dp_ = p1 - p0 - v0 * h - 0.5 * a0 * h2
    dv_ = v1 - v0 - a0 * h
    da_ = a1 - a0
    c3 = (10 * dp_ - 4 * h * dv_ + 0.5 * h2 * da_) / h3
    c4 = (-15 * dp_ + 7 * h * dv_ - h2 * da_) / (h3 * h)
    c5 = (6 * dp_ - 3 * h * dv_ + 0.5 * h2 * da_) / (h3 * h2)
    return np.array([p0, v0, 0.5 * a0, c3, c4, c5])


def _jerk_cost_of(c, h: float) -> float:
    j0, j1, j2 = 6.0 * c[3], 24.0 * c[4], 60.0 * c[5]
    h2 = h * h
    h3 = h2 * h
    return (j0 * j0 * h + j0 * j1 * h2 + (j1 * j1 + 2.0 * j0 * j2) * h3 / 3.0
            + j1 * j2 * h3 * h / 2.0 + j2 * j2 * h3 * h2 / 5.0)


_VEL_GRID = np.linspace(0.0, 1.0, 29)


def _max_abs_vel_of(c, h: float) -> float:
    t = _VEL_GRID * h
    v = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * (5.0 * c[5]))))
    return float(np.max(np.abs(v)))


def _cruise_trajectory(b: AxisBoundary, duration: float, lim: MotionLimits,
                       cruise_v: float, extended=False) -> AxisTrajectory | None:
    """Quintic entry arc / cruise at the bound / quintic exit arc.

    Arc durations and the displacement split between the arcs are optimized;
    the structure matches the state-constrained optimum, where the boundary
    interval is ridden at v = +-v_max with zero acceleration and the
    off-boundary arcs are quintics. Returns None when no valid arrangement
    exists within the duration.
    """
    from scipy.optimize import minimize

    dp = b.pt - b.p0
    t_total = duration
    v_cap = abs(cruise_v)

    def inner(t1, t3):
        """Best displacement split for fixed arc durations.

        The unconstrained cost is exactly quadratic in the split, so its
        vertex comes from a three-point fit; if either arc then pokes past
        the bound, the split is bisected back to the arc's feasibility
        boundary (overshoot is monotone in the displacement pushed into an
        arc).
        """
        d_arcs = dp - cruise_v * (t_total - t1 - t3)

        def entry_over(d1):
            arc = _quintic_local(0.0, b.v0, b.a0, d1, cruise_v, 0.0, t1)
            return _max_abs_vel_of(arc, t1) - v_cap

        def exit_over(d1):
            arc = _quintic_local(0.0, cruise_v, 0.0, d_arcs - d1, b.vt, b.at, t3)
            return _max_abs_vel_of(arc, t3) - v_cap

        def raw_cost(d1):
            entry = _quintic_local(0.0, b.v0, b.a0, d1, cruise_v, 0.0, t1)
            exit_ = _quintic_local(0.0, cruise_v, 0.0, d_arcs - d1, b.vt, b.at, t3)
            return _jerk_cost_of(entry, t1) + _jerk_cost_of(exit_, t3)

        x0 = d_arcs * t1 / (t1 + t3)
        s = max(0.1 * abs(d_arcs), 0.05 * v_cap * (t1 + t3), 1e-4)
        f0, fp, fm = raw_cost(x0), raw_cost(x0 + s), raw_cost(x0 - s)
        denom = fp - 2.0 * f0 + fm
        d1 = x0 if abs(denom) < 1e-30 else x0 - s * (fp - fm) / (2.0 * denom)

        # trapezoid arc displacements approach the cruise speed monotonically
        # and serve as safe anchors; entry overshoot grows with d1, exit
        # overshoot shrinks with d1, so the feasible window is an interval
        d1_safe_entry = t1 * (b.v0 + cruise_v) / 2.0 + t1 * t1 * b.a0 / 12.0
        d1_safe_exit = d_arcs - (t3 * (cruise_v + b.vt) / 2.0 - t3 * t3 * b.at / 12.0)

        def bisect_edge(d_ok, d_bad, over_fn):
            for _ in range(40):
                mid = 0.5 * (d_ok + d_bad)
                if over_fn(mid) > 0.0:
                    d_bad = mid
                else:
                    d_ok = mid
            return d_ok

        hi = None
        if entry_over(d1) > 0.0:
            if entry_over(d1_safe_entry) > 0.0:
                return 1e30, 0.0
            hi = bisect_edge(d1_safe_entry, d1, entry_over)
        lo = None
        if exit_over(d1) > 0.0:
            if exit_over(d1_safe_exit) > 0.0:
                return 1e30, 0.0
            lo = bisect_edge(d1_safe_exit, d1, exit_over)
        if lo is not None and hi is not None and lo > hi:
            return 1e30, 0.0
        if hi is not None:
            d1 = min(d1, hi)
        if lo is not None:
            d1 = max(d1, lo)
        if entry_over(d1) > 1e-12 or exit_over(d1) > 1e-12:
            return 1e30, 0.0
        return raw_cost(d1), d1

    def objective(x):
        t1, t3 = x
        if t1 < 1e-4 or t3 < 1e-4 or t1 + t3 > t_total:
            return 1e30
        return inner(t1, t3)[0]

    # multiscale grid handles the kinked valleys where the overshoot walls
    # are active; a short simplex polish then tightens the smooth tail
    lo = np.array([0.01 * t_total, 0.01 * t_total])
    hi = np.array([0.95 * t_total, 0.95 * t_total])
    center = None
    best_val, best_x = math.inf, None
    for level in range(5):
        if center is not None:
            span = (hi - lo) * 0.35
            lo = np.maximum(center - span, 1e-4)
            hi = np.minimum(center + span, 0.98 * t_total)
        g1 = np.linspace(lo[0], hi[0], 7)
        g3 = np.linspace(lo[1], hi[1], 7)
        for a in g1:
            for c in g3:
                val = objective((a, c))
                if val < best_val:
                    best_val, best_x = val, np.array([a, c])
        if best_x is None:
            return None
        center = best_x
    if best_val >= 1e29:
        return None
    res = minimize(objective, best_x, method="Nelder-Mead",
                   options={"xatol": 1e-7 * t_total, "fatol": 1e-12,
                            "maxiter": 120})
    if res.fun < best_val:
        best_val, best_x = res.fun, res.x
    t1, t3 = best_x
    _, d1 = inner(t1, t3)
    tc = t_total - t1 - t3
    d_arcs = dp - cruise_v * tc

    segs = []
    entry = _quintic_local(b.p0, b.v0, b.a0, b.p0 + d1, cruise_v, 0.0, t1)
    segs.append(_Segment(0.0, t1, entry))
    p = b.p0 + d1
    t = t1
    if tc > 1e-12:
        segs.append(_Segment(t, tc, np.array([p, cruise_v])))
        p += cruise_v * tc
        t += tc
    exit_ = _quintic_local(p, cruise_v, 0.0, p + (d_arcs - d1), b.vt, b.at, t3)
    segs.append(_Segment(t, t3, exit_))
    traj = AxisTrajectory(segs, extended=extended)
    pos, vel, acc = traj.state(traj.duration)
    scale = max(1.0, abs(b.pt), abs(b.vt), abs(b.at))
    if (abs(pos - b.pt) > 1e-8 * scale or abs(vel - b.vt) > 1e-8 * scale
            or abs(acc - b.at) > 1e-8 * scale):
        return None
    return traj


def _build_feasible(b: AxisBoundary, duration: float, lim: MotionLimits,
                    extended=False) -> AxisTrajectory | None:
    traj = _quintic_trajectory(b, duration, extended=extended)
    if traj.within_limits(lim):
        return traj
    # velocity bound active: try the cruise structure at the dominant sign;
    # tiny arc overshoots past the bound are removed by nudging the cruise
    # speed down by the measured excess
    ts = np.linspace(0.0, duration, 801)
    v = np.array([traj.velocity(t) for t in ts])
    over = np.abs(v) - lim.v_max
    if np.max(over) > _BOUND_TOL:
        sign = math.copysign(1.0, v[int(np.argmax(np.abs(v)))])
        cv = sign * lim.v_max
        for _ in range(8):
            cruise = _cruise_trajectory(b, duration, lim, cv, extended=extended)
            if cruise is None:
                break
            peak = cruise.max_abs_velocity()
            if peak <= lim.v_max + _BOUND_TOL:
                if cruise.max_abs_jerk() <= lim.j_max + _BOUND_TOL:
                    return cruise
                break
            cv *= lim.v_max / peak
    return None


def _boundary_feasible(b: AxisBoundary, lim: MotionLimits) -> None:
    if abs(b.v0) > lim.v_max + _BOUND_TOL:
        raise TrajectoryInfeasibleError(
            f"initial velocity {b.v0} exceeds v_max {lim.v_max}", "initial_velocity")
    if abs(b.vt) > lim.v_max + _BOUND_TOL:
        raise TrajectoryInfeasibleError(
            f"terminal velocity {b.vt} exceeds v_max {lim.v_max}", "terminal_velocity")


def minimal_feasible_duration(b: AxisBoundary, lim: MotionLimits) -> float:
    """Shortest duration at which a bound-respecting plan exists (bisection)."""
    _boundary_feasible(b, lim)
    if b.at_rest_at_target:
        return 1e-3
    t_hi = 0.05
    while _build_feasible(b, t_hi, lim) is None:
        t_hi *= 2.0
        if t_hi > _T_CAP:
            raise TrajectoryInfeasibleError(
                f"no feasible duration up to {_T_CAP} s for {b}", "v_max")
    t_lo = t_hi / 2.0 if t_hi > 0.05 else 1e-3
    for _ in range(40):
        mid = 0.5 * (t_lo + t_hi)
        if _build_feasible(b, mid, lim) is None:
            t_lo = mid
        else:
            t_hi = mid
        if t_hi - t_lo < 1e-3 * t_hi:
            break
    return t_hi


def _violated_constraint(b: AxisBoundary, duration: float, lim: MotionLimits) -> str:
    traj = _quintic_trajectory(b, duration)
    if traj.max_abs_velocity() > lim.v_max + _BOUND_TOL:
        return "v_max"
    return "j_max"


def plan_axis(b: AxisBoundary, lim: MotionLimits,
              duration_weight: float = DEFAULT_DURATION_WEIGHT,
              allow_extension: bool = True) -> AxisTrajectory:
    """Plan one axis.

    Fixed duration: the quintic when no bound activates, otherwise the
    cruise-structured solution; if neither fits the bounds the duration is
    extended by bisection to the shortest feasible one (flagged on the
    result) unless ``allow_extension`` is False, which raises instead.

    Free duration: picked by golden-section search on normalized cost plus
    ``duration_weight`` times the duration, over feasible durations.
    """
    _boundary_feasible(b, lim)
    if b.duration is not None:
        traj = _build_feasible(b, b.duration, lim)
        if traj is not None:
            return traj
        binding = _violated_constraint(b, b.duration, lim)
        if not allow_extension:
            raise TrajectoryInfeasibleError(
                f"no plan satisfies {binding} within duration {b.duration}", binding)
        t_min = minimal_feasible_duration(b, lim)
        traj = _build_feasible(b, max(t_min, b.duration * (1 + 1e-6)), lim, extended=True)
        if traj is None:
            raise TrajectoryInfeasibleError(
                f"duration extension failed for {b}", binding)
        return traj

    if b.at_rest_at_target:
        return AxisTrajectory([_Segment(0.0, 1e-2, np.array([b.p0]))])

    t_min = minimal_feasible_duration(b, lim)

    def objective(duration):
        traj = _build_feasible(b, duration, lim)
        if traj is None:
            return math.inf, None
        return traj.cost + duration_weight * duration, traj

    # bracket around the unconstrained optimum of the rest-to-rest cost model
    dp = abs(b.pt - b.p0) + abs(b.v0) + abs(b.vt) + 1e-6
    t_star = (4320.0 * dp * dp / duration_weight) ** (1.0 / 7.0)
    lo = max(t_min, t_star / 6.0)
    hi = max(lo * 1.5, t_star * 6.0)
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, c = lo, hi
    x1 = c - inv_phi * (c - a)
    x2 = a + inv_phi * (c - a)
    f1, f2 = objective(x1)[0], objective(x2)[0]
    for _ in range(60):
        if f1 <= f2:
            c, x2, f2 = x2, x1, f1
            x1 = c - inv_phi * (c - a)
            f1 = objective(x1)[0]
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (c - a)
            f2 = objective(x2)[0]
    t_best = x1 if f1 <= f2 else x2
    traj = objective(t_best)[1]
    if traj is None:
        traj = _build_feasible(b, t_min, lim)
    return traj


class Plan3(NamedTuple):
    axes: tuple          # one AxisTrajectory per axis
    duration: float
    total_cost: float    # sum of per-axis normalized costs
    extended: bool


def plan_3d(boundaries: Sequence[AxisBoundary], lim: MotionLimits,
            duration: float | None = None,
            duration_weight: float = DEFAULT_DURATION_WEIGHT) -> Plan3:
    """Plan three axes over a common duration.

    The common duration is the larger of the requested one and every axis's
    minimal feasible duration; with no requested duration each axis first
    picks its own preferred duration and the longest wins.
    """
    if len(boundaries) != 3:
        raise ValueError(f"expected 3 axis boundaries, got {len(boundaries)}")
    failures = []
    minima = []
    for k, b in enumerate(boundaries):
        try:
            minima.append(minimal_feasible_duration(b, lim))
        except TrajectoryInfeasibleError as err:
            failures.append((k, err))
    if failures:
        names = ", ".join(f"axis {k}: {e.binding}" for k, e in failures)
        raise TrajectoryInfeasibleError(f"infeasible axes ({names})", failures[0][1].binding)

    if duration is None:
        preferred = []
        for b in boundaries:
            traj = plan_axis(b, lim, duration_weight=duration_weight)
            preferred.append(traj.duration)
        common = max(max(preferred), max(minima))
        extended = False
    else:
        common = max(duration, max(minima))
        extended = common > duration

    axes = []
    for b in boundaries:
        fixed = AxisBoundary(b.p0, b.v0, b.a0, b.pt, b.vt, b.at, duration=common)
        axes.append(plan_axis(fixed, lim))
    total = sum(t.cost for t in axes)
    return Plan3(tuple(axes), common, total, extended or any(t.extended for t in axes))


class FeasibilityReport(NamedTuple):
    max_thrust: float
    min_thrust: float
    max_body_rate: float
    thrust_ok: bool
    rate_ok: bool

    @property
    def ok(self) -> bool:
        return self.thrust_ok and self.rate_ok


def check_input_feasibility(axes, p: FlightParams, lim: MotionLimits,
                            samples: int = 600) -> FeasibilityReport:
    """Map a 3-axis plan to required thrust and body rate via flatness.

    Thrust is m * |a + g z|; the body-rate bound is the rotation rate of the
    thrust direction, |j_perp| / |a + g z|. Report only, never raises.
    """
    duration = max(t.duration for t in axes)
    ts = np.linspace(0.0, duration, samples)
    f_lo, f_hi, w_hi = math.inf, 0.0, 0.0
    for t in ts:
        a = np.array([traj.acceleration(min(t, traj.duration)) for traj in axes])
        j = np.array([traj.jerk(min(t, traj.duration)) for traj in axes])
        f_vec = a + np.array([0.0, 0.0, p.g])
        f_norm = float(np.linalg.norm(f_vec))
        thrust = p.m * f_norm
        f_lo = min(f_lo, thrust)
        f_hi = max(f_hi, thrust)
        if f_norm < 1e-6:
            w_hi = math.inf
        else:
            t_hat = f_vec / f_norm
            j_perp = j - np.dot(j, t_hat) * t_hat
            w_hi = max(w_hi, float(np.linalg.norm(j_perp)) / f_norm)
    return FeasibilityReport(
        f_hi, f_lo, w_hi,
        thrust_ok=(f_lo >= lim.f_min - 1e-9 and f_hi <= lim.f_max + 1e-9),
        rate_ok=w_hi <= lim.omega_max + 1e-9,
    )


def export_csv(axes, path, rate: float = 100.0) -> None:
    """Write a sampled 3-axis plan as CSV (t, then p/v/a/j per axis)."""
    duration = max(t.duration for t in axes)
    n = max(2, int(round(duration * rate)) + 1)
    ts = np.linspace(0.0, duration, n)
    header = ["t"]
    for k in range(len(axes)):
        header += [f"p{k}", f"v{k}", f"a{k}", f"j{k}"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in ts:
            row = [f"{t:.6f}"]
            for traj in axes:
                tc = min(t, traj.duration)
                row += [repr(traj.position(tc)), repr(traj.velocity(tc)),
                        repr(traj.acceleration(tc)), repr(traj.jerk(tc))]
            writer.writerow(row)
