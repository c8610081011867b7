"""Fusion (LQR + feedforward) and baseline cascade-PID flight controllers.

The constrained infinite-horizon problem is realized as unconstrained LQR
plus disturbance feedforward, hard input clamps with per-step rate limits,
and slack-style soft output bounds (violations are pushed back through the
gain with a penalty weight). This keeps the quadratic-cost structure while
staying a deterministic desk-scale solve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import NonStabilizableError
from .flight import BodyWrench, mixer_inverse, thrusts_from_wrench
from .ground_effect import induced_velocity, thrust_ratio
from .kinematics import euler_to_rotation
from .params import RobotParams
from .state import ControlInput, RobotState

_PBH_TOL = 1e-7


@dataclass
class LinearModel:
    """State-space model around an operating point."""

    a: np.ndarray
    b: np.ndarray
    c_out: np.ndarray = None
    g_d: np.ndarray = None
    equilibrium_residual: float = 0.0
    unstabilizable_modes: list = field(default_factory=list)

    def __post_init__(self):
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        self.b = np.atleast_2d(np.asarray(self.b, dtype=float))
        n = self.a.shape[0]
        if self.a.shape != (n, n) or self.b.shape[0] != n:
            raise ValueError(f"inconsistent shapes A {self.a.shape}, B {self.b.shape}")
        if self.c_out is None:
            self.c_out = np.eye(n)
        self.c_out = np.atleast_2d(np.asarray(self.c_out, dtype=float))
        if self.g_d is None:
            self.g_d = np.zeros(n)
        self.g_d = np.asarray(self.g_d, dtype=float).reshape(n)
        self.unstabilizable_modes = _pbh_unstabilizable(self.a, self.b)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int:
        return self.b.shape[1]

    @property
    def is_equilibrium(self) -> bool:
        return self.equilibrium_residual < 1e-6

    @property
    def stabilizable(self) -> bool:
        return not self.unstabilizable_modes


def _pbh_unstabilizable(a: np.ndarray, b: np.ndarray) -> list:
    """Eigenvalues in the closed right half plane failing the PBH rank test."""
    n = a.shape[0]
    bad = []
    scale = max(1.0, float(np.linalg.norm(a)))
    for lam in np.linalg.eigvals(a):
        if lam.real < -1e-9:
            continue
        pencil = np.hstack([a - lam * np.eye(n), b])
        smin = np.linalg.svd(pencil, compute_uv=False)[-1]
        if smin < _PBH_TOL * scale:
            bad.append(complex(lam))
    return bad


def linearize(f, x0, u0, rel_step: float = 1e-6, c_out=None,
              disturbance=None) -> LinearModel:
    """Central-difference linearization of ``xdot = f(x, u)``.

    ``disturbance`` optionally maps (x, u, d) to the derivative for a scalar
    disturbance channel; its partial at d = 0 becomes the model's G_d column.
    A non-equilibrium operating point is annotated, not rejected.
    """
    x0 = np.asarray(x0, dtype=float)
    u0 = np.asarray(u0, dtype=float)
    n, m = len(x0), len(u0)
    a = np.zeros((n, n))
    b = np.zeros((n, m))
    for i in range(n):
        h = rel_step * max(1.0, abs(x0[i]))
        xp, xm = x0.copy(), x0.copy()
        xp[i] += h
        xm[i] -= h
        a[:, i] = (f(xp, u0) - f(xm, u0)) / (2 * h)
    for j in range(m):
        h = rel_step * max(1.0, abs(u0[j]))
        up, um = u0.copy(), u0.copy()
        up[j] += h
        um[j] -= h
        b[:, j] = (f(x0, up) - f(x0, um)) / (2 * h)
    g_d = None
    if disturbance is not None:
        h = rel_step
        g_d = (disturbance(x0, u0, h) - disturbance(x0, u0, -h)) / (2 * h)
    residual = float(np.max(np.abs(f(x0, u0))))
    return LinearModel(a, b, c_out=c_out, g_d=g_d, equilibrium_residual=residual)


@dataclass
class LqrWeights:
    """Quadratic weights and the box bounds of the constrained formulation."""

    q: np.ndarray                 # output weight, PSD
    r: np.ndarray                 # input weight, PD
    t_w: np.ndarray = None        # disturbance weight (cost reporting only)
    p_s: np.ndarray = None        # slack penalty on output-bound violations, PD
    y_min: np.ndarray = None
    y_max: np.ndarray = None
    g_min: float = -math.inf
    g_max: float = math.inf
    du_min: np.ndarray = None     # per-step input change bounds
    du_max: np.ndarray = None
    u_max: np.ndarray = None

    def __post_init__(self):
        self.q = np.atleast_2d(np.asarray(self.q, dtype=float))
        self.r = np.atleast_2d(np.asarray(self.r, dtype=float))
        _require_psd(self.q, "Q", strict=False)
        _require_psd(self.r, "R", strict=True)
        if self.p_s is not None:
            self.p_s = np.atleast_2d(np.asarray(self.p_s, dtype=float))
            _require_psd(self.p_s, "P_s", strict=True)
        if self.t_w is not None:
            self.t_w = np.atleast_2d(np.asarray(self.t_w, dtype=float))
            _require_psd(self.t_w, "T_w", strict=False)
        if self.y_min is not None and self.y_max is not None:
            if np.any(np.asarray(self.y_min) > np.asarray(self.y_max)):
                raise ValueError("y_min must be <= y_max elementwise")


def _require_psd(mat: np.ndarray, name: str, strict: bool) -> None:
    if not np.allclose(mat, mat.T, atol=1e-9):
        raise ValueError(f"{name} must be symmetric")
    eig = np.linalg.eigvalsh(mat)
    if strict and eig.min() <= 0:
        raise ValueError(f"{name} must be positive definite")
    if not strict and eig.min() < -1e-12:
        raise ValueError(f"{name} must be positive semidefinite")


class LqrSolution:
    def __init__(self, k: np.ndarray, p: np.ndarray, residual: float,
                 closed_loop_eigs: np.ndarray):
        self.k = k
        self.p = p
        self.residual = residual
        self.closed_loop_eigs = closed_loop_eigs


def riccati_residual(mdl: LinearModel, w: LqrWeights, p: np.ndarray) -> float:
    q_eff = mdl.c_out.T @ w.q @ mdl.c_out
    res = (mdl.a.T @ p + p @ mdl.a
           - p @ mdl.b @ np.linalg.solve(w.r, mdl.b.T @ p) + q_eff)
    return float(np.linalg.norm(res))


def solve_lqr(mdl: LinearModel, w: LqrWeights) -> LqrSolution:
    """Infinite-horizon continuous LQR gain for output weight Q, input weight R.

    Raises NonStabilizableError listing the offending modes; the returned
    solution carries the Riccati residual and the closed-loop spectrum.
    """
    if not mdl.stabilizable:
        raise NonStabilizableError(
            f"uncontrollable unstable modes {mdl.unstabilizable_modes}",
            mdl.unstabilizable_modes)
    q_eff = mdl.c_out.T @ w.q @ mdl.c_out
    p = scipy.linalg.solve_continuous_are(mdl.a, mdl.b, q_eff, w.r)
    k = np.linalg.solve(w.r, mdl.b.T @ p)
    eigs = np.linalg.eigvals(mdl.a - mdl.b @ k)
    return LqrSolution(k, p, riccati_residual(mdl, w, p), eigs)


def disturbance_cost_report(w: LqrWeights, g_history) -> float:
    """Accumulated disturbance cost term (T_w-weighted); reporting only."""
    if w.t_w is None:
        return 0.0
    total = 0.0
    for g in np.atleast_2d(np.asarray(g_history, dtype=float)):
        total += float(g @ w.t_w @ g)
    return total


class ConstrainedLqr:
    """LQR state feedback with input box, rate limits and soft output bounds.

    Holds the previous input for the rate limit; one instance per run.
    """

    def __init__(self, mdl: LinearModel, w: LqrWeights, solution=None):
        self.mdl = mdl
        self.w = w
        self.sol = solution if solution is not None else solve_lqr(mdl, w)
        self._u_prev = None

    def reset(self) -> None:
        self._u_prev = None

    def step(self, x_err, u_ff=None, g_d_estimate: float = 0.0) -> np.ndarray:
        """One control update for the state error ``x_err``.

        ``u_ff`` is the trim/feedforward input; the ground-effect estimate is
        canceled through the model's disturbance column. Output-bound
        violations are fed back through the gain, amplified by the slack
        penalty weight.
        """
        w = self.w
        x_err = np.asarray(x_err, dtype=float)
        if u_ff is None:
            u_ff = np.zeros(self.mdl.m)
        x_eff = x_err.copy()
        if w.p_s is not None and w.y_min is not None and w.y_max is not None:
            y = self.mdl.c_out @ x_err
            viol = np.maximum(y - w.y_max, 0.0) + np.minimum(y - w.y_min, 0.0)
            if np.any(viol != 0.0):
                x_eff = x_eff + np.linalg.pinv(self.mdl.c_out) @ (w.p_s @ viol)
        u = np.asarray(u_ff, dtype=float) - self.sol.k @ x_eff
        if g_d_estimate and np.any(self.mdl.g_d):
            # cancel the disturbance through the input channel closest to it
            pinv = np.linalg.pinv(self.mdl.b)
            u = u - (pinv @ self.mdl.g_d) * g_d_estimate
        if self._u_prev is not None and w.du_min is not None:
            du = np.clip(u - self._u_prev, w.du_min, w.du_max)
            u = self._u_prev + du
        if w.u_max is not None:
            u = np.clip(u, 0.0, w.u_max)
        self._u_prev = u.copy()
        return u


@dataclass
class PidGains:
    """Gains for one PID loop."""

    kp: float
    ki: float = 0.0
    kd: float = 0.0
    out_limit: float = math.inf
    int_limit: float = math.inf

    def __post_init__(self):
        if self.kp < 0 or self.ki < 0 or self.kd < 0:
            raise ValueError("gains must be >= 0")
        if self.out_limit <= 0 or self.int_limit <= 0:
            raise ValueError("limits must be positive")


class PidLoop:
    """Scalar PID with clamped integral (anti-windup) and output saturation."""

    def __init__(self, gains: PidGains):
        self.g = gains
        self._integral = 0.0
        self._prev_err = None

    def reset(self) -> None:
        self._integral = 0.0
        self._prev_err = None

    def step(self, err: float, dt: float) -> float:
        self._integral += err * dt
        self._integral = max(-self.g.int_limit, min(self.g.int_limit, self._integral))
        deriv = 0.0
        if self.g.kd > 0.0 and self._prev_err is not None and dt > 0:
            deriv = (err - self._prev_err) / dt
        self._prev_err = err
        out = self.g.kp * err + self.g.ki * self._integral + self.g.kd * deriv
        return max(-self.g.out_limit, min(self.g.out_limit, out))


def attitude_from_force(f_vec: np.ndarray, yaw: float) -> tuple[float, float]:
    """Roll/pitch that point body z along a desired world force vector."""
    norm = float(np.linalg.norm(f_vec))
    if norm < 1e-9:
        return 0.0, 0.0
    f = f_vec / norm
    cy, sy = math.cos(yaw), math.sin(yaw)
    # rotate into the yaw frame, then pitch about y and roll about x
    fx = cy * f[0] + sy * f[1]
    fy = -sy * f[0] + cy * f[1]
    pitch = math.atan2(fx, f[2])
    roll = math.atan2(-fy * math.cos(pitch), f[2])
    return roll, pitch


@dataclass
class FlightReference:
    """Trajectory sample handed to a flight controller."""

    pos: np.ndarray
    vel: np.ndarray = field(default_factory=lambda: np.zeros(3))
    acc: np.ndarray = field(default_factory=lambda: np.zeros(3))
    yaw: float = 0.0


class FusionController:
    """Trajectory-tracking LQR with ground-effect feedforward.

    Built from a linearization of the coupled airborne model around hover;
    the same gain serves hover hold and descent tracking. Per-rotor thrust
    commands are divided by the local ground-effect ratio estimate so the
    effective thrust matches the request.
    """

    def __init__(self, params: RobotParams, mdl: LinearModel, weights: LqrWeights,
                 rotor_clearances=None):
        self.params = params
        self.lqr = ConstrainedLqr(mdl, weights)
        self.rotor_clearances = rotor_clearances  # callable(state) -> (4,) m
        self.ge_compensation = True
        self._prev_att_ref = None

    def reset(self) -> None:
        self.lqr.reset()
        self._prev_att_ref = None

    @property
    def gain(self) -> np.ndarray:
        return self.lqr.sol.k

    def control(self, state: RobotState, ref: FlightReference, dt: float,
                posture: tuple | None = None) -> ControlInput:
        """One tracking update.

        ``posture`` is an optional (pitch_ref, weight) pair for the terminal
        slope alignment: the attitude reference blends toward the commanded
        pitch and horizontal position feedback yields to it, accepting the
        short drift the wheels will absorb.
        """
        p = self.params.flight
        drag = np.array([p.d_x, p.d_y, p.d_z]) * ref.vel
        f_vec = p.m * (ref.acc + np.array([0.0, 0.0, p.g])) + drag
        roll_ref, pitch_ref = attitude_from_force(f_vec, ref.yaw)
        thrust_ff = float(np.linalg.norm(f_vec))
        xy_scale = 1.0
        if posture is not None:
            pitch_cmd, s = posture
            pitch_ref = (1.0 - s) * pitch_ref + s * pitch_cmd
            roll_ref = (1.0 - s) * roll_ref
            xy_scale = 1.0 - 0.9 * s
            # thrust along the commanded attitude keeps the descent honest
            z_body = np.array([
                math.cos(ref.yaw) * math.sin(pitch_ref),
                math.sin(ref.yaw) * math.sin(pitch_ref),
                math.cos(pitch_ref),
            ])
            thrust_ff = max(float(f_vec @ z_body), 0.2 * p.m * p.g)

        # maneuvering reference: damp rates toward the attitude-reference
        # rate, not toward zero
        rate_ref = np.zeros(3)
        if self._prev_att_ref is not None and dt > 0:
            rate_ref[0] = (roll_ref - self._prev_att_ref[0]) / dt
            rate_ref[1] = (pitch_ref - self._prev_att_ref[1]) / dt
            rate_ref = np.clip(rate_ref, -2.5, 2.5)
        self._prev_att_ref = (roll_ref, pitch_ref)

        x_err = np.zeros(self.lqr.mdl.n)
        x_err[0:3] = state.pos - ref.pos
        x_err[3:6] = state.vel - ref.vel
        x_err[0:2] *= xy_scale
        x_err[3:5] *= xy_scale
        x_err[6] = state.euler[0] - roll_ref
        x_err[7] = state.euler[1] - pitch_ref
        x_err[8] = _wrap_angle(state.euler[2] - ref.yaw)
        x_err[9:12] = state.rates - rate_ref

        u_ff = thrusts_from_wrench(BodyWrench(thrust_ff, 0.0, 0.0, 0.0), p)
        thrusts = self.lqr.step(x_err, u_ff=u_ff)

        if self.ge_compensation and self.rotor_clearances is not None:
            clear = self.rotor_clearances(state)
            speed = float(np.hypot(state.vel[0], state.vel[1]))
            gp = self.params.ground_effect
            for i in range(4):
                v_i = induced_velocity(max(thrusts[i], 0.0), gp)
                ratio = thrust_ratio(float(clear[i]), speed, v_i, gp)
                thrusts[i] = thrusts[i] / ratio
        thrusts = np.clip(thrusts, 0.0, p.thrust_max_per_rotor)
        speeds = np.sqrt(thrusts / p.c_omega)
        return ControlInput(rotor_speeds=speeds)


@dataclass
class CascadeGains:
    """Baseline parallel cascade: position, velocity, attitude, rate loops."""

    pos_xy: PidGains = field(default_factory=lambda: PidGains(kp=1.6, out_limit=2.5))
    pos_z: PidGains = field(default_factory=lambda: PidGains(kp=1.2, out_limit=0.55))
    vel_xy: PidGains = field(default_factory=lambda: PidGains(
        kp=3.2, ki=0.6, out_limit=8.0, int_limit=2.0))
    vel_z: PidGains = field(default_factory=lambda: PidGains(
        kp=3.0, ki=0.6, out_limit=8.0, int_limit=2.5))
    att: PidGains = field(default_factory=lambda: PidGains(kp=7.0, out_limit=4.0))
    rate: PidGains = field(default_factory=lambda: PidGains(kp=16.0, out_limit=60.0))
    wheel_speed: PidGains = field(default_factory=lambda: PidGains(
        kp=4.0, ki=1.0, out_limit=10.0, int_limit=4.0))
    steering: PidGains = field(default_factory=lambda: PidGains(kp=0.8, out_limit=0.5))


class CascadePidController:
    """Plain parallel cascade PID baseline; no plan, no ground-effect model."""

    def __init__(self, params: RobotParams, gains: CascadeGains | None = None):
        self.params = params
        self.gains = gains if gains is not None else CascadeGains()
        g = self.gains
        self._vel_loops = [PidLoop(g.vel_xy), PidLoop(g.vel_xy), PidLoop(g.vel_z)]
        self._att_loops = [PidLoop(g.att), PidLoop(g.att)]
        self._rate_loops = [PidLoop(g.rate), PidLoop(g.rate), PidLoop(g.rate)]
        self._wheel_loops = [PidLoop(g.wheel_speed) for _ in range(4)]
        self._steer_loop = PidLoop(g.steering)

    def reset(self) -> None:
        for loop in (*self._vel_loops, *self._att_loops, *self._rate_loops,
                     *self._wheel_loops, self._steer_loop):
            loop.reset()

    def control(self, state: RobotState, ref: FlightReference,
                dt: float) -> ControlInput:
        p = self.params.flight
        g = self.gains
        # position loop -> velocity setpoint (reference velocity ignored:
        # the baseline flies waypoints)
        v_sp = np.zeros(3)
        v_sp[0] = max(-g.pos_xy.out_limit, min(g.pos_xy.out_limit,
                                               g.pos_xy.kp * (ref.pos[0] - state.pos[0])))
        v_sp[1] = max(-g.pos_xy.out_limit, min(g.pos_xy.out_limit,
                                               g.pos_xy.kp * (ref.pos[1] - state.pos[1])))
        v_sp[2] = max(-g.pos_z.out_limit, min(g.pos_z.out_limit,
                                              g.pos_z.kp * (ref.pos[2] - state.pos[2])))
        a_cmd = np.array([
            self._vel_loops[i].step(v_sp[i] - state.vel[i], dt) for i in range(3)
        ])
        f_vec = p.m * (a_cmd + np.array([0.0, 0.0, p.g]))
        f_vec[2] = max(f_vec[2], 0.2 * p.m * p.g)  # keep thrust pointing up
        roll_ref, pitch_ref = attitude_from_force(f_vec, ref.yaw)
        rate_sp = np.array([
            self._att_loops[0].step(roll_ref - state.euler[0], dt),
            self._att_loops[1].step(pitch_ref - state.euler[1], dt),
            2.0 * _wrap_angle(ref.yaw - state.euler[2]),
        ])
        inertia = np.array([p.jx, p.jy, p.jz])
        torque = inertia * np.array([
            self._rate_loops[i].step(rate_sp[i] - state.rates[i], dt)
            for i in range(3)
        ])
        wrench = BodyWrench(float(np.linalg.norm(f_vec)), *torque)
        try:
            inv = mixer_inverse(wrench, p)
            speeds = inv.speeds
        except ValueError:
            speeds = np.full(4, p.hover_speed)
        return ControlInput(rotor_speeds=speeds)

    def ground_control(self, state: RobotState, speed_ref: float,
                       heading_ref: float, dt: float) -> ControlInput:
        cp = self.params.chassis
        v_long = float(state.vel[0] * math.cos(state.euler[2])
                       + state.vel[1] * math.sin(state.euler[2]))
        torques = np.array([
            loop.step(speed_ref - v_long, dt) for loop in self._wheel_loops
        ]) * cp.wheel_radius
        steer = self._steer_loop.step(_wrap_angle(heading_ref - state.euler[2]), dt)
        brake = 1.0 if abs(speed_ref) < 1e-6 else 0.0
        return ControlInput(wheel_torques=torques, steering=steer, brake=brake)


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def dump_gain_csv(k: np.ndarray, path) -> None:
    """Write a gain matrix as CSV for inspection."""
    np.savetxt(path, np.atleast_2d(k), delimiter=",", fmt="%.12g")
