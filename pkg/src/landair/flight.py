"""Quadrotor rigid-body forces and torques plus deformable-arm bookkeeping.

All functions are pure. Rotor numbering follows the X-configuration mixer:
rotors 1, 2 aft, 3, 4 forward; spin directions alternate (+, -, +, -).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import InfeasibleWrenchError
from .kinematics import euler_to_rotation
from .params import FOLD_RADIUS_RATIO, ArmConfig, FlightParams

ROTOR_SPIN = (1.0, -1.0, 1.0, -1.0)


class BodyWrench(NamedTuple):
    thrust: float     # N, collective along body z
    tau_roll: float   # N m
    tau_pitch: float  # N m
    tau_yaw: float    # N m


class MixerInversion(NamedTuple):
    speeds: np.ndarray  # rad/s, per rotor
    clamped: bool       # any squared speed hit [0, w_max^2]


def mixer_matrix(p: FlightParams) -> np.ndarray:
    """Map from squared rotor speeds to (thrust, roll, pitch, yaw)."""
    ls = p.arm_length * math.sin(p.alpha)
    lc = p.arm_length * math.cos(p.alpha)
    c = p.c_omega
    return np.array(
        [
            [c, c, c, c],
            [-c * ls, c * ls, c * ls, -c * ls],
            [c * lc, c * lc, -c * lc, -c * lc],
            [p.c_m, -p.c_m, p.c_m, -p.c_m],
        ]
    )


def rotor_positions(p: FlightParams) -> np.ndarray:
    """Rotor hub positions in the body frame, consistent with the mixer rows."""
    ls = p.arm_length * math.sin(p.alpha)
    lc = p.arm_length * math.cos(p.alpha)
    return np.array(
        [
            [-lc, -ls, 0.0],
            [-lc, +ls, 0.0],
            [+lc, +ls, 0.0],
            [+lc, -ls, 0.0],
        ]
    )


def mixer_forward(speeds, p: FlightParams) -> BodyWrench:
    """Body wrench produced by the four rotors."""
    w = np.asarray(speeds, dtype=float)
    if w.shape != (4,):
        raise ValueError(f"expected 4 rotor speeds, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("non-finite rotor speeds")
    if np.any(w < 0) or np.any(w > p.omega_rotor_max + 1e-9):
        raise ValueError("rotor speeds outside [0, omega_rotor_max]")
    out = mixer_matrix(p) @ (w * w)
    return BodyWrench(*out)


def wrench_from_thrusts(thrusts, p: FlightParams) -> BodyWrench:
    """Body wrench from per-rotor thrusts (used when ground effect scales them)."""
    t = np.asarray(thrusts, dtype=float)
    ls = p.arm_length * math.sin(p.alpha)
    lc = p.arm_length * math.cos(p.alpha)
    k_yaw = p.c_m / p.c_omega
    return BodyWrench(
        float(t.sum()),
        ls * (-t[0] + t[1] + t[2] - t[3]),
        lc * (t[0] + t[1] - t[2] - t[3]),
        k_yaw * (t[0] - t[1] + t[2] - t[3]),
    )


def thrusts_from_wrench(wrench: BodyWrench, p: FlightParams) -> np.ndarray:
    """Exact per-rotor thrust split for a requested wrench (may be negative)."""
    ls = p.arm_length * math.sin(p.alpha)
    lc = p.arm_length * math.cos(p.alpha)
    k_yaw = p.c_m / p.c_omega
    f = wrench.thrust / 4.0
    r = wrench.tau_roll / (4.0 * ls)
    q = wrench.tau_pitch / (4.0 * lc)
    y = wrench.tau_yaw / (4.0 * k_yaw)
    return np.array([f - r + q + y, f + r + q - y, f + r - q + y, f - r - q - y])


def mixer_inverse(wrench: BodyWrench, p: FlightParams) -> MixerInversion:
    """Rotor speeds realizing a wrench; squared speeds clamped to [0, w_max^2].

    Raises InfeasibleWrenchError when the exact solve needs a meaningfully
    negative squared speed (negative thrust on a rotor).
    """
    w_sq = np.linalg.solve(mixer_matrix(p), np.asarray(wrench, dtype=float))
    w_max_sq = p.omega_rotor_max**2
    tol = 1e-9 * w_max_sq
    if np.any(w_sq < -tol):
        raise InfeasibleWrenchError(
            f"wrench {tuple(wrench)} needs negative squared rotor speeds {w_sq}"
        )
    clamped = bool(np.any(w_sq < 0.0) or np.any(w_sq > w_max_sq))
    w_sq = np.clip(w_sq, 0.0, w_max_sq)
    return MixerInversion(np.sqrt(w_sq), clamped)


def gyroscopic_torque(rates, speeds, p: FlightParams) -> np.ndarray:
    """Torque from the spinning rotors reacting to body rotation.

    Sum over rotors of w_b x (0, 0, J_rotor * spin_i * w_i).
    """
    pr, qr, _ = (float(v) for v in rates)
    w = np.asarray(speeds, dtype=float)
    h = p.j_rotor * float(np.dot(ROTOR_SPIN, w))
    return np.array([qr * h, -pr * h, 0.0])


def aero_friction_torque(attitude_rates, p: FlightParams) -> np.ndarray:
    """Viscous torque opposing the attitude rates."""
    dphi, dtheta, dpsi = (float(v) for v in attitude_rates)
    return np.array([p.d_phi * dphi, p.d_theta * dtheta, p.d_psi * dpsi])


def rotational_accel(rates, wrench: BodyWrench, m_g, m_d, p: FlightParams) -> np.ndarray:
    """Body angular acceleration (p', q', r').

    Control torques, inertial cross-coupling, a rate-proportional damping term
    scaled by arm length, and the gyroscopic/aero torques all enter here; the
    latter two are subtracted as resisting torques.
    """
    pr, qr, rr = (float(v) for v in rates)
    l = p.arm_length
    pdot = (-p.d_phi * l * pr + wrench.tau_roll + qr * rr * (p.jy - p.jz)
            - float(m_g[0]) - float(m_d[0])) / p.jx
    qdot = (-p.d_theta * l * qr + wrench.tau_pitch + pr * rr * (p.jz - p.jx)
            - float(m_g[1]) - float(m_d[1])) / p.jy
    rdot = (-p.d_psi * l * rr + wrench.tau_yaw + pr * qr * (p.jx - p.jy)
            - float(m_g[2]) - float(m_d[2])) / p.jz
    return np.array([pdot, qdot, rdot])


def translational_accel(e, vel, thrust: float, p: FlightParams) -> np.ndarray:
    """CoM acceleration in the global frame from thrust, weight and drag."""
    if thrust < 0:
        raise ValueError(f"thrust must be >= 0, got {thrust}")
    rot = euler_to_rotation(e)
    vx, vy, vz = (float(v) for v in vel)
    fx = rot[0, 2] * thrust - p.d_x * vx
    fy = rot[1, 2] * thrust - p.d_y * vy
    fz = rot[2, 2] * thrust - p.m * p.g - p.d_z * vz
    return np.array([fx, fy, fz]) / p.m


def arm_inertia(a: ArmConfig) -> tuple[float, float]:
    """Arm moments of inertia about the steering-gear axis.

    Returns the tilted (front) and untilted (rear) values of the beam model;
    the two coincide at zero tilt.
    """
    base = a.mass / 12.0 * a.length**2 * (a.width**2 + a.length**2)
    return base * math.cos(a.gamma), base


def arm_inertia_rotated(j_arm: np.ndarray, theta: float) -> np.ndarray:
    """Similarity transform of an arm inertia tensor by a rotation about z."""
    c, s = math.cos(theta), math.sin(theta)
    rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return rz @ np.asarray(j_arm, dtype=float) @ rz.T


def _arm_tip(a: ArmConfig, fold: float) -> tuple[float, float, float]:
    # folding pulls the tip inboard and tilts front arms out of plane
    radius = a.length * (1.0 - fold * (1.0 - FOLD_RADIUS_RATIO))
    tilt = a.gamma * fold
    horiz = radius * math.cos(tilt)
    return horiz * math.cos(a.theta), horiz * math.sin(a.theta), -radius * math.sin(tilt)


def total_inertia(body: FlightParams, arms, fold_fraction: float | None = None,
                  body_diag=None) -> np.ndarray:
    """Diagonal inertia of core body plus arms as rotor-tip point masses.

    ``fold_fraction`` overrides each arm's folded flag with a continuous
    0 (deployed) .. 1 (folded) value for use mid-transform.
    """
    if body_diag is None:
        jx, jy, jz = body.jx, body.jy, body.jz
    else:
        jx, jy, jz = (float(v) for v in body_diag)
    for a in arms:
        f = fold_fraction if fold_fraction is not None else (1.0 if a.folded else 0.0)
        x, y, z = _arm_tip(a, f)
        jx += a.mass * (y * y + z * z)
        jy += a.mass * (x * x + z * z)
        jz += a.mass * (x * x + y * y)
    return np.array([jx, jy, jz])


class ServoLoad(NamedTuple):
    gravity_term: float  # N, gravity component in the arm rotation plane
    yaw_term: float      # N, rotor drag-torque reaction at the tip
    total: float         # N


def arm_servo_load(a: ArmConfig, rotor_speed: float, p: FlightParams,
                   gravity_body) -> ServoLoad:
    """Steering-gear load bookkeeping for one arm.

    With the rotor stopped only the in-plane gravity component loads the
    servo; a spinning rotor adds its drag-torque reaction at the tip.
    """
    gx, gy, _ = (float(v) for v in gravity_body)
    gravity_term = a.mass * math.hypot(gx, gy)
    yaw_term = p.c_m * rotor_speed**2 / a.length
    return ServoLoad(gravity_term, yaw_term, gravity_term + yaw_term)
