"""Ground-mode dynamics: magic-formula tires, planar chassis, quarter-car corners.

Wheel order everywhere is fl, fr, rl, rr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .params import ChassisParams, SuspensionParams, TireParams

# below this wheel speed the slip angle is faded out to avoid atan2 chatter
LOW_SPEED_FADE = 0.15


@dataclass
class SuspensionState:
    """One corner of the quarter-car, displacements from static equilibrium."""

    z_s: float = 0.0      # m, sprung
    zdot_s: float = 0.0   # m/s
    z_u: float = 0.0      # m, unsprung
    zdot_u: float = 0.0   # m/s
    q: float = 0.0        # m, road input

    def as_array(self) -> np.ndarray:
        return np.array([self.z_s, self.zdot_s, self.z_u, self.zdot_u])

    @property
    def stroke(self) -> float:
        return self.z_s - self.z_u


def tire_lateral_force(slip_angle: float, load: float, tp: TireParams) -> float:
    """Magic-formula lateral force; peak scales with the normal load."""
    if load < 0:
        raise ValueError(f"normal load must be >= 0, got {load}")
    if load == 0.0:
        return 0.0
    peak = tp.mu * load
    x = tp.b * slip_angle
    return peak * math.sin(tp.c * math.atan(x - tp.e * (x - math.atan(x))))


def suspension_matrices(sp: SuspensionParams):
    """State-space (A, B_act, B_road, B_dist) for state (z_s, z_s', z_u, z_u').

    Shock (k_shock, b_shock) sits between the masses, the tire (k_tire,
    b_tire) between the unsprung mass and the road; the road enters through
    its displacement only.
    """
    ms, mu = sp.sprung_mass, sp.unsprung_mass
    k1, b1 = sp.k_shock, sp.b_shock
    k2, b2 = sp.k_tire, sp.b_tire
    a = np.array(
        [
            [0.0, 1.0, 0.0, 0.0],
            [-k1 / ms, -b1 / ms, k1 / ms, b1 / ms],
            [0.0, 0.0, 0.0, 1.0],
            [k1 / mu, b1 / mu, -(k1 + k2) / mu, -(b1 + b2) / mu],
        ]
    )
    b_act = np.array([0.0, 1.0 / ms, 0.0, -1.0 / mu])
    b_road = np.array([0.0, 0.0, 0.0, k2 / mu])
    b_dist = np.array([0.0, -1.0 / ms, 0.0, 0.0])
    return a, b_act, b_road, b_dist


def suspension_derivs(state, f_act: float, f_dist: float, q: float,
                      sp: SuspensionParams) -> np.ndarray:
    """Quarter-car state derivative for state (z_s, z_s', z_u, z_u')."""
    x = state.as_array() if isinstance(state, SuspensionState) else np.asarray(state, dtype=float)
    a, b_act, b_road, b_dist = suspension_matrices(sp)
    return a @ x + b_act * f_act + b_road * q + b_dist * f_dist


def tire_normal_load(corner: SuspensionState, sp: SuspensionParams,
                     zdd_u: float | None = None) -> float:
    """Wheel normal load: inertial + damper + spring terms plus the static share.

    The damper coefficient is the shock/tire sum acting on the relative
    velocity, the spring the shock rate on the relative displacement. Clamped
    at zero for wheel lift-off.
    """
    if zdd_u is None:
        zdd_u = float(suspension_derivs(corner, 0.0, 0.0, corner.q, sp)[3])
    rel_v = corner.zdot_u - corner.zdot_s
    rel_z = corner.z_u - corner.z_s
    load = (sp.unsprung_mass * zdd_u
            + (sp.b_shock + sp.b_tire) * rel_v
            + sp.k_shock * rel_z
            + sp.static_load)
    return max(0.0, load)


def friction_ellipse_clamp(fx: float, fy: float, load: float, mu: float) -> tuple[float, float]:
    """Keep combined tire force inside the friction ellipse.

    Longitudinal force has priority: it is clamped to mu*load first and the
    lateral force takes whatever margin remains.
    """
    cap = mu * max(0.0, load)
    fx = max(-cap, min(cap, fx))
    fy_cap = math.sqrt(max(0.0, cap * cap - fx * fx))
    fy = max(-fy_cap, min(fy_cap, fy))
    return fx, fy


def ackermann_angles(steer: float, cp: ChassisParams) -> np.ndarray:
    """Per-wheel steering angles for one steering command (front wheels only)."""
    if abs(steer) < 1e-9:
        return np.zeros(4)
    wb = cp.wheelbase
    radius = wb / math.tan(abs(steer))
    half = cp.track / 2.0
    inner = math.atan2(wb, max(radius - half, 1e-6))
    outer = math.atan2(wb, radius + half)
    if steer > 0:  # turning left: left wheel is inner
        return np.array([inner, outer, 0.0, 0.0])
    return np.array([-outer, -inner, 0.0, 0.0])


class PlanarForces(NamedTuple):
    accel_x: float
    accel_y: float
    yaw_accel: float
    f_long: np.ndarray   # chassis-frame longitudinal force per wheel
    f_lat: np.ndarray    # chassis-frame lateral force per wheel


def chassis_planar_derivs(vx: float, vy: float, yaw_rate: float,
                          drive_torques, steer: float, u4: float,
                          cp: ChassisParams, tp: TireParams,
                          loads) -> PlanarForces:
    """Planar chassis accelerations from per-wheel tire forces.

    Longitudinal wheel force is drive torque over wheel radius; lateral force
    comes from the magic formula at the wheel slip angle; both pass through
    the friction ellipse. ``u4`` is the direct chassis yaw input.
    """
    torques = np.asarray(drive_torques, dtype=float)
    loads = np.asarray(loads, dtype=float)
    deltas = ackermann_angles(steer, cp)
    pos = cp.wheel_positions()

    f_long = np.zeros(4)
    f_lat = np.zeros(4)
    for i in range(4):
        x_i, y_i = pos[i]
        v_wx = vx - yaw_rate * y_i
        v_wy = vy + yaw_rate * x_i
        speed = math.hypot(v_wx, v_wy)
        slip = deltas[i] - math.atan2(v_wy, v_wx) if speed > 1e-6 else 0.0
        if speed < LOW_SPEED_FADE:
            slip *= speed / LOW_SPEED_FADE
        fx = max(-cp.drive_force_max,
                 min(cp.drive_force_max, torques[i] / cp.wheel_radius))
        fy = tire_lateral_force(slip, float(loads[i]), tp)
        fx, fy = friction_ellipse_clamp(fx, fy, float(loads[i]), tp.mu)
        cd, sd = math.cos(deltas[i]), math.sin(deltas[i])
        f_long[i] = fx * cd - fy * sd
        f_lat[i] = fx * sd + fy * cd

    drag = 0.5 * cp.rho * cp.drag_coeff * cp.frontal_area * vx * abs(vx)
    ax = (f_long.sum() - drag) / cp.mass
    ay = f_lat.sum() / cp.mass
    yaw_acc = (
        (cp.track / 2.0) * (f_long[1] + f_long[3] - f_long[0] - f_long[2])
        + (f_lat[0] + f_lat[1]) * cp.lf
        - (f_lat[2] + f_lat[3]) * cp.lr
        + u4
    ) / cp.yaw_inertia
    return PlanarForces(ax, ay, yaw_acc, f_long, f_lat)
