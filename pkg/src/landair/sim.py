"""Fixed-step RK4 simulation of the coupled flight/chassis/suspension model.

The body is the sprung mass with full 6-DoF state; each corner carries an
unsprung vertical DOF. Wheel-terrain contact is a penalty spring-damper
along the terrain normal, tangential forces come from the tire model at
speed and from a stick anchor when parked. Per-rotor ground effect uses the
clearance under each hub, so slopes produce differential thrust.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import fsm as fsm_mod
from .chassis import ackermann_angles, friction_ellipse_clamp, tire_lateral_force
from .controllers import (
    CascadePidController,
    FlightReference,
    FusionController,
    LinearModel,
    LqrWeights,
    linearize,
)
from .errors import SimulationDivergedError
from .flight import (
    aero_friction_torque,
    gyroscopic_torque,
    rotor_positions,
    total_inertia,
    wrench_from_thrusts,
)
from .fsm import (
    ALTITUDE_HANDOFF,
    Command,
    FsmContext,
    Mode,
    TouchdownDetector,
    TransformStep,
    fsm_step,
    transform_step,
)
from .ground_effect import induced_velocity, thrust_ratio
from .jlt import AxisBoundary, MotionLimits, plan_3d
from .kinematics import euler_rate_transform, euler_to_rotation
from .params import RobotParams, default_params
from .state import ControlInput, RobotState

def _cross3(a, b) -> np.ndarray:
    return np.array([
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])


# stick-anchor tangential contact (parked wheels)
ANCHOR_STIFFNESS = 40000.0   # N/m
ANCHOR_DAMPING = 800.0       # N s/m
ANCHOR_SPEED = 0.08          # m/s, engage below this contact speed
BRAKE_DAMPING = 2000.0       # N s/m equivalent while braking

# strut attachment depth below the CoM, body frame
ATTACH_DROP = 0.12


@dataclass
class Terrain:
    """Ramp rising with +x for x >= 0, flat elsewhere."""

    slope: float = 0.0  # rad

    def __post_init__(self):
        if not 0.0 <= self.slope <= math.radians(35.0):
            raise ValueError(f"slope must lie in [0, 35 deg], got {self.slope}")

    def height(self, x: float, y: float) -> float:
        return math.tan(self.slope) * x if x > 0.0 else 0.0

    def normal(self, x: float, y: float) -> np.ndarray:
        if x > 0.0 and self.slope > 0.0:
            return np.array([-math.sin(self.slope), 0.0, math.cos(self.slope)])
        return np.array([0.0, 0.0, 1.0])

    def surface_distance(self, point: np.ndarray) -> float:
        """Signed distance to the active surface (positive above)."""
        x, y, z = point
        if x > 0.0 and self.slope > 0.0:
            return float(-math.sin(self.slope) * x + math.cos(self.slope) * z)
        return float(z)


@dataclass
class DisturbanceSpec:
    """Random CoM force: class magnitude, random direction, piecewise hold."""

    kind: str = "none"          # none | uniform | fixed
    magnitude: float = 0.0      # N (max for uniform, value for fixed)
    hold_interval: float = 0.5  # s

    def __post_init__(self):
        if self.kind not in ("none", "uniform", "fixed"):
            raise ValueError(f"unknown disturbance kind {self.kind!r}")
        if self.magnitude < 0:
            raise ValueError("magnitude must be >= 0")


class DisturbanceGenerator:
    def __init__(self, spec: DisturbanceSpec, seed: int):
        self.spec = spec
        self.rng = np.random.default_rng(seed)
        self._next_draw = 0.0
        self._force = np.zeros(3)

    def force(self, t: float) -> np.ndarray:
        if self.spec.kind == "none":
            return self._force
        if t >= self._next_draw:
            direction = self.rng.normal(size=3)
            norm = np.linalg.norm(direction)
            direction = direction / norm if norm > 1e-12 else np.array([1.0, 0, 0])
            if self.spec.kind == "uniform":
                mag = self.rng.uniform(0.0, self.spec.magnitude)
            else:
                mag = self.spec.magnitude
            self._force = mag * direction
            self._next_draw = t + self.spec.hold_interval
        return self._force


@dataclass
class SimConfig:
    dt: float = 1e-3
    duration: float = 10.0
    control_every: int = 4      # control updates once per N dynamics steps
    seed: int = 0

    def __post_init__(self):
        if not 1e-4 <= self.dt <= 5e-3:
            raise ValueError(f"dt must lie in [1e-4, 5e-3], got {self.dt}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")


class CoupledModel:
    """Derivative assembly for one parameter set over one terrain."""

    def __init__(self, params: RobotParams, terrain: Terrain):
        self.params = params
        self.terrain = terrain
        fp = params.flight
        sp = params.suspension
        self.body_mass = fp.m - 4.0 * sp.unsprung_mass
        cp = params.chassis
        self.corners_body = np.array([
            [cp.lf, +cp.track / 2, -ATTACH_DROP],
            [cp.lf, -cp.track / 2, -ATTACH_DROP],
            [-cp.lr, +cp.track / 2, -ATTACH_DROP],
            [-cp.lr, -cp.track / 2, -ATTACH_DROP],
        ])
        self.rotors_body = rotor_positions(fp)
        # strut free length so the settled flat-ground stack matches com_height
        w_sprung = self.body_mass * fp.g / 4.0
        w_corner = w_sprung + sp.unsprung_mass * fp.g
        self.tire_static_pen = w_corner / sp.k_tire
        z_u_static = cp.wheel_radius - self.tire_static_pen
        z_att_static = params.com_height - ATTACH_DROP
        self.strut_free = (z_att_static - z_u_static) + w_sprung / sp.k_shock
        self.rest_height = params.com_height

    # -- contact -----------------------------------------------------------

    def wheel_contact_force(self, wheel_center: np.ndarray,
                            wheel_velocity: np.ndarray):
        """Penalty normal force along the terrain normal at one wheel.

        Returns (force vector, penetration, normal unit vector).
        """
        sp = self.params.suspension
        r_w = self.params.chassis.wheel_radius
        n = self.terrain.normal(wheel_center[0], wheel_center[1])
        pen = r_w - self.terrain.surface_distance(wheel_center)
        if pen <= 0.0:
            return np.zeros(3), 0.0, n
        pen_rate = -(n[0] * wheel_velocity[0] + n[1] * wheel_velocity[1]
                     + n[2] * wheel_velocity[2])
        mag = max(0.0, sp.k_tire * pen + sp.b_tire * pen_rate)
        return mag * n, pen, n

    def derivative(self, x: np.ndarray, ctx: "StepContext") -> np.ndarray:
        p = self.params
        fp = p.flight
        sp = p.suspension
        gp = p.ground_effect
        pos = x[0:3]
        vel = x[3:6]
        euler = x[6:9]
        rates = x[9:12]
        z_u = x[12:16]
        zdot_u = x[16:20]

        rot = euler_to_rotation(euler)
        d_b = euler_rate_transform(euler)
        euler_dot = d_b @ rates

        # rotor thrust with per-hub ground effect
        u = ctx.control
        thrusts = fp.c_omega * u.rotor_speeds**2
        if ctx.ground_effect and np.any(thrusts > 0.0):
            speed = math.hypot(vel[0], vel[1])
            for i in range(4):
                hub = pos + rot @ self.rotors_body[i]
                clearance = hub[2] - self.terrain.height(hub[0], hub[1])
                if clearance < gp.cutoff:
                    v_i = induced_velocity(thrusts[i], gp)
                    thrusts[i] *= thrust_ratio(clearance, speed, v_i, gp)
        wrench = wrench_from_thrusts(thrusts, fp)
        thrust_world = rot[:, 2] * wrench.thrust

        m_g = gyroscopic_torque(rates, u.rotor_speeds, fp)
        m_d = aero_friction_torque(euler_dot, fp)
        torque = np.array([wrench.tau_roll, wrench.tau_pitch, wrench.tau_yaw])
        torque += ctx.extra_disturbance_torque

        force = thrust_world.copy()
        force[0] -= fp.d_x * vel[0]
        force[1] -= fp.d_y * vel[1]
        force[2] -= fp.d_z * vel[2] + self.body_mass * fp.g
        force += ctx.disturbance_force

        zdd_u = np.empty(4)
        deltas = ackermann_angles(u.steering, p.chassis)
        omega_world = rot @ rates
        for i in range(4):
            r_w = rot @ self.corners_body[i]
            att = pos + r_w
            att_vel = vel + _cross3(omega_world, r_w)
            strut_len = att[2] - z_u[i]
            strut_rate = att_vel[2] - zdot_u[i]
            f_strut = sp.k_shock * (self.strut_free - strut_len) - sp.b_shock * strut_rate

            wheel_center = np.array([att[0], att[1], z_u[i]])
            wheel_vel = np.array([att_vel[0], att_vel[1], zdot_u[i]])
            f_contact, pen, n = self.wheel_contact_force(wheel_center, wheel_vel)
            normal_mag = math.sqrt(f_contact[0]**2 + f_contact[1]**2
                                   + f_contact[2]**2)

            f_tan = np.zeros(3)
            if pen > 0.0 and normal_mag > 0.0:
                f_tan = self._tangential_force(
                    i, wheel_center, wheel_vel, n, normal_mag, deltas[i], rot, ctx)

            # vertical pieces drive the unsprung mass; the rest loads the body
            zdd_u[i] = (-fp.g + (-f_strut + f_contact[2]) / sp.unsprung_mass)
            force[0] += f_contact[0] + f_tan[0]
            force[1] += f_contact[1] + f_tan[1]
            force[2] += f_strut + f_tan[2]
            lever = np.array([r_w[0], r_w[1], z_u[i] - pos[2]])
            torque += rot.T @ _cross3(
                lever, (f_contact[0] + f_tan[0],
                        f_contact[1] + f_tan[1],
                        f_strut + f_tan[2]))

        accel = force / self.body_mass

        jx, jy, jz = ctx.inertia
        pr, qr, rr = rates
        l = fp.arm_length
        rate_dot = np.array([
            (-fp.d_phi * l * pr + torque[0] + qr * rr * (jy - jz) - m_g[0] - m_d[0]) / jx,
            (-fp.d_theta * l * qr + torque[1] + pr * rr * (jz - jx) - m_g[1] - m_d[1]) / jy,
            (-fp.d_psi * l * rr + torque[2] + pr * qr * (jx - jy) - m_g[2] - m_d[2]) / jz,
        ])

        out = np.empty(20)
        out[0:3] = vel
        out[3:6] = accel
        out[6:9] = euler_dot
        out[9:12] = rate_dot
        out[12:16] = zdot_u
        out[16:20] = zdd_u
        return out

    def _tangential_force(self, i, wheel_center, wheel_vel, n, normal_mag,
                          delta, rot, ctx):
        p = self.params
        cp = p.chassis
        tp = p.tires
        u = ctx.control
        vn = n[0] * wheel_vel[0] + n[1] * wheel_vel[1] + n[2] * wheel_vel[2]
        v_tan = wheel_vel - vn * n

        anchor = ctx.anchors[i]
        if anchor is not None:
            f = -ANCHOR_STIFFNESS * (wheel_center[:2] - anchor) \
                - ANCHOR_DAMPING * v_tan[:2]
            cap = 0.9 * tp.mu * normal_mag
            mag = float(np.hypot(f[0], f[1]))
            if mag > cap and mag > 0.0:
                f *= cap / mag
            f3 = np.array([f[0], f[1], 0.0])
            return f3 - (n @ f3) * n  # keep it in the contact plane

        # rolling contact: longitudinal drive/brake + lateral slip force
        cd, sd = math.cos(delta), math.sin(delta)
        heading = rot[:, 0] * cd + rot[:, 1] * sd
        hn = n[0] * heading[0] + n[1] * heading[1] + n[2] * heading[2]
        long_dir = heading - hn * n
        norm = math.sqrt(long_dir[0]**2 + long_dir[1]**2 + long_dir[2]**2)
        if norm < 1e-9:
            return np.zeros(3)
        long_dir /= norm
        lat_dir = _cross3(n, long_dir)

        v_long = (long_dir[0] * v_tan[0] + long_dir[1] * v_tan[1]
                  + long_dir[2] * v_tan[2])
        v_lat = (lat_dir[0] * v_tan[0] + lat_dir[1] * v_tan[1]
                 + lat_dir[2] * v_tan[2])
        f_long = min(cp.drive_force_max,
                     max(-cp.drive_force_max,
                         u.wheel_torques[i] / cp.wheel_radius))
        if u.brake > 0.0:
            f_long -= math.copysign(
                min(u.brake * cp.drive_force_max, BRAKE_DAMPING * abs(v_long)),
                v_long)
        slip = -math.atan2(v_lat, abs(v_long) + 0.2)
        f_lat = tire_lateral_force(slip, normal_mag, tp)
        f_long, f_lat = friction_ellipse_clamp(f_long, f_lat, normal_mag, tp.mu)
        return f_long * long_dir + f_lat * lat_dir

    def contact_summary(self, state: RobotState, control: ControlInput,
                        anchors) -> tuple[int, float, float]:
        """(wheels in contact, total normal force, total tangential force)."""
        rot = euler_to_rotation(state.euler)
        omega_world = rot @ state.rates
        deltas = ackermann_angles(control.steering, self.params.chassis)
        ctx = StepContext(control=control, anchors=anchors,
                          inertia=(1.0, 1.0, 1.0))
        n_contact = 0
        fn_total = 0.0
        ft_total = 0.0
        for i in range(4):
            r_w = rot @ self.corners_body[i]
            att = state.pos + r_w
            att_vel = state.vel + _cross3(omega_world, r_w)
            wheel_center = np.array([att[0], att[1], state.z_u[i]])
            wheel_vel = np.array([att_vel[0], att_vel[1], state.zdot_u[i]])
            f_contact, pen, n = self.wheel_contact_force(wheel_center, wheel_vel)
            if pen > 0.0:
                n_contact += 1
                fn_total += float(np.linalg.norm(f_contact))
                f_tan = self._tangential_force(
                    i, wheel_center, wheel_vel, n,
                    float(np.linalg.norm(f_contact)), deltas[i], rot, ctx)
                ft_total += float(np.linalg.norm(f_tan))
        return n_contact, fn_total, ft_total

    def update_anchors(self, state: RobotState, control: ControlInput,
                       anchors: list) -> None:
        """Engage/release the per-wheel stick anchors (between steps)."""
        rot = euler_to_rotation(state.euler)
        omega_world = rot @ state.rates
        parked = (float(np.max(np.abs(control.wheel_torques))) < 1e-6
                  and abs(control.steering) < 1e-6)
        for i in range(4):
            r_w = rot @ self.corners_body[i]
            att = state.pos + r_w
            att_vel = state.vel + _cross3(omega_world, r_w)
            wheel_center = np.array([att[0], att[1], state.z_u[i]])
            wheel_vel = np.array([att_vel[0], att_vel[1], state.zdot_u[i]])
            _, pen, n = self.wheel_contact_force(wheel_center, wheel_vel)
            v_tan = wheel_vel - (n @ wheel_vel) * n
            if (pen > 0.0 and parked
                    and float(np.linalg.norm(v_tan)) < ANCHOR_SPEED):
                if anchors[i] is None:
                    anchors[i] = wheel_center[:2].copy()
            else:
                anchors[i] = None


@dataclass
class StepContext:
    """Everything frozen over one RK4 step."""

    control: ControlInput
    anchors: list = field(default_factory=lambda: [None, None, None, None])
    disturbance_force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    extra_disturbance_torque: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ground_effect: bool = True
    inertia: tuple = (0.79, 0.79, 1.44)


def rk4_step(model: CoupledModel, x: np.ndarray, ctx: StepContext,
             dt: float) -> np.ndarray:
    k1 = model.derivative(x, ctx)
    k2 = model.derivative(x + 0.5 * dt * k1, ctx)
    k3 = model.derivative(x + 0.5 * dt * k2, ctx)
    k4 = model.derivative(x + dt * k3, ctx)
    return x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state: RobotState, control: ControlInput, model: CoupledModel,
         dt: float, anchors=None, disturbance=None,
         fold_fraction: float | None = None) -> RobotState:
    """Advance the coupled state by one RK4 step (library entry point)."""
    if anchors is None:
        anchors = [None] * 4
    ctx = StepContext(
        control=control, anchors=anchors,
        disturbance_force=(disturbance if disturbance is not None else np.zeros(3)),
        inertia=tuple(total_inertia(
            model.params.flight, model.params.arms,
            fold_fraction=fold_fraction,
            body_diag=(model.params.body_jx, model.params.body_jy,
                       model.params.body_jz))),
    )
    x = rk4_step(model, state.to_vector(), ctx, dt)
    if not np.all(np.isfinite(x)) or np.max(np.abs(x[0:3])) > 1e4:
        raise SimulationDivergedError("state diverged", last_state=state)
    out = state.copy()
    out.apply_vector(x)
    return out


class RestState(NamedTuple):
    state: RobotState
    anchors: list  # per-wheel stick anchor points holding the slope


def static_rest_state(params: RobotParams, terrain: Terrain,
                      x_pos: float, y_pos: float = 0.0,
                      settle_time: float = 1.2) -> RestState:
    """Settled parked state at a terrain location (simulated relaxation)."""
    model = CoupledModel(params, terrain)
    slope = terrain.slope if x_pos > 0.0 else 0.0
    sp = params.suspension
    cp = params.chassis
    fp = params.flight
    cos_s = math.cos(slope)
    state = RobotState()
    state.euler = np.array([0.0, -slope, 0.0])
    rot = euler_to_rotation(state.euler)
    w_corner = (model.body_mass / 4.0 + sp.unsprung_mass) * fp.g * cos_s
    pen = w_corner / sp.k_tire
    strut_comp = model.body_mass * fp.g * cos_s / 4.0 / sp.k_shock
    # place the CoM so each wheel sits on the surface with that penetration
    state.pos = np.array([x_pos, y_pos, 0.0])
    z_guess = 0.0
    for i in range(4):
        r_w = rot @ model.corners_body[i]
        x_w = x_pos + r_w[0]
        # wheel center distance from plane = wheel radius - penetration
        target = cp.wheel_radius - pen
        z_w = (target + math.sin(slope) * x_w) / cos_s if (x_w > 0 and slope > 0) else target
        z_att = z_w + model.strut_free - strut_comp
        z_guess += (z_att - r_w[2]) / 4.0
        state.z_u[i] = z_w
    state.pos[2] = z_guess
    anchors = [None] * 4
    control = ControlInput()
    model.update_anchors(state, control, anchors)
    steps = int(settle_time / 1e-3)
    for _ in range(steps):
        state = step(state, control, model, 1e-3, anchors=anchors,
                     fold_fraction=0.0)
        model.update_anchors(state, control, anchors)
    state.mode = Mode.STATIC.value
    return RestState(state, anchors)


# -- scenario runner --------------------------------------------------------

FLIGHT_MODES = {Mode.TAKEOFF, Mode.FLYING, Mode.HOVERING,
                Mode.TRAJECTORY_PLANNING, Mode.LANDING}

LOG_COLUMNS = (
    "t,mode,x,y,z,vx,vy,vz,roll,pitch,yaw,p,q,r,"
    "stroke_fl,stroke_fr,stroke_rl,stroke_rr,"
    "rotor1,rotor2,rotor3,rotor4,"
    "wheel_fl,wheel_fr,wheel_rl,wheel_rr,"
    "dist_x,dist_y,dist_z,fn_total,ft_total,event"
)


@dataclass
class ScenarioSpec:
    name: str = "scenario"
    slope_deg: float = 10.0
    controller: str = "proposed"      # proposed | pid-baseline
    disturbance: DisturbanceSpec = field(default_factory=DisturbanceSpec)
    seed: int = 0
    target_x: float = 1.2
    target_y: float = 0.0
    start_offset: tuple = None               # None: 2 m out along the normal
    descent_speed: float = 0.3               # m/s at touchdown (normal dir)
    align_fraction: float = 1.0              # terminal attitude-alignment share
    touchdown_roll: float = 0.0              # m/s extra roll-on at contact
    align_window: float = 0.45               # s, posture-priority blend window
    duration: float = 12.0
    dt: float = 1e-3
    control_every: int = 4
    land_at: float = 0.2                     # s, time the LAND command fires
    runout: bool = False
    initial_mode: str = "hovering"
    commands: tuple = None                    # optional ((t, Command), ...)

    def __post_init__(self):
        if self.controller not in ("proposed", "pid-baseline"):
            raise ValueError(f"unknown controller {self.controller!r}")


class SimLog:
    """Column-oriented time series plus the event list."""

    def __init__(self, spec: ScenarioSpec):
        self.spec = spec
        self.rows = {key: [] for key in LOG_COLUMNS.split(",")}
        self.events: list = []
        self.target = np.zeros(3)
        self.rest_strokes = np.zeros(4)
        self.diverged = False

    def append(self, t, state: RobotState, strokes, control: ControlInput,
               dist, fn_total, ft_total, event: str) -> None:
        r = self.rows
        r["t"].append(t)
        r["mode"].append(state.mode)
        for k, v in zip(("x", "y", "z"), state.pos):
            r[k].append(float(v))
        for k, v in zip(("vx", "vy", "vz"), state.vel):
            r[k].append(float(v))
        for k, v in zip(("roll", "pitch", "yaw"), state.euler):
            r[k].append(float(v))
        for k, v in zip(("p", "q", "r"), state.rates):
            r[k].append(float(v))
        for k, v in zip(("stroke_fl", "stroke_fr", "stroke_rl", "stroke_rr"), strokes):
            r[k].append(float(v))
        for k, v in zip(("rotor1", "rotor2", "rotor3", "rotor4"), control.rotor_speeds):
            r[k].append(float(v))
        for k, v in zip(("wheel_fl", "wheel_fr", "wheel_rl", "wheel_rr"),
                        state.wheel_speeds):
            r[k].append(float(v))
        for k, v in zip(("dist_x", "dist_y", "dist_z"), dist):
            r[k].append(float(v))
        r["fn_total"].append(float(fn_total))
        r["ft_total"].append(float(ft_total))
        r["event"].append(event)
        if event:
            for part in event.split(";"):
                self.events.append((t, part))

    def column(self, name: str) -> np.ndarray:
        vals = self.rows[name]
        if name in ("mode", "event"):
            return np.array(vals, dtype=object)
        return np.array(vals, dtype=float)

    def event_time(self, name: str):
        for t, ev in self.events:
            if ev == name:
                return t
        return None

    def to_csv(self, path) -> None:
        keys = LOG_COLUMNS.split(",")
        with open(path, "w", newline="") as fh:
            fh.write(f"# landair-log v1 seed={self.spec.seed} "
                     f"scenario={self.spec.name} controller={self.spec.controller} "
                     f"slope_deg={self.spec.slope_deg:g} "
                     f"target=({self.target[0]!r},{self.target[1]!r},{self.target[2]!r})\n")
            fh.write(LOG_COLUMNS + "\n")
            n = len(self.rows["t"])
            for i in range(n):
                parts = []
                for k in keys:
                    v = self.rows[k][i]
                    parts.append(v if isinstance(v, str) else repr(v))
                fh.write(",".join(parts) + "\n")


def hover_linear_model(params: RobotParams, terrain: Terrain,
                       altitude: float = 5.0) -> LinearModel:
    """Linearized coupled airborne model around hover, thrust inputs.

    The disturbance column is a collective-thrust offset, the channel
    ground effect acts through.
    """
    model = CoupledModel(params, terrain)
    fp = params.flight
    x0 = np.zeros(20)
    x0[2] = altitude
    # unsprung masses hang on the struts under gravity
    sp = params.suspension
    hang = sp.unsprung_mass * fp.g / sp.k_shock
    for i in range(4):
        x0[12 + i] = altitude - ATTACH_DROP - model.strut_free - hang
    u0 = np.full(4, fp.hover_thrust_per_rotor)
    inertia = tuple(total_inertia(
        fp, params.arms, fold_fraction=0.0,
        body_diag=(params.body_jx, params.body_jy, params.body_jz)))

    def f(x, u):
        speeds = np.sqrt(np.clip(u, 0.0, None) / fp.c_omega)
        ctx = StepContext(control=ControlInput(rotor_speeds=speeds),
                          ground_effect=False, inertia=inertia)
        return model.derivative(x, ctx)

    def f_dist(x, u, d):
        # collective thrust offset split evenly across rotors
        return f(x, u + d / 4.0)

    return linearize(f, x0, u0, c_out=None, disturbance=f_dist)


def default_lqr_weights(params: RobotParams) -> LqrWeights:
    fp = params.flight
    q = np.diag([
        40.0, 40.0, 44.0,      # position
        16.0, 16.0, 18.0,      # velocity
        30.0, 30.0, 8.0,       # attitude
        2.0, 2.0, 1.0,         # rates
        *([1e-4] * 8),         # suspension substate
    ])
    r = np.eye(4) * 0.02
    t_max = fp.thrust_max_per_rotor
    n = 20
    c_out = np.eye(n)
    return LqrWeights(
        q=q, r=r,
        t_w=np.eye(1) * 1.0,
        p_s=np.eye(n) * 2.0,
        y_min=np.full(n, -50.0), y_max=np.full(n, 50.0),
        du_min=np.full(4, -60.0), du_max=np.full(4, 60.0),
        u_max=np.full(4, t_max),
    )


def build_controller(name: str, params: RobotParams, terrain: Terrain,
                     model: CoupledModel):
    if name == "proposed":
        lin = hover_linear_model(params, terrain)
        weights = default_lqr_weights(params)

        def clearances(state: RobotState) -> np.ndarray:
            rot = euler_to_rotation(state.euler)
            out = np.empty(4)
            for i in range(4):
                hub = state.pos + rot @ model.rotors_body[i]
                out[i] = hub[2] - terrain.height(hub[0], hub[1])
            return out

        return FusionController(params, lin, weights, rotor_clearances=clearances)
    return CascadePidController(params)


# the plan aims slightly through the surface so the wheels load up while the
# trajectory is still on-profile (attitude aligned, horizontal speed zeroed)
PRESS_DEPTH = 0.05
# hand-over point of the two-segment landing profile, measured along the
# terrain normal, and the committed-alignment segment duration
COMMIT_DISTANCE = 0.45
COMMIT_TIME = 0.6
APPROACH_SPEED = 0.3          # m/s along the terrain normal at hand-over
# uphill tangential entry into the commit: the downhill pull of the tilting
# thrust burns this speed off so the tangential motion dies at touchdown;
# both scale with the slope
COMMIT_TANGENT_SPEED = 2.0    # * sin(slope), m/s
COMMIT_TANGENT_OFFSET = 0.75  # * sin(slope), m downhill of the target
# duration weight for the free-time approach segment; higher lands sooner
APPROACH_URGENCY = 60.0


class LandingPlan:
    """Two chained per-axis plans: normal-direction approach, then a short
    committed segment that swings the attitude to the slope while the
    terminal surge zeroes the tangential speed."""

    def __init__(self, approach, commit):
        self.approach = approach
        self.commit = commit
        self.duration = approach.duration + commit.duration
        self.total_cost = approach.total_cost + commit.total_cost

    def state_at(self, tau: float):
        if tau <= self.approach.duration:
            axes = self.approach.axes
            s = tau
        else:
            axes = self.commit.axes
            s = min(tau - self.approach.duration, self.commit.duration)
        pos = np.array([a.position(s) for a in axes])
        vel = np.array([a.velocity(s) for a in axes])
        acc = np.array([a.acceleration(s) for a in axes])
        if tau > self.duration:
            # continue the terminal descent until contact interrupts
            pos = pos + vel * (tau - self.duration)
        return pos, vel, acc


def build_landing_plan(state: RobotState, target: np.ndarray, slope: float,
                       descent_speed: float, lim: MotionLimits, g: float,
                       align_fraction: float = 1.0,
                       touchdown_roll: float = 0.0) -> LandingPlan:
    """Plan a slope landing from the current state.

    The approach runs to a hand-over point on the terrain normal above the
    target; the committed segment then carries the full (scaled)
    surface-normal terminal acceleration, so the flatness attitude reaches
    slope alignment right at touchdown without a long drifting tilt.
    """
    normal = np.array([-math.sin(slope), 0.0, math.cos(slope)])
    tangent_up = np.array([math.cos(slope), 0.0, math.sin(slope)])
    handover = (target + COMMIT_DISTANCE * normal
                - COMMIT_TANGENT_OFFSET * math.sin(slope) * tangent_up)
    v_handover = (-APPROACH_SPEED * normal
                  + COMMIT_TANGENT_SPEED * math.sin(slope) * tangent_up)
    approach_bounds = [
        AxisBoundary(p0=float(state.pos[k]), v0=float(state.vel[k]),
                     pt=float(handover[k]), vt=float(v_handover[k]))
        for k in range(3)
    ]
    approach = plan_3d(approach_bounds, lim, duration_weight=APPROACH_URGENCY)

    a_t = align_fraction * np.array([
        -g * math.sin(slope) * math.cos(slope),
        0.0,
        -g * math.sin(slope) ** 2,
    ])
    touchdown = target - PRESS_DEPTH * normal
    v_t = descent_speed * np.array([math.sin(slope), 0.0, -math.cos(slope)])
    v_t[0] += touchdown_roll
    commit_bounds = [
        AxisBoundary(p0=float(handover[k]), v0=float(v_handover[k]),
                     pt=float(touchdown[k]), vt=float(v_t[k]), at=float(a_t[k]),
                     duration=COMMIT_TIME)
        for k in range(3)
    ]
    commit = plan_3d(commit_bounds, lim, duration=COMMIT_TIME)
    return LandingPlan(approach, commit)


_REST_CACHE: dict = {}


def run_scenario(spec: ScenarioSpec, params: RobotParams | None = None) -> SimLog:
    """Execute one landing scenario: FSM + controller + coupled dynamics."""
    default = params is None
    if default:
        params = default_params()
    terrain = Terrain(math.radians(spec.slope_deg))
    model = CoupledModel(params, terrain)
    log = SimLog(spec)

    # settling the parked pose is deterministic per location; cache it for
    # batch runs with the default parameter set
    cache_key = (spec.slope_deg, spec.target_x, spec.target_y)
    if default and cache_key in _REST_CACHE:
        rest = _REST_CACHE[cache_key]
    else:
        rest = static_rest_state(params, terrain, spec.target_x,
                                 spec.target_y).state
        if default:
            _REST_CACHE[cache_key] = rest
    target = rest.pos.copy()
    log.target = target
    rest_strokes = _strokes(model, rest)
    log.rest_strokes = rest_strokes

    state = RobotState()
    if spec.initial_mode == "static":
        state = rest.copy()
        mode = Mode.STATIC
    else:
        if spec.start_offset is None:
            normal = np.array([-math.sin(terrain.slope), 0.0,
                               math.cos(terrain.slope)])
            offset = 2.0 * normal + np.array([0.0, 0.1, 0.0])
        else:
            offset = np.asarray(spec.start_offset, dtype=float)
        state.pos = target + offset
        state.rotor_speeds = np.full(4, params.flight.hover_speed)
        sp = params.suspension
        hang = sp.unsprung_mass * params.flight.g / sp.k_shock
        for i in range(4):
            state.z_u[i] = state.pos[2] - ATTACH_DROP - model.strut_free - hang
        mode = Mode.HOVERING
    state.mode = mode.value

    controller = build_controller(spec.controller, params, terrain, model)
    detector = TouchdownDetector()
    disturbance = DisturbanceGenerator(spec.disturbance, spec.seed)
    lim = MotionLimits(
        f_min=0.1 * params.flight.m * params.flight.g,
        f_max=4.0 * params.flight.thrust_max_per_rotor,
        omega_max=3.0,
        v_max=3.0,
        j_max=80.0,
    )

    commands = list(spec.commands) if spec.commands else []
    if spec.initial_mode == "hovering":
        commands.append((spec.land_at, Command.LAND))
    commands.sort(key=lambda c: c[0])

    hover_ref = FlightReference(pos=state.pos.copy())
    plan = None
    plan_t0 = None
    plan_ready = False
    control = ControlInput()
    anchors = [None] * 4
    touchdown_confirmed = False
    touchdown_time = None
    static_since = None
    shutdown = 1.0  # rotor throttle-cut factor once wheels meet the ground
    inertia = tuple(total_inertia(
        params.flight, params.arms, fold_fraction=0.0,
        body_diag=(params.body_jx, params.body_jy, params.body_jz)))

    n_steps = int(round(spec.duration / spec.dt))
    t = 0.0
    cmd_idx = 0
    n_contact, fn_total, ft_total = 0, 0.0, 0.0
    for k in range(n_steps):
        events = []
        command = Command.NONE
        if cmd_idx < len(commands) and commands[cmd_idx][0] <= t:
            command = commands[cmd_idx][1]
            cmd_idx += 1

        if k % 2 == 0:
            n_contact, fn_total, ft_total = model.contact_summary(
                state, control, anchors)
        if detector.update(t, n_contact, float(state.vel[2])):
            if not touchdown_confirmed:
                events.append("touchdown")
                touchdown_time = t
            touchdown_confirmed = True

        altitude = state.pos[2] - terrain.height(state.pos[0], state.pos[1]) \
            - model.rest_height
        ctx = FsmContext(
            altitude=float(altitude),
            arms_deployed=state.arm_fold < 0.01,
            arms_folded=state.arm_fold > 0.99,
            at_waypoint=False,
            plan_ready=plan_ready,
            touchdown=touchdown_confirmed,
            ground_speed=float(np.hypot(state.vel[0], state.vel[1])),
            runout=spec.runout,
        )
        result = fsm_step(mode, ctx, command)
        if result.mode is not mode:
            events.append(f"mode:{mode.value}->{result.mode.value}")
            mode = result.mode
            state.mode = mode.value
            if mode is Mode.TRAJECTORY_PLANNING:
                if spec.controller == "proposed":
                    plan = build_landing_plan(
                        state, target, terrain.slope, spec.descent_speed,
                        lim, params.flight.g, spec.align_fraction,
                        spec.touchdown_roll)
                    plan_t0 = t
                plan_ready = True
            if mode is Mode.STATIC and static_since is None:
                static_since = t

        # throttle cut: once an axle is down in landing near the target the
        # rotors cut, settling the robot onto its wheels (same logic for
        # both controllers); a graze far from the aim point is not touchdown
        horiz_dist = math.hypot(state.pos[0] - target[0], state.pos[1] - target[1])
        if mode is Mode.LANDING and n_contact >= 2 and horiz_dist < 0.5:
            shutdown = 0.0
        if mode in (Mode.TAKEOFF, Mode.FLYING):
            shutdown = 1.0

        # control update
        if k % spec.control_every == 0:
            dt_ctrl = spec.dt * spec.control_every
            rotors_on = result.routing.rotors and mode in FLIGHT_MODES
            if not rotors_on:
                control = ControlInput(brake=1.0 if n_contact > 0 else 0.0)
            elif spec.controller == "proposed":
                ref = _fusion_reference(mode, plan, plan_t0, t, hover_ref,
                                        target, spec.descent_speed)
                controller.ge_compensation = mode in (Mode.TAKEOFF, Mode.LANDING)
                posture = None
                if mode is Mode.LANDING and plan is not None:
                    t_rem = plan_t0 + plan.duration - t
                    s = min(max((spec.align_window - t_rem)
                                / max(spec.align_window, 1e-6), 0.0), 1.0)
                    if s > 0.0:
                        posture = (-terrain.slope, s * s * (3.0 - 2.0 * s))
                control = controller.control(state, ref, dt_ctrl,
                                             posture=posture)
                if touchdown_confirmed or (mode is Mode.LANDING and n_contact > 0):
                    control.brake = 1.0
            else:
                ref = _baseline_reference(mode, hover_ref, target,
                                          spec.descent_speed, state)
                control = controller.control(state, ref, dt_ctrl)
                if touchdown_confirmed or (mode is Mode.LANDING and n_contact > 0):
                    control.brake = 1.0
            if shutdown < 1.0:
                control.rotor_speeds = control.rotor_speeds * 0.0
                control.brake = 1.0
            if mode is Mode.STATIC or mode is Mode.TRANSFORM:
                control = ControlInput(brake=1.0 if n_contact > 0 else 0.0)

        model.update_anchors(state, control, anchors)
        dist_force = disturbance.force(t)
        strokes = _strokes(model, state) - rest_strokes
        log.append(t, state, strokes, control, dist_force, fn_total, ft_total,
                   ";".join(events))

        step_ctx = StepContext(
            control=control, anchors=anchors,
            disturbance_force=dist_force, inertia=inertia,
            ground_effect=True,
        )
        x = rk4_step(model, state.to_vector(), step_ctx, spec.dt)
        if not np.all(np.isfinite(x)) or np.max(np.abs(x[0:3])) > 1e4:
            log.diverged = True
            raise SimulationDivergedError("scenario diverged", last_state=state,
                                          partial_log=log)
        state.apply_vector(x)
        # wheel speed bookkeeping (rolling proxy while in contact)
        roll_speed = (float(np.hypot(state.vel[0], state.vel[1]))
                      / params.chassis.wheel_radius) if n_contact > 0 else 0.0
        state.wheel_speeds[:] = roll_speed
        t += spec.dt
        if static_since is not None and t - static_since > 1.5:
            break
    return log


def _strokes(model: CoupledModel, state: RobotState) -> np.ndarray:
    rot = euler_to_rotation(state.euler)
    out = np.empty(4)
    for i in range(4):
        att = state.pos + rot @ model.corners_body[i]
        out[i] = (att[2] - state.z_u[i]) - model.strut_free
    return out


def _fusion_reference(mode, plan, plan_t0, t, hover_ref, target,
                      descent_speed) -> FlightReference:
    if mode in (Mode.TRAJECTORY_PLANNING, Mode.LANDING) and plan is not None:
        pos, vel, acc = plan.state_at(t - plan_t0)
        return FlightReference(pos=pos, vel=vel, acc=acc)
    return hover_ref


def _baseline_reference(mode, hover_ref, target, descent_speed,
                        state) -> FlightReference:
    if mode in (Mode.TRAJECTORY_PLANNING, Mode.LANDING):
        # waypoint descent straight at (and through) the touchdown point;
        # the normal controller keeps commanding descent until contact
        aim = target.copy()
        aim[2] -= 0.4
        return FlightReference(pos=aim)
    return hover_ref
