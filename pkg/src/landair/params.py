"""Physical parameter sets for the land-air platform.

Datasheet values (masses, speeds, motor ratings, 26-inch propellers) fix the
scale; coefficients the datasheet leaves open (thrust/drag coefficients,
tire fit constants, suspension rates) are calibration constants chosen so
the platform hovers at 55 % of rotor speed and settles in a fraction of a
second on its suspension. Every default can be overridden per scenario.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

GRAVITY = 9.81

# measured platform constants
TOTAL_MASS = 20.62          # kg, without payload
BATTERY_MASS = 5.74         # kg
FLIGHT_MODULE_MASS = 7.81   # kg
CHASSIS_MASS = 7.07         # kg
MAX_FLY_SPEED = 7.47        # m/s
MAX_DRIVE_SPEED = 15.10     # m/s
PROP_RADIUS = 0.3302        # m (26-inch propeller)
BODY_HEIGHT = 0.552         # m

# rotor speed ceiling from the 170 Kv flight motors on a 12S pack;
# hover is calibrated to sit at 55 % of this
OMEGA_ROTOR_MAX = 790.0     # rad/s
HOVER_SPEED_FRACTION = 0.55

# folding the arms pulls each rotor tip inboard by roughly the span ratio
# of the two configurations (700 mm folded vs 1250 mm deployed)
FOLD_RADIUS_RATIO = 0.56
FRONT_ARM_FOLD_TILT = math.radians(20.0)


def _hover_thrust_coefficient() -> float:
    # collective thrust at hover equals weight: 4 * c * (0.55 * w_max)^2 = m * g
    w_hover = HOVER_SPEED_FRACTION * OMEGA_ROTOR_MAX
    return TOTAL_MASS * GRAVITY / (4.0 * w_hover * w_hover)


@dataclass
class FlightParams:
    """Rigid-body and rotor constants for the flight module."""

    m: float = TOTAL_MASS                     # kg, full platform flies as one body
    jx: float = 0.79                          # kg m^2, arms deployed
    jy: float = 0.79
    jz: float = 1.44
    arm_length: float = 0.47                  # m, hub to rotor axis
    alpha: float = math.pi / 4                # rad, half inter-arm angle (X config)
    c_omega: float = field(default_factory=_hover_thrust_coefficient)  # N s^2/rad^2
    c_m: float = 5.5e-6                       # N m s^2/rad^2, rotor drag torque
    d_x: float = 0.35                         # N s/m, translational aero friction
    d_y: float = 0.35
    d_z: float = 0.45
    d_phi: float = 0.02                       # N m s/rad, rotational aero damping
    d_theta: float = 0.02
    d_psi: float = 0.03
    j_rotor: float = 2.0e-3                   # kg m^2, rotor + prop spin inertia
    g: float = GRAVITY
    omega_rotor_max: float = OMEGA_ROTOR_MAX  # rad/s

    def __post_init__(self):
        positive = (
            self.m, self.jx, self.jy, self.jz, self.arm_length,
            self.c_omega, self.c_m, self.d_x, self.d_y, self.d_z,
            self.d_phi, self.d_theta, self.d_psi, self.j_rotor, self.g,
            self.omega_rotor_max,
        )
        if any(v <= 0 for v in positive):
            raise ValueError("flight parameters must all be positive")
        if not 0.0 < self.alpha < math.pi / 2:
            raise ValueError(f"alpha must lie in (0, pi/2), got {self.alpha}")

    @property
    def hover_speed(self) -> float:
        """Rotor speed at which collective thrust balances weight (rad/s)."""
        return math.sqrt(self.m * self.g / (4.0 * self.c_omega))

    @property
    def hover_thrust_per_rotor(self) -> float:
        return self.m * self.g / 4.0

    @property
    def thrust_max_per_rotor(self) -> float:
        return self.c_omega * self.omega_rotor_max**2


@dataclass
class ArmConfig:
    """One deformable arm, approximated as a rotor-tip mass on a slender beam."""

    mass: float = 0.55           # kg, arm + motor + prop
    length: float = 0.47         # m, steering axis to rotor axis
    width: float = 0.04          # m, beam cross-section width
    gamma: float = 0.0           # rad, fold tilt (front arms only, <= 20 deg)
    theta: float = 0.0           # rad, azimuth about body z
    folded: bool = False

    def __post_init__(self):
        if self.mass < 0 or self.length <= 0 or self.width <= 0:
            raise ValueError("arm mass must be >= 0, length and width > 0")
        if not 0.0 <= self.gamma <= FRONT_ARM_FOLD_TILT + 1e-12:
            raise ValueError(f"gamma must lie in [0, 20 deg], got {self.gamma}")


def default_arms() -> tuple[ArmConfig, ArmConfig, ArmConfig, ArmConfig]:
    """X-configuration arm set matching the mixer rotor numbering.

    Rotors 1, 2 sit aft, 3, 4 forward; front arms carry the 20 deg fold tilt.
    """
    a = math.pi / 4
    return (
        ArmConfig(theta=math.pi + a),   # 1: aft right
        ArmConfig(theta=math.pi - a),   # 2: aft left
        ArmConfig(theta=a, gamma=FRONT_ARM_FOLD_TILT),    # 3: front left
        ArmConfig(theta=-a, gamma=FRONT_ARM_FOLD_TILT),   # 4: front right
    )


@dataclass
class TireParams:
    """Magic-formula fit constants with a load-scaled peak."""

    b: float = 10.0    # stiffness factor
    c: float = 1.9     # shape factor
    e: float = 0.97    # curvature factor
    mu: float = 0.9    # friction coefficient; peak force D = mu * load

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError("stiffness factor must be positive")
        if not 1.0 < self.c < 2.5:
            raise ValueError(f"shape factor must lie in (1, 2.5), got {self.c}")
        if not 0.0 < self.mu <= 1.5:
            raise ValueError(f"mu must lie in (0, 1.5], got {self.mu}")


@dataclass
class SuspensionParams:
    """Quarter-car constants for one corner."""

    sprung_mass: float = (TOTAL_MASS - 4 * 0.85) / 4.0  # kg, body share
    unsprung_mass: float = 0.85                         # kg, wheel + knuckle
    k_shock: float = 20000.0                            # N/m
    k_tire: float = 150000.0                            # N/m
    b_shock: float = 300.0                              # N s/m
    b_tire: float = 80.0                                # N s/m
    stroke_max: float = 0.08                            # m

    def __post_init__(self):
        vals = (
            self.sprung_mass, self.unsprung_mass, self.k_shock, self.k_tire,
            self.b_shock, self.b_tire, self.stroke_max,
        )
        if any(v <= 0 for v in vals):
            raise ValueError("suspension parameters must all be positive")

    @property
    def static_load(self) -> float:
        """Weight carried by this corner's contact patch at rest (N)."""
        return (self.sprung_mass + self.unsprung_mass) * GRAVITY


@dataclass
class ChassisParams:
    """Planar chassis constants for ground mode."""

    mass: float = TOTAL_MASS      # kg, everything rides on the wheels
    yaw_inertia: float = 1.10     # kg m^2, arms folded
    lf: float = 0.25              # m, CoM to front axle
    lr: float = 0.25              # m, CoM to rear axle
    track: float = 0.40           # m
    rho: float = 1.225            # kg/m^3
    drag_coeff: float = 0.8
    frontal_area: float = 0.25    # m^2
    wheel_radius: float = 0.10    # m
    drive_force_max: float = 120.0  # N per wheel (12 N m motor / 0.10 m)

    def __post_init__(self):
        vals = (
            self.mass, self.yaw_inertia, self.lf, self.lr, self.track,
            self.rho, self.drag_coeff, self.frontal_area, self.wheel_radius,
            self.drive_force_max,
        )
        if any(v <= 0 for v in vals):
            raise ValueError("chassis parameters must all be positive")

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr

    def wheel_positions(self) -> np.ndarray:
        """Corner positions (x, y) in body frame, order fl, fr, rl, rr."""
        return np.array(
            [
                [self.lf, +self.track / 2],
                [self.lf, -self.track / 2],
                [-self.lr, +self.track / 2],
                [-self.lr, -self.track / 2],
            ]
        )


@dataclass
class GroundEffectParams:
    """Cheeseman-type equivalent ground effect constants."""

    radius: float = PROP_RADIUS       # m, propeller radius
    rho: float = 1.225                # kg/m^3
    disc_area: float = math.pi * PROP_RADIUS**2  # m^2
    cutoff: float = 0.5               # m, no effect above this clearance
    floor_ratio: float = 0.3          # model invalid below floor_ratio * radius

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("propeller radius must be positive")

    @property
    def floor(self) -> float:
        return self.floor_ratio * self.radius


@dataclass
class RobotParams:
    """Full parameter bundle for the coupled model."""

    flight: FlightParams = field(default_factory=FlightParams)
    arms: tuple = field(default_factory=default_arms)
    tires: TireParams = field(default_factory=TireParams)
    suspension: SuspensionParams = field(default_factory=SuspensionParams)
    chassis: ChassisParams = field(default_factory=ChassisParams)
    ground_effect: GroundEffectParams = field(default_factory=GroundEffectParams)
    # core body inertia without arms; arm contributions come from `arms`
    body_jx: float = 0.55
    body_jy: float = 0.55
    body_jz: float = 0.95
    # CoM height above the wheel contact patch with the suspension settled
    com_height: float = 0.30

    def with_arms(self, folded: bool) -> "RobotParams":
        arms = tuple(replace(a, folded=folded) for a in self.arms)
        return replace(self, arms=arms)


def default_params() -> RobotParams:
    return RobotParams()
