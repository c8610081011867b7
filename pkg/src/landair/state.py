"""Coupled robot state and actuator input containers.

The continuous part of the state packs into a flat vector for the
integrator: position (3), velocity (3), Euler angles (3), body rates (3),
then per-corner unsprung height and rate (8), order fl, fr, rl, rr.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

N_CONTINUOUS = 20
WHEEL_NAMES = ("fl", "fr", "rl", "rr")


@dataclass
class RobotState:
    pos: np.ndarray = field(default_factory=lambda: np.zeros(3))      # m, world
    vel: np.ndarray = field(default_factory=lambda: np.zeros(3))      # m/s, world
    euler: np.ndarray = field(default_factory=lambda: np.zeros(3))    # rad
    rates: np.ndarray = field(default_factory=lambda: np.zeros(3))    # rad/s, body
    z_u: np.ndarray = field(default_factory=lambda: np.zeros(4))      # m, world
    zdot_u: np.ndarray = field(default_factory=lambda: np.zeros(4))   # m/s
    rotor_speeds: np.ndarray = field(default_factory=lambda: np.zeros(4))  # rad/s
    wheel_speeds: np.ndarray = field(default_factory=lambda: np.zeros(4))  # rad/s
    arm_fold: float = 0.0  # 0 deployed .. 1 folded
    mode: str = "static"

    def to_vector(self) -> np.ndarray:
        x = np.empty(N_CONTINUOUS)
        x[0:3] = self.pos
        x[3:6] = self.vel
        x[6:9] = self.euler
        x[9:12] = self.rates
        x[12:16] = self.z_u
        x[16:20] = self.zdot_u
        return x

    def apply_vector(self, x: np.ndarray) -> None:
        self.pos = x[0:3].copy()
        self.vel = x[3:6].copy()
        self.euler = x[6:9].copy()
        self.rates = x[9:12].copy()
        self.z_u = x[12:16].copy()
        self.zdot_u = x[16:20].copy()

    def copy(self) -> "RobotState":
        out = RobotState(
            pos=self.pos.copy(), vel=self.vel.copy(), euler=self.euler.copy(),
            rates=self.rates.copy(), z_u=self.z_u.copy(),
            zdot_u=self.zdot_u.copy(), rotor_speeds=self.rotor_speeds.copy(),
            wheel_speeds=self.wheel_speeds.copy(), arm_fold=self.arm_fold,
            mode=self.mode,
        )
        return out


@dataclass
class ControlInput:
    rotor_speeds: np.ndarray = field(default_factory=lambda: np.zeros(4))   # rad/s
    wheel_torques: np.ndarray = field(default_factory=lambda: np.zeros(4))  # N m
    steering: float = 0.0           # rad, command fed to the Ackermann map
    brake: float = 0.0              # 0..1
    arm_rate: float = 0.0           # fold fraction rate (1/s), servo command
    yaw_input: float = 0.0          # N m, direct chassis yaw torque

    def copy(self) -> "ControlInput":
        return ControlInput(
            rotor_speeds=self.rotor_speeds.copy(),
            wheel_torques=self.wheel_torques.copy(),
            steering=self.steering, brake=self.brake,
            arm_rate=self.arm_rate, yaw_input=self.yaw_input,
        )
