"""Attitude representations and the body/global transforms used by the dynamics.

Attitude is kept as Z-Y-X Euler angles with an explicit gimbal-lock guard;
the scenario slopes stay far below the pitch singularity.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import GimbalLockError

# margin below |theta| = pi/2 at which the rate transform is refused
GIMBAL_MARGIN = 1e-6


class EulerAngles(NamedTuple):
    phi: float  # roll (rad)
    theta: float  # pitch (rad)
    psi: float  # yaw (rad)


class BodyRates(NamedTuple):
    p: float  # roll rate (rad/s)
    q: float  # pitch rate (rad/s)
    r: float  # yaw rate (rad/s)


def euler_to_rotation(e) -> np.ndarray:
    """Rotation matrix mapping body vectors into the global frame.

    Z-Y-X convention: R = Rz(psi) @ Ry(theta) @ Rx(phi). The result is
    orthonormal with det +1 to machine precision.
    """
    phi, theta, psi = (float(v) for v in e)
    if not (math.isfinite(phi) and math.isfinite(theta) and math.isfinite(psi)):
        raise ValueError(f"non-finite Euler angles: {(phi, theta, psi)}")
    cf, sf = math.cos(phi), math.sin(phi)
    ct, st = math.cos(theta), math.sin(theta)
    cp, sp = math.cos(psi), math.sin(psi)
    return np.array(
        [
            [cp * ct, cp * st * sf - sp * cf, cp * st * cf + sp * sf],
            [sp * ct, sp * st * sf + cp * cf, sp * st * cf - cp * sf],
            [-st, ct * sf, ct * cf],
        ]
    )


def rotation_to_euler(rot: np.ndarray) -> EulerAngles:
    """Extract Z-Y-X Euler angles from a rotation matrix (atan2 based).

    Valid away from |theta| = pi/2; inside the guard band the roll/yaw split
    is ill-defined and a GimbalLockError is raised.
    """
    rot = np.asarray(rot, dtype=float)
    st = -float(rot[2, 0])
    st = max(-1.0, min(1.0, st))
    theta = math.asin(st)
    if abs(theta) >= math.pi / 2 - GIMBAL_MARGIN:
        raise GimbalLockError(f"pitch {theta:.6f} rad too close to +-pi/2 for extraction")
    phi = math.atan2(float(rot[2, 1]), float(rot[2, 2]))
    psi = math.atan2(float(rot[1, 0]), float(rot[0, 0]))
    return EulerAngles(phi, theta, psi)


def euler_rate_transform(e) -> np.ndarray:
    """Matrix mapping body rates (p, q, r) to attitude rates (phi', theta', psi').

    Singular at |theta| = pi/2; raises GimbalLockError inside the guard band.
    """
    phi, theta, _ = (float(v) for v in e)
    if not (math.isfinite(phi) and math.isfinite(theta)):
        raise ValueError(f"non-finite Euler angles: {(phi, theta)}")
    if abs(theta) >= math.pi / 2 - GIMBAL_MARGIN:
        raise GimbalLockError(f"pitch {theta:.9f} rad within gimbal-lock guard band")
    cf, sf = math.cos(phi), math.sin(phi)
    ct = math.cos(theta)
    tt = math.tan(theta)
    return np.array(
        [
            [1.0, sf * tt, cf * tt],
            [0.0, cf, -sf],
            [0.0, sf / ct, cf / ct],
        ]
    )
