"""Cheeseman-type equivalent ground effect: thrust multiplier from clearance.

The image-source model diverges as clearance approaches a quarter of the
propeller radius, so the ratio saturates at a floor clearance; above the
cutoff clearance the multiplier is exactly one. A short smoothing band below
the cutoff keeps the dynamics continuous for the integrator.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from .params import GroundEffectParams

# width of the continuity blend just below the cutoff clearance
BLEND_BAND = 0.05


def induced_velocity(thrust: float, p: GroundEffectParams) -> float:
    """Momentum-theory induced velocity under one rotor."""
    if thrust < 0:
        raise ValueError(f"thrust must be >= 0, got {thrust}")
    return math.sqrt(thrust / (2.0 * p.rho * p.disc_area))


class ThrustRatio(NamedTuple):
    ratio: float
    saturated: bool  # clearance was below the model floor


def thrust_ratio_with_flag(z: float, airspeed: float, v_i: float,
                           p: GroundEffectParams) -> ThrustRatio:
    """In-ground-effect over out-of-ground-effect thrust ratio.

    Clearance ``z`` is rotor hub to the terrain directly below. Horizontal
    airspeed washes the effect out; at zero induced velocity and zero
    airspeed the airspeed term is dropped.
    """
    if v_i < 0:
        raise ValueError(f"induced velocity must be >= 0, got {v_i}")
    if z > p.cutoff:
        return ThrustRatio(1.0, False)
    saturated = z < p.floor
    z_eff = max(z, p.floor)
    v = abs(airspeed)
    if v_i <= 1e-12:
        wash = math.inf if v > 1e-12 else 0.0
    else:
        wash = (v / v_i) ** 2
    if math.isinf(wash):
        raw = 1.0
    else:
        frac = (p.radius / (4.0 * z_eff)) ** 2 / (1.0 + wash)
        raw = 1.0 / (1.0 - frac)
    # fade to exactly 1 at the cutoff so the multiplier is continuous
    band_lo = p.cutoff - BLEND_BAND
    if z_eff > band_lo:
        s = (p.cutoff - z_eff) / BLEND_BAND
        s = s * s * (3.0 - 2.0 * s)
        raw = 1.0 + (raw - 1.0) * s
    return ThrustRatio(raw, saturated)


def thrust_ratio(z: float, airspeed: float, v_i: float, p: GroundEffectParams) -> float:
    return thrust_ratio_with_flag(z, airspeed, v_i, p).ratio


def effective_thrust(t_cmd: float, z: float, airspeed: float,
                     p: GroundEffectParams) -> float:
    """Thrust actually produced near the ground for a commanded thrust."""
    if t_cmd < 0:
        raise ValueError(f"commanded thrust must be >= 0, got {t_cmd}")
    if t_cmd == 0.0:
        return 0.0
    v_i = induced_velocity(t_cmd, p)
    return t_cmd * thrust_ratio(z, airspeed, v_i, p)


def source_potential(point, source, hub_clearance: float,
                     p: GroundEffectParams) -> float:
    """Velocity potential of the image source under a rotor.

    Documented and tested as a formula; the thrust ratio above is the
    operative model.
    """
    x, y, z = (float(v) for v in point)
    x0, y0, z0 = (float(v) for v in source)
    dist = math.sqrt((x - x0) ** 2 + (y - y0) ** 2 + (z - z0) ** 2)
    if dist <= 0 or hub_clearance <= 0:
        raise ValueError("source distance and hub clearance must be positive")
    return -((p.radius / (4.0 * hub_clearance)) ** 2) / dist
