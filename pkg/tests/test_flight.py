"""Mixer, torque and arm-inertia checks with hand-evaluated oracles."""

import math

import numpy as np
import pytest

from landair.errors import InfeasibleWrenchError
from landair.flight import (
    BodyWrench,
    aero_friction_torque,
    arm_inertia,
    arm_inertia_rotated,
    arm_servo_load,
    gyroscopic_torque,
    mixer_forward,
    mixer_inverse,
    rotational_accel,
    total_inertia,
    translational_accel,
    wrench_from_thrusts,
    thrusts_from_wrench,
)
from landair.params import ArmConfig, FlightParams, default_arms


@pytest.fixture
def fp():
    return FlightParams()


def test_symmetric_hover_wrench(fp):
    w_bar = 0.5 * fp.omega_rotor_max
    wrench = mixer_forward([w_bar] * 4, fp)
    assert wrench.tau_roll == pytest.approx(0.0, abs=1e-12)
    assert wrench.tau_pitch == pytest.approx(0.0, abs=1e-12)
    assert wrench.tau_yaw == pytest.approx(0.0, abs=1e-12)
    assert wrench.thrust == pytest.approx(4 * fp.c_omega * w_bar**2)


def test_zero_speeds_zero_wrench(fp):
    wrench = mixer_forward(np.zeros(4), fp)
    assert np.allclose(tuple(wrench), 0.0)


def test_hover_thrust_matches_weight(fp):
    # default thrust coefficient is calibrated so hover balances total weight
    wrench = mixer_forward([fp.hover_speed] * 4, fp)
    assert wrench.thrust == pytest.approx(20.62 * 9.81, rel=1e-12)
    assert wrench.thrust == pytest.approx(202.2822, abs=1e-4)


def test_equal_speeds_zero_torque_any_speed(fp):
    for w in (10.0, 200.0, 555.0, fp.omega_rotor_max):
        wrench = mixer_forward([w] * 4, fp)
        assert abs(wrench.tau_roll) < 1e-10
        assert abs(wrench.tau_pitch) < 1e-10
        assert abs(wrench.tau_yaw) < 1e-10


def test_mixer_round_trip(fp):
    rng = np.random.default_rng(3)
    for _ in range(50):
        speeds = rng.uniform(0.2, 0.9, 4) * fp.omega_rotor_max
        inv = mixer_inverse(mixer_forward(speeds, fp), fp)
        assert not inv.clamped
        np.testing.assert_allclose(inv.speeds, speeds, atol=1e-9)


def test_hover_wrench_gives_equal_speeds(fp):
    inv = mixer_inverse(BodyWrench(fp.m * fp.g, 0.0, 0.0, 0.0), fp)
    assert np.ptp(inv.speeds) < 1e-9


def test_yaw_without_thrust_infeasible(fp):
    # solving the 4x4 system for zero thrust and pure yaw torque forces a
    # negative squared speed on two rotors
    with pytest.raises(InfeasibleWrenchError):
        mixer_inverse(BodyWrench(0.0, 0.0, 0.0, 0.5), fp)


def test_thrust_wrench_maps_are_inverses(fp):
    rng = np.random.default_rng(5)
    for _ in range(20):
        thrusts = rng.uniform(10.0, 90.0, 4)
        np.testing.assert_allclose(
            thrusts_from_wrench(wrench_from_thrusts(thrusts, fp), fp),
            thrusts, atol=1e-9)


def test_gyroscopic_zero_rates(fp):
    assert np.allclose(gyroscopic_torque((0, 0, 0), [300.0] * 4, fp), 0.0)


def test_gyroscopic_equal_speeds_cancel(fp):
    out = gyroscopic_torque((0.5, -0.2, 0.1), [400.0] * 4, fp)
    assert np.allclose(out, 0.0, atol=1e-12)


def test_gyroscopic_hand_cross_product():
    # oracle: (1,0,0) x (0,0,0.1) = (0, -0.1, 0)
    fp = FlightParams(j_rotor=1e-3)
    out = gyroscopic_torque((1.0, 0.0, 0.0), [100.0, 0.0, 0.0, 0.0], fp)
    np.testing.assert_allclose(out, [0.0, -0.1, 0.0], atol=1e-12)


def test_aero_friction_diagonal():
    fp = FlightParams(d_phi=1.0, d_theta=2.0, d_psi=3.0)
    assert np.allclose(aero_friction_torque((0, 0, 0), fp), 0.0)
    np.testing.assert_allclose(aero_friction_torque((1, 1, 1), fp), [1, 2, 3])


def test_rotational_accel_equilibrium(fp):
    out = rotational_accel((0, 0, 0), BodyWrench(100.0, 0, 0, 0),
                           np.zeros(3), np.zeros(3), fp)
    assert np.allclose(out, 0.0)


def test_rotational_accel_symmetric_inertia_decouples():
    fp = FlightParams(jx=0.7, jy=0.8, jz=0.8, d_phi=1e-9, d_theta=1e-9, d_psi=1e-9)
    out = rotational_accel((0.0, 2.0, 3.0), BodyWrench(0, 0, 0, 0),
                           np.zeros(3), np.zeros(3), fp)
    assert abs(out[0]) < 1e-6  # (jy - jz) coupling term vanishes


def test_rotational_accel_hand_evaluation():
    # oracle: pdot = q*r*(jy - jz)/jx = 1*1*(0.6-0.9)/0.5 = -0.6
    fp = FlightParams(jx=0.5, jy=0.6, jz=0.9,
                      d_phi=1e-30, d_theta=1e-30, d_psi=1e-30)
    out = rotational_accel((0.0, 1.0, 1.0), BodyWrench(0, 0, 0, 0),
                           np.zeros(3), np.zeros(3), fp)
    assert out[0] == pytest.approx(-0.6, abs=1e-9)


def test_free_rotation_kinetic_energy_conserved_without_damping():
    fp = FlightParams(jx=0.5, jy=0.6, jz=0.9,
                      d_phi=1e-30, d_theta=1e-30, d_psi=1e-30)
    j = np.array([fp.jx, fp.jy, fp.jz])
    omega = np.array([0.3, -0.5, 0.8])
    zero = BodyWrench(0, 0, 0, 0)

    def deriv(w):
        return rotational_accel(w, zero, np.zeros(3), np.zeros(3), fp)

    dt = 1e-3
    e0 = 0.5 * float(j @ (omega * omega))
    for _ in range(2000):
        k1 = deriv(omega)
        k2 = deriv(omega + 0.5 * dt * k1)
        k3 = deriv(omega + 0.5 * dt * k2)
        k4 = deriv(omega + dt * k3)
        omega = omega + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    e1 = 0.5 * float(j @ (omega * omega))
    assert abs(e1 - e0) / e0 < 1e-8


def test_aero_friction_dissipates_energy():
    # applied with a minus sign in the rotation equation the torque must
    # drain rotational kinetic energy in free rotation
    fp = FlightParams(jx=0.5, jy=0.6, jz=0.9, d_phi=0.05, d_theta=0.05, d_psi=0.05)
    j = np.array([fp.jx, fp.jy, fp.jz])
    omega = np.array([0.4, -0.3, 0.6])
    zero = BodyWrench(0, 0, 0, 0)

    def deriv(w):
        m_d = aero_friction_torque(w, fp)  # level attitude: rates coincide
        return rotational_accel(w, zero, np.zeros(3), m_d, fp)

    dt = 1e-3
    energy = [0.5 * float(j @ (omega * omega))]
    for _ in range(8000):
        k1 = deriv(omega)
        k2 = deriv(omega + 0.5 * dt * k1)
        k3 = deriv(omega + 0.5 * dt * k2)
        k4 = deriv(omega + dt * k3)
        omega = omega + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        energy.append(0.5 * float(j @ (omega * omega)))
    diffs = np.diff(energy)
    assert np.all(diffs <= 1e-15)
    assert energy[-1] < 0.5 * energy[0]


def test_translational_hover_balance(fp):
    out = translational_accel((0, 0, 0), (0, 0, 0), fp.m * fp.g, fp)
    assert np.allclose(out, 0.0, atol=1e-12)


def test_translational_free_fall(fp):
    out = translational_accel((0, 0, 0.4), (0, 0, 0), 0.0, fp)
    np.testing.assert_allclose(out, [0, 0, -fp.g], atol=1e-12)


def test_translational_small_pitch_tilts_thrust(fp):
    # oracle: horizontal accel = g * sin(0.1) for thrust = m g at pitch 0.1
    out = translational_accel((0.0, 0.1, 0.0), (0, 0, 0), fp.m * fp.g, fp)
    assert out[0] == pytest.approx(fp.g * math.sin(0.1), abs=1e-12)
    assert out[2] == pytest.approx(fp.g * (math.cos(0.1) - 1.0), abs=1e-12)


def test_arm_inertia_untilted_matches_rear_formula():
    arm = ArmConfig(mass=0.4, length=0.35, width=0.03, gamma=0.0)
    j_front, j_rear = arm_inertia(arm)
    assert j_front == pytest.approx(j_rear)


def test_arm_inertia_zero_mass():
    arm = ArmConfig(mass=0.0, length=0.4, width=0.03)
    assert arm_inertia(arm) == (0.0, 0.0)


def test_arm_inertia_hand_evaluation():
    # oracle: (0.5/12) * 0.4^2 * cos(20 deg) * (0.03^2 + 0.4^2)
    arm = ArmConfig(mass=0.5, length=0.4, width=0.03, gamma=math.radians(20))
    j_front, j_rear = arm_inertia(arm)
    expected = 0.5 / 12.0 * 0.16 * math.cos(math.radians(20)) * (0.0009 + 0.16)
    assert j_front == pytest.approx(expected, rel=1e-12)
    assert j_front == pytest.approx(1.0079770e-3, rel=1e-6)
    assert j_rear == pytest.approx(expected / math.cos(math.radians(20)), rel=1e-12)


def test_arm_inertia_rotated_properties():
    j = np.diag([1.0, 2.0, 3.0])
    assert np.allclose(arm_inertia_rotated(j, 0.0), j)
    iso = 0.7 * np.eye(3)
    for theta in (0.3, 1.1, -2.0):
        np.testing.assert_allclose(arm_inertia_rotated(iso, theta), iso, atol=1e-12)
    rotated = arm_inertia_rotated(j, math.pi / 2)
    np.testing.assert_allclose(rotated, np.diag([2.0, 1.0, 3.0]), atol=1e-12)
    assert np.trace(rotated) == pytest.approx(np.trace(j))
    sym = np.array([[1.0, 0.2, 0.0], [0.2, 2.0, 0.1], [0.0, 0.1, 3.0]])
    out = arm_inertia_rotated(sym, 0.77)
    np.testing.assert_allclose(out, out.T, atol=1e-12)
    assert np.trace(out) == pytest.approx(np.trace(sym))


def test_total_inertia_no_arms_is_body(fp):
    out = total_inertia(fp, [], body_diag=(0.5, 0.6, 0.7))
    np.testing.assert_allclose(out, [0.5, 0.6, 0.7])


def test_total_inertia_point_mass_oracle(fp):
    # parallel-axis oracle: four 0.5 kg tip masses at radius 0.5 m add
    # 4 * 0.5 * 0.5^2 = 0.5 to the yaw inertia
    arms = [ArmConfig(mass=0.5, length=0.5, width=0.01, theta=t)
            for t in (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, -math.pi / 4)]
    out = total_inertia(fp, arms, body_diag=(0.0, 0.0, 0.0))
    assert out[2] == pytest.approx(0.5, rel=1e-12)
    # symmetric X layout splits evenly between roll and pitch
    assert out[0] == pytest.approx(0.25, rel=1e-12)
    assert out[1] == pytest.approx(0.25, rel=1e-12)


def test_total_inertia_folding_is_monotone(fp):
    arms = list(default_arms())
    base = total_inertia(fp, arms, body_diag=(0.5, 0.5, 0.9))
    for i in range(4):
        one_folded = [a if k != i else ArmConfig(
            mass=a.mass, length=a.length, width=a.width, gamma=a.gamma,
            theta=a.theta, folded=True) for k, a in enumerate(arms)]
        out = total_inertia(fp, one_folded, body_diag=(0.5, 0.5, 0.9))
        assert out[0] <= base[0] + 1e-12
        assert out[1] <= base[1] + 1e-12
    all_folded = total_inertia(fp, arms, fold_fraction=1.0, body_diag=(0.5, 0.5, 0.9))
    assert all_folded[0] < base[0]
    assert all_folded[1] < base[1]


def test_arm_servo_load_bookkeeping(fp):
    arm = ArmConfig(mass=0.5, length=0.47)
    g_body = (2.0, -1.0, -9.5)
    stationary = arm_servo_load(arm, 0.0, fp, g_body)
    assert stationary.yaw_term == 0.0
    assert stationary.total == pytest.approx(stationary.gravity_term)
    assert stationary.gravity_term == pytest.approx(0.5 * math.hypot(2.0, -1.0))
    spinning = arm_servo_load(arm, 400.0, fp, g_body)
    assert spinning.yaw_term == pytest.approx(fp.c_m * 400.0**2 / 0.47)
    assert spinning.total == pytest.approx(
        spinning.gravity_term + spinning.yaw_term)
