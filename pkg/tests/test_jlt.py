"""Planner checks: analytic quintic oracle, collocation oracle, invariants."""

import math

import numpy as np
import pytest

from landair.errors import TrajectoryInfeasibleError
from landair.jlt import (
    AxisBoundary,
    MotionLimits,
    check_input_feasibility,
    minimal_feasible_duration,
    plan_3d,
    plan_axis,
    quintic_coefficients,
)
from landair.params import FlightParams

RELAXED = MotionLimits(v_max=1e6, j_max=1e6)


def test_already_at_target_zero_cost():
    traj = plan_axis(AxisBoundary(p0=0.5, pt=0.5), RELAXED)
    assert traj.cost == 0.0
    assert traj.position(traj.duration / 2) == 0.5


def test_unit_rest_to_rest_quintic():
    # oracle: analytic minimum-jerk quintic 10 t^3 - 15 t^4 + 6 t^5
    b = AxisBoundary(p0=0.0, pt=1.0, duration=1.0)
    traj = plan_axis(b, RELAXED)
    np.testing.assert_allclose(quintic_coefficients(b, 1.0),
                               [0, 0, 0, 10, -15, 6], atol=1e-9)
    np.testing.assert_allclose(traj.segments[0].c, [0, 0, 0, 10, -15, 6], atol=1e-9)
    assert traj.jerk_integral == pytest.approx(720.0, rel=1e-9)
    assert traj.velocity(0.5) == pytest.approx(1.875, abs=1e-9)
    assert traj.max_abs_velocity() == pytest.approx(1.875, abs=1e-6)


def test_unconstrained_matches_quintic_property():
    # 1000 random boundary conditions: the planner must return the analytic
    # quintic exactly when nothing binds
    rng = np.random.default_rng(101)
    for _ in range(1000):
        b = AxisBoundary(
            p0=rng.uniform(-2, 2), v0=rng.uniform(-1, 1), a0=rng.uniform(-2, 2),
            pt=rng.uniform(-2, 2), vt=rng.uniform(-1, 1), at=rng.uniform(-2, 2),
            duration=rng.uniform(0.5, 3.0),
        )
        traj = plan_axis(b, RELAXED)
        assert len(traj.segments) == 1
        np.testing.assert_allclose(
            traj.segments[0].c, quintic_coefficients(b, b.duration), atol=1e-9)


def test_terminal_residual_below_1e9():
    rng = np.random.default_rng(57)
    lim = MotionLimits(v_max=1.5, j_max=500.0)
    for _ in range(50):
        b = AxisBoundary(
            p0=0.0, v0=rng.uniform(-0.5, 0.5), a0=rng.uniform(-1, 1),
            pt=rng.uniform(-2, 2), vt=rng.uniform(-0.5, 0.5),
            at=rng.uniform(-1, 1), duration=rng.uniform(1.0, 3.0),
        )
        traj = plan_axis(b, lim)
        p, v, a = traj.state(traj.duration)
        assert abs(p - b.pt) < 1e-9
        assert abs(v - b.vt) < 1e-9
        assert abs(a - b.at) < 1e-9


def test_constrained_velocity_bound_and_cost_increase():
    lim = MotionLimits(v_max=1.5, j_max=1e6)
    unconstrained = plan_axis(AxisBoundary(pt=1.0, duration=1.0), RELAXED)
    traj = plan_axis(AxisBoundary(pt=1.0, duration=1.0), lim)
    assert traj.max_abs_velocity() <= 1.5 + 1e-9
    assert traj.duration == pytest.approx(1.0)
    assert traj.cost > unconstrained.cost


def test_constraint_satisfaction_sampled_at_1khz():
    rng = np.random.default_rng(73)
    for _ in range(20):
        v_max = rng.uniform(0.8, 2.0)
        j_max = rng.uniform(50.0, 500.0)
        lim = MotionLimits(v_max=v_max, j_max=j_max)
        b = AxisBoundary(pt=rng.uniform(-1.5, 1.5), duration=rng.uniform(0.8, 2.0))
        traj = plan_axis(b, lim)
        ts = np.linspace(0.0, traj.duration, int(traj.duration * 1000) + 1)
        for t in ts:
            assert abs(traj.velocity(t)) <= v_max + 1e-9
            assert abs(traj.jerk(t)) <= j_max + 1e-9


def test_cost_optimality_against_perturbations():
    # any admissible C2 variation (vanishing p, v, a at both ends) must not
    # reduce the squared-jerk integral of the unconstrained solution
    b = AxisBoundary(p0=0.0, v0=0.2, a0=-0.5, pt=1.3, vt=-0.1, at=0.3, duration=1.7)
    traj = plan_axis(b, RELAXED)
    base = np.zeros(10)
    base[: len(traj.segments[0].c)] = traj.segments[0].c
    t_end = b.duration
    # bump basis: (t (T - t))^3 has triple zeros at both ends
    bump = np.array([0.0, 0.0, 0.0, t_end**3, -3 * t_end**2, 3 * t_end, -1.0])
    rng = np.random.default_rng(5)

    def jerk_sq_integral(coeffs):
        j = coeffs.copy()
        for _ in range(3):
            j = j[1:] * np.arange(1, len(j))
        sq = np.convolve(j, j)
        powers = np.arange(1, len(sq) + 1)
        return float(np.sum(sq * t_end**powers / powers))

    j_opt = jerk_sq_integral(base)
    for _ in range(100):
        mods = rng.uniform(-1.0, 1.0, 3)
        poly = np.convolve(bump, np.array(mods))
        perturbed = base.copy()
        perturbed[: len(poly)] += poly
        assert jerk_sq_integral(perturbed) >= j_opt - 1e-9


def test_time_scaling_law():
    # normalized cost of a rest-to-rest unit move scales as s^-6
    costs = {}
    for t_end in (1.0, 2.0, 3.5):
        traj = plan_axis(AxisBoundary(pt=1.0, duration=t_end), RELAXED)
        costs[t_end] = traj.cost
    assert costs[2.0] / costs[1.0] == pytest.approx(2.0**-6, rel=1e-9)
    assert costs[3.5] / costs[1.0] == pytest.approx(3.5**-6, rel=1e-9)


def test_infeasible_terminal_velocity():
    lim = MotionLimits(v_max=1.0, j_max=100.0)
    with pytest.raises(TrajectoryInfeasibleError) as err:
        plan_axis(AxisBoundary(pt=1.0, vt=2.0, duration=1.0), lim)
    assert err.value.binding == "terminal_velocity"


def test_fixed_duration_extension_flagged():
    # 1 m in 0.25 s under v_max 1.0 is impossible; the plan stretches
    lim = MotionLimits(v_max=1.0, j_max=1e6)
    traj = plan_axis(AxisBoundary(pt=1.0, duration=0.25), lim)
    assert traj.extended
    assert traj.duration > 1.0  # at least dp / v_max
    assert traj.max_abs_velocity() <= 1.0 + 1e-9
    with pytest.raises(TrajectoryInfeasibleError) as err:
        plan_axis(AxisBoundary(pt=1.0, duration=0.25), lim, allow_extension=False)
    assert err.value.binding == "v_max"


def test_minimal_feasible_duration_bound():
    lim = MotionLimits(v_max=1.0, j_max=1e6)
    t_min = minimal_feasible_duration(AxisBoundary(pt=1.0), lim)
    assert t_min >= 1.0  # distance over speed cap
    traj = plan_axis(AxisBoundary(pt=1.0, duration=t_min), lim)
    assert traj.max_abs_velocity() <= 1.0 + 1e-9


def test_plan_3d_symmetry_and_zero_axis():
    lim = MotionLimits(v_max=3.0, j_max=100.0)
    same = AxisBoundary(pt=1.0)
    plan = plan_3d([same, same, same], lim)
    assert plan.axes[0].duration == plan.axes[1].duration == plan.axes[2].duration
    for t in np.linspace(0, plan.duration, 50):
        assert plan.axes[0].position(t) == pytest.approx(plan.axes[1].position(t))
    rest = AxisBoundary()
    plan2 = plan_3d([AxisBoundary(pt=1.0), rest, rest], lim, duration=2.0)
    assert plan2.axes[1].cost == 0.0
    assert plan2.total_cost == pytest.approx(plan2.axes[0].cost)


def test_plan_3d_slope_landing_terminal_state():
    # 30 deg slope descent: terminal height rate -0.3 m/s, horizontal at rest
    lim = MotionLimits(v_max=3.0, j_max=60.0)
    slope = math.radians(30.0)
    target = np.array([1.2, 0.0, 1.2 * math.tan(slope)])
    boundaries = [
        AxisBoundary(p0=0.2, v0=0.0, pt=target[0], vt=0.0),
        AxisBoundary(p0=0.0, v0=0.0, pt=target[1], vt=0.0),
        AxisBoundary(p0=target[2] + 2.0, v0=0.0, pt=target[2], vt=-0.3),
    ]
    plan = plan_3d(boundaries, lim)
    for axis, b in zip(plan.axes, boundaries):
        p, v, a = axis.state(plan.duration)
        assert abs(p - b.pt) < 1e-9
        assert abs(v - b.vt) < 1e-9
        assert abs(a - b.at) < 1e-9


def test_input_feasibility_hover_and_free_fall():
    fp = FlightParams()
    lim = MotionLimits(f_min=30.0, f_max=660.0, omega_max=3.0, v_max=3.0, j_max=60.0)
    hover = plan_3d([AxisBoundary()] * 3, lim)
    report = check_input_feasibility(hover.axes, fp, lim)
    assert report.ok
    assert report.max_thrust == pytest.approx(fp.m * fp.g, rel=1e-9)
    assert report.max_body_rate == pytest.approx(0.0, abs=1e-12)
    # constant -g vertical acceleration needs zero thrust: fails the floor
    fall = AxisBoundary(p0=0.0, v0=0.0, a0=-fp.g, pt=-4.905, vt=-fp.g, at=-fp.g,
                        duration=1.0)
    fall_traj = plan_axis(fall, RELAXED)
    rest_traj = plan_axis(AxisBoundary(), RELAXED)
    report2 = check_input_feasibility((rest_traj, rest_traj, fall_traj), fp, lim)
    assert not report2.thrust_ok
    assert report2.min_thrust == pytest.approx(0.0, abs=1e-6)


def test_input_feasibility_aggressive_move():
    # oracle: quintic peak acceleration 5.7735 * dp / T^2
    fp = FlightParams()
    lim = MotionLimits(f_min=1.0, f_max=1e4, omega_max=50.0, v_max=10.0, j_max=1e4)
    rest = AxisBoundary()
    move = AxisBoundary(pt=1.0, duration=0.8)
    plan = plan_3d([move, rest, rest], lim, duration=0.8)
    peak_acc = 10.0 / math.sqrt(3.0) / 0.8**2  # max of 60t-180t^2+120t^3 is 10/sqrt(3)
    report = check_input_feasibility(plan.axes, fp, lim)
    expected = fp.m * math.hypot(peak_acc, fp.g)
    assert report.max_thrust == pytest.approx(expected, rel=1e-3)


def test_collocation_oracle_small_sample(collocation_cost):
    # the acceptance suite runs the full 20-instance comparison; keep a quick
    # 4-instance smoke check here
    rng = np.random.default_rng(9)
    for _ in range(4):
        dp = rng.uniform(0.8, 2.0)
        t_end = rng.uniform(0.9, 1.8)
        b = AxisBoundary(pt=dp, duration=t_end)
        peak = plan_axis(b, RELAXED).max_abs_velocity()
        lim = MotionLimits(v_max=0.8 * peak, j_max=1e6)
        traj = plan_axis(b, lim, allow_extension=False)
        oracle = collocation_cost(b, t_end, lim)
        assert traj.cost <= oracle * 1.02
