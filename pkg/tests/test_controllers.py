"""Linearization, LQR and constrained-control checks."""

import math

import numpy as np
import pytest

from landair.controllers import (
    CascadePidController,
    ConstrainedLqr,
    FlightReference,
    LinearModel,
    LqrWeights,
    PidGains,
    PidLoop,
    attitude_from_force,
    linearize,
    riccati_residual,
    solve_lqr,
)
from landair.errors import NonStabilizableError
from landair.params import default_params
from landair.state import RobotState


def test_linearize_recovers_linear_system():
    a = np.array([[0.0, 1.0], [-2.0, -0.3]])
    b = np.array([[0.0], [1.5]])

    def f(x, u):
        return a @ x + b @ u

    mdl = linearize(f, np.zeros(2), np.zeros(1))
    np.testing.assert_allclose(mdl.a, a, atol=1e-8)
    np.testing.assert_allclose(mdl.b, b, atol=1e-8)
    assert mdl.is_equilibrium


def test_linearize_flags_non_equilibrium():
    def f(x, u):
        return np.array([1.0, 0.0]) + x

    mdl = linearize(f, np.zeros(2), np.zeros(1).reshape(1))
    assert not mdl.is_equilibrium
    assert mdl.equilibrium_residual == pytest.approx(1.0)


def test_linearize_matches_hand_jacobian_pendulum():
    # oracle: hand-derived Jacobian of a damped pendulum about the hang point
    def f(x, u):
        return np.array([x[1], -9.81 * math.sin(x[0]) - 0.2 * x[1] + u[0]])

    mdl = linearize(f, np.zeros(2), np.zeros(1))
    np.testing.assert_allclose(mdl.a, [[0, 1], [-9.81, -0.2]], atol=1e-5)
    np.testing.assert_allclose(mdl.b, [[0], [1]], atol=1e-8)


def test_linearize_disturbance_column():
    def f(x, u):
        return np.array([x[1], u[0] - x[0]])

    def f_d(x, u, d):
        return f(x, u) + np.array([0.0, 3.0 * d])

    mdl = linearize(f, np.zeros(2), np.zeros(1), disturbance=f_d)
    np.testing.assert_allclose(mdl.g_d, [0.0, 3.0], atol=1e-8)


def test_double_integrator_gain():
    # oracle: closed-form Riccati solution gives K = [1, sqrt(3)]
    mdl = LinearModel(a=[[0.0, 1.0], [0.0, 0.0]], b=[[0.0], [1.0]])
    sol = solve_lqr(mdl, LqrWeights(q=np.eye(2), r=np.eye(1)))
    np.testing.assert_allclose(sol.k, [[1.0, math.sqrt(3.0)]], atol=1e-6)
    assert sol.residual <= 1e-9


def test_stable_system_zero_weight_zero_gain():
    mdl = LinearModel(a=-np.eye(2), b=np.eye(2))
    sol = solve_lqr(mdl, LqrWeights(q=np.eye(2) * 1e-12, r=np.eye(2)))
    assert np.max(np.abs(sol.k)) < 1e-5


def test_random_stabilizable_closed_loop_hurwitz():
    rng = np.random.default_rng(31)
    count = 0
    while count < 60:
        n = int(rng.integers(2, 6))
        a = rng.normal(size=(n, n))
        b = rng.normal(size=(n, 2))
        mdl = LinearModel(a=a, b=b)
        if not mdl.stabilizable:
            continue
        count += 1
        sol = solve_lqr(mdl, LqrWeights(q=np.eye(n), r=np.eye(2)))
        assert max(e.real for e in sol.closed_loop_eigs) < 0.0
        assert sol.residual <= 1e-9 * max(1.0, np.linalg.norm(sol.p))


def test_non_stabilizable_raises_with_modes():
    # second state is unstable and disconnected from the input
    a = np.array([[0.0, 0.0], [0.0, 2.0]])
    b = np.array([[1.0], [0.0]])
    mdl = LinearModel(a=a, b=b)
    assert not mdl.stabilizable
    with pytest.raises(NonStabilizableError) as err:
        solve_lqr(mdl, LqrWeights(q=np.eye(2), r=np.eye(1)))
    assert any(abs(m - 2.0) < 1e-6 for m in err.value.modes)


def test_riccati_residual_consistency():
    mdl = LinearModel(a=[[0.0, 1.0], [0.0, 0.0]], b=[[0.0], [1.0]])
    w = LqrWeights(q=np.eye(2), r=np.eye(1))
    sol = solve_lqr(mdl, w)
    assert riccati_residual(mdl, w, sol.p) == sol.residual


def test_constrained_control_zero_state():
    mdl = LinearModel(a=[[0.0, 1.0], [0.0, 0.0]], b=[[0.0], [1.0]])
    w = LqrWeights(q=np.eye(2), r=np.eye(1), u_max=np.array([5.0]),
                   du_min=np.array([-1.0]), du_max=np.array([1.0]))
    ctrl = ConstrainedLqr(mdl, w)
    u = ctrl.step(np.zeros(2))
    np.testing.assert_allclose(u, 0.0)


def test_constrained_control_saturation_and_rate_limit():
    mdl = LinearModel(a=[[0.0, 1.0], [0.0, 0.0]], b=[[0.0], [1.0]])
    w = LqrWeights(q=np.eye(2), r=np.eye(1), u_max=np.array([5.0]),
                   du_min=np.array([-1.0]), du_max=np.array([1.0]))
    ctrl = ConstrainedLqr(mdl, w)
    u_ff = np.array([2.5])
    prev = ctrl.step(np.zeros(2), u_ff=u_ff)
    for _ in range(30):
        u = ctrl.step(np.array([-100.0, -100.0]), u_ff=u_ff)
        assert 0.0 <= u[0] <= 5.0
        assert abs(u[0] - prev[0]) <= 1.0 + 1e-12
        prev = u
    assert prev[0] == pytest.approx(5.0)  # pinned at the ceiling


def test_constrained_control_fuzz_bounds():
    rng = np.random.default_rng(7)
    mdl = LinearModel(a=np.zeros((3, 3)), b=np.eye(3))
    w = LqrWeights(q=np.eye(3), r=np.eye(3),
                   u_max=np.full(3, 2.0),
                   du_min=np.full(3, -0.5), du_max=np.full(3, 0.5),
                   p_s=np.eye(3) * 3.0,
                   y_min=np.full(3, -1.0), y_max=np.full(3, 1.0))
    ctrl = ConstrainedLqr(mdl, w)
    prev = None
    for _ in range(500):
        u = ctrl.step(rng.normal(scale=5.0, size=3),
                      u_ff=rng.uniform(0, 2, size=3))
        assert np.all(u >= -1e-12) and np.all(u <= 2.0 + 1e-12)
        if prev is not None:
            assert np.all(np.abs(u - prev) <= 0.5 + 1e-12)
        prev = u


def test_ground_effect_feedforward_division():
    # a 4/3 thrust ratio at half prop radius must reduce the commanded rotor
    # thrust by exactly 3/4
    params = default_params()
    from landair.controllers import FusionController
    from landair.sim import Terrain, hover_linear_model, default_lqr_weights

    terrain = Terrain(0.0)
    lin = hover_linear_model(params, terrain)
    w = default_lqr_weights(params)
    half_r = params.ground_effect.radius / 2.0

    ctrl_ge = FusionController(params, lin, w,
                               rotor_clearances=lambda s: np.full(4, half_r))
    ctrl_free = FusionController(params, lin, w,
                                 rotor_clearances=lambda s: np.full(4, 10.0))
    state = RobotState()
    state.pos = np.array([0.0, 0.0, half_r])
    ref = FlightReference(pos=state.pos.copy())
    u_ge = ctrl_ge.control(state, ref, 0.004)
    u_free = ctrl_free.control(state, ref, 0.004)
    t_ge = params.flight.c_omega * u_ge.rotor_speeds**2
    t_free = params.flight.c_omega * u_free.rotor_speeds**2
    # hover trim has zero induced-velocity washout only at V = 0
    np.testing.assert_allclose(t_ge, t_free * 3.0 / 4.0, rtol=1e-6)


def test_pid_loop_p_only_proportional():
    loop = PidLoop(PidGains(kp=2.0))
    assert loop.step(0.3, 0.01) == pytest.approx(0.6)
    assert loop.step(-1.0, 0.01) == pytest.approx(-2.0)


def test_pid_loop_integral_clamp():
    loop = PidLoop(PidGains(kp=0.0, ki=10.0, int_limit=0.5, out_limit=100.0))
    for _ in range(1000):
        out = loop.step(1.0, 0.01)
    assert out == pytest.approx(10.0 * 0.5)


def test_pid_zero_error_trim_output():
    params = default_params()
    ctrl = CascadePidController(params)
    state = RobotState()
    state.pos = np.array([0.0, 0.0, 2.0])
    ref = FlightReference(pos=state.pos.copy())
    u = ctrl.control(state, ref, 0.004)
    thrust = float(np.sum(params.flight.c_omega * u.rotor_speeds**2))
    assert thrust == pytest.approx(params.flight.m * params.flight.g, rel=1e-6)


def test_pid_step_response_golden_trace():
    # regression: 1 m climb command produces a monotone thrust rise until the
    # velocity loop takes over; values frozen from the tuned gains
    params = default_params()
    ctrl = CascadePidController(params)
    state = RobotState()
    state.pos = np.array([0.0, 0.0, 1.0])
    ref = FlightReference(pos=np.array([0.0, 0.0, 2.0]))
    thrusts = []
    for _ in range(5):
        u = ctrl.control(state, ref, 0.004)
        thrusts.append(float(np.sum(params.flight.c_omega * u.rotor_speeds**2)))
    diffs = np.diff(thrusts)
    assert thrusts[0] > params.flight.m * params.flight.g
    assert np.all(diffs >= -1e-9)


def test_attitude_from_force():
    roll, pitch = attitude_from_force(np.array([0.0, 0.0, 50.0]), 0.0)
    assert roll == 0.0 and pitch == 0.0
    _, pitch = attitude_from_force(np.array([10.0, 0.0, 50.0]), 0.0)
    assert pitch == pytest.approx(math.atan2(10.0, 50.0))
    roll, _ = attitude_from_force(np.array([0.0, 10.0, 50.0]), 0.0)
    assert roll < 0.0  # force toward +y needs negative roll
