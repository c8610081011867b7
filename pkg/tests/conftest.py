"""Shared fixtures: the direct-collocation brute-force planner oracle."""

import numpy as np
import pytest


def _jerk_grid_matrices(b, duration, n):
    """Affine maps from a piecewise-constant jerk grid to the knot states."""
    dt = duration / n
    pj = np.zeros((n + 1, n))
    vj = np.zeros((n + 1, n))
    aj = np.zeros((n + 1, n))
    pc = np.zeros(n + 1)
    vc = np.zeros(n + 1)
    ac = np.zeros(n + 1)
    pc[0], vc[0], ac[0] = b.p0, b.v0, b.a0
    for k in range(n):
        pj[k + 1] = pj[k] + vj[k] * dt + aj[k] * dt**2 / 2
        pj[k + 1, k] += dt**3 / 6
        vj[k + 1] = vj[k] + aj[k] * dt
        vj[k + 1, k] += dt**2 / 2
        aj[k + 1] = aj[k]
        aj[k + 1, k] += dt
        pc[k + 1] = pc[k] + vc[k] * dt + ac[k] * dt**2 / 2
        vc[k + 1] = vc[k] + ac[k] * dt
        ac[k + 1] = ac[k]
    return pj, vj, aj, pc, vc, ac, dt


@pytest.fixture(scope="session")
def collocation_cost():
    """Brute-force constrained minimum: dense QP over a jerk grid."""
    cvxpy = pytest.importorskip("cvxpy")

    def solve(b, duration, lim, n=150):
        pj, vj, aj, pc, vc, ac, dt = _jerk_grid_matrices(b, duration, n)
        j = cvxpy.Variable(n)
        cons = [
            pj[-1] @ j + pc[-1] == b.pt,
            vj[-1] @ j + vc[-1] == b.vt,
            aj[-1] @ j + ac[-1] == b.at,
            cvxpy.abs(j) <= lim.j_max,
            cvxpy.abs(vj[1:-1] @ j + vc[1:-1]) <= lim.v_max,
        ]
        prob = cvxpy.Problem(
            cvxpy.Minimize(cvxpy.sum_squares(j) * dt / duration), cons)
        prob.solve(solver=cvxpy.CLARABEL)
        if prob.status not in ("optimal", "optimal_inaccurate"):
            raise RuntimeError(f"oracle QP failed: {prob.status}")
        return prob.value

    return solve
