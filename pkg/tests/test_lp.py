import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lepi.lp import solve_lp

scipy_opt = pytest.importorskip("scipy.optimize")


def test_box_and_gub_vertex():
    res = solve_lp([-1, -2, -3], A_ub=[[1, 1, 0]], b_ub=[1], ub=[1, 1, 1])
    assert res.status == "optimal"
    assert res.fun == pytest.approx(-5)
    assert res.x == pytest.approx([0, 1, 1])


def test_infeasible_and_unbounded():
    assert solve_lp([1], A_ub=[[1]], b_ub=[-1]).status == "infeasible"
    assert solve_lp([-1]).status == "unbounded"


def test_free_variable_and_equality():
    res = solve_lp([1, 0], A_eq=[[1, 1]], b_eq=[2], lb=[-np.inf, 0], ub=[np.inf, 5])
    assert res.fun == pytest.approx(-3)


def test_degenerate_ties_deterministic():
    c = [-1, -1, -1, -1]
    A = [[1, 1, 1, 1], [1, 1, 0, 0], [0, 0, 1, 1]]
    r1 = solve_lp(c, A, [1, 1, 1], ub=[1] * 4)
    r2 = solve_lp(c, A, [1, 1, 1], ub=[1] * 4)
    assert r1.fun == pytest.approx(-1)
    assert np.array_equal(r1.x, r2.x)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**31))
def test_matches_highs(seed):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, 7)), int(rng.integers(1, 7))
    A = rng.integers(-5, 6, (m, n)).astype(float)
    b = rng.integers(-3, 10, m).astype(float)
    c = rng.integers(-5, 6, n).astype(float)
    lb = np.where(rng.random(n) < 0.3, -np.inf, 0.0)
    ub = np.where(rng.random(n) < 0.5, 1.0, np.inf)
    ours = solve_lp(c, A, b, lb=lb, ub=ub)
    ref = scipy_opt.linprog(c, A_ub=A, b_ub=b, bounds=list(zip([None if not np.isfinite(v) else v for v in lb],
                                                                  [None if not np.isfinite(v) else v for v in ub])),
                            method="highs")
    status = {0: "optimal", 2: "infeasible", 3: "unbounded"}[ref.status]
    assert ours.status == status
    if status == "optimal":
        assert ours.fun == pytest.approx(ref.fun, abs=1e-6)
        assert np.all(A @ ours.x <= b + 1e-7)
