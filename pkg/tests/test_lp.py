import numpy as np
import pytest

from sysrisk import lp
from sysrisk.oracle import vertex_enumeration_lp


def test_single_lower_bound():
    res = lp.solve(lp.make_lp([1.0], [([1.0], lp.GE, 3.0)], lb=-np.inf))
    assert res.status is lp.Status.OPTIMAL
    assert res.value == pytest.approx(3.0)
    assert res.duals[0] == pytest.approx(1.0)


def test_unbounded_ray():
    res = lp.solve(lp.make_lp([1.0], [([1.0], lp.GE, 0.0)], lb=-np.inf, sense="max"))
    assert res.status is lp.Status.UNBOUNDED
    assert res.ray[0] > 0
    assert lp.verify_ray(lp.make_lp([1.0], [([1.0], lp.GE, 0.0)], lb=-np.inf, sense="max"), res)


def test_covering_constraint_dual():
    res = lp.solve(lp.make_lp([1.0, 1.0], [([1.0, 1.0], lp.GE, 1.0)]))
    assert res.value == pytest.approx(1.0)
    assert res.duals[0] == pytest.approx(1.0)


def test_infeasible_carries_farkas():
    prob = lp.make_lp([1.0, 0.0], [([1.0, 1.0], lp.LE, -1.0)])
    res = lp.solve(prob)
    assert res.status is lp.Status.INFEASIBLE
    assert lp.verify_farkas(prob, res)


def test_equality_and_free_variables():
    # min x - y  s.t.  x + y = 2,  x - y >= -4,  x, y free
    prob = lp.make_lp([1.0, -1.0], [([1.0, 1.0], lp.EQ, 2.0), ([1.0, -1.0], lp.GE, -4.0)], lb=-np.inf)
    res = lp.solve(prob)
    assert res.value == pytest.approx(-4.0)
    r = lp.optimality_residuals(prob, res)
    assert max(r.values()) <= 1e-8


def test_text_export_is_stable():
    prob = lp.make_lp([1.0, 2.0], [([1.0, -1.0], lp.LE, 3.0)], ub=5.0)
    assert prob.to_text() == prob.to_text()
    assert "<=" in prob.to_text()


def random_lp(rng):
    n = int(rng.integers(1, 6))
    m = int(rng.integers(1, 6))
    A = rng.integers(-5, 6, (m, n)).astype(float)
    b = rng.integers(-5, 6, m).astype(float)
    rel = [(lp.LE, lp.GE, lp.EQ)[k] for k in rng.choice(3, m, p=[0.45, 0.45, 0.1])]
    lb = np.where(rng.random(n) < 0.3, -np.inf, rng.integers(-3, 1, n).astype(float))
    ub = np.where(rng.random(n) < 0.6, np.inf, rng.integers(1, 5, n).astype(float))
    c = rng.integers(-5, 6, n).astype(float)
    return lp.make_lp(c, list(zip(A, rel, b)), lb=lb, ub=ub, sense=("min", "max")[int(rng.integers(2))])


def test_random_lps_against_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(150):
        prob = random_lp(rng)
        res = lp.solve(prob)
        status, value = vertex_enumeration_lp(prob)
        assert res.status.value == status
        if status == "Optimal":
            assert res.value == pytest.approx(value, abs=1e-8)
            assert max(lp.optimality_residuals(prob, res).values()) <= 1e-8
        elif status == "Unbounded":
            assert lp.verify_ray(prob, res)
        else:
            assert lp.verify_farkas(prob, res)


def test_deterministic():
    rng = np.random.default_rng(9)
    prob = random_lp(rng)
    a, b = lp.solve(prob), lp.solve(prob)
    assert a.status == b.status and a.pivots == b.pivots
    if a.x is not None:
        assert np.array_equal(a.x, b.x)
