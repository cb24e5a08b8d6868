import numpy as np
import pytest

from sysrisk.acceptance import ExpectationFamily, Pointwise, acceptance_constraints, is_acceptable
from sysrisk.core_model import ProbabilityVector, build_scenario_space
from sysrisk.errors import InputError


def half_half(sp, alpha=1.0):
    return ExpectationFamily(((ProbabilityVector(sp, [[0.5, 0.5], [0.5, 0.5]]), alpha),))


def test_zero_is_acceptable(two_states):
    for A in (Pointwise(0.0), Pointwise(-1.0), half_half(two_states, 0.0)):
        assert is_acceptable(A, [0.0, 0.0], two_states)


def test_pointwise_rejects_any_loss(two_states):
    assert not is_acceptable(Pointwise(0.0), [-0.1, 5.0], two_states)


def test_expectation_test_with_slack(two_states):
    assert is_acceptable(half_half(two_states), [-1.0, 0.0], two_states)
    assert not is_acceptable(half_half(two_states), [-1.5, 0.0], two_states)


def test_constraint_forms(two_states):
    C, d = acceptance_constraints(Pointwise(0.0), two_states)
    np.testing.assert_array_equal(C, np.eye(2))
    np.testing.assert_array_equal(d, [0.0, 0.0])
    C, d = acceptance_constraints(half_half(two_states), two_states)
    np.testing.assert_allclose(C, [[1.0, 1.0]])
    np.testing.assert_allclose(d, [-1.0])


def test_invalid_sets_rejected():
    with pytest.raises(InputError):
        ExpectationFamily(())
    with pytest.raises(InputError):
        Pointwise(0.5)
    sp = build_scenario_space(["a"])
    with pytest.raises(InputError):
        ExpectationFamily(((ProbabilityVector(sp, [[1.0]]), -0.1),))


def random_family(rng, sp, N, zero_alpha=False):
    tests = []
    for k in range(int(rng.integers(1, 4))):
        P = ProbabilityVector(sp, rng.dirichlet(np.ones(sp.size), size=N))
        tests.append((P, 0.0 if zero_alpha and k == 0 else rng.uniform(0, 2)))
    return ExpectationFamily(tuple(tests))


def test_upward_closed_and_consistent_with_constraints():
    rng = np.random.default_rng(4)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        sp = build_scenario_space([f"s{k}" for k in range(n)])
        A = Pointwise(-rng.uniform(0, 1)) if rng.random() < 0.5 else random_family(rng, sp, 2)
        Y = rng.normal(0, 1, n)
        C, d = acceptance_constraints(A, sp)
        assert is_acceptable(A, Y, sp) == bool(np.all(C @ Y >= d - 1e-9))
        if is_acceptable(A, Y, sp):
            assert is_acceptable(A, Y + rng.exponential(1.0, n), sp)


def test_zero_penalty_rejects_negative_constants():
    rng = np.random.default_rng(8)
    sp = build_scenario_space(["a", "b", "c"])
    for _ in range(50):
        A = random_family(rng, sp, 2, zero_alpha=True)
        assert not is_acceptable(A, np.full(3, -rng.uniform(1e-6, 5)), sp)
