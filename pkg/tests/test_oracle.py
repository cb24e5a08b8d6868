import math

import numpy as np
import pytest

from sysrisk.acceptance import Pointwise
from sysrisk.aggregation import Network, sum_aggregation
from sysrisk.core_model import RandomVector
from sysrisk.engine import Instance, compute_rho
from sysrisk.errors import BudgetExceeded, InputError
from sysrisk.market import MarketSet
from sysrisk.oracle import GridSpec, brute_force_network_lambda, brute_force_rho


def test_grid_spec_checks():
    with pytest.raises(InputError):
        GridSpec(1.0, 1.0, 0.1)
    with pytest.raises(InputError):
        GridSpec(0.0, 1.0, 0.0)
    assert GridSpec(0.0, 1.0, 0.25).points().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_running_example_on_fine_grid(running):
    inst, X = running
    assert brute_force_rho(inst, X, GridSpec(-5, 5, 0.01)) == pytest.approx(1.0, abs=0.02)


def test_zero_position(running):
    inst, _ = running
    assert brute_force_rho(inst, inst.zero(), GridSpec(-2, 2, 0.05)) == pytest.approx(0.0, abs=0.05)


def test_nothing_feasible_on_grid(running):
    inst, X = running
    assert brute_force_rho(inst, X, GridSpec(-5, 0.2, 0.1)) == math.inf


def test_budget(running):
    inst, X = running
    with pytest.raises(BudgetExceeded):
        brute_force_rho(inst, X, GridSpec(-5, 5, 0.001))


def test_with_market_coefficients(two_states):
    G = MarketSet(two_states, 2, (RandomVector(two_states, [[1.0, -0.5], [0.0, 0.0]]),))
    inst = Instance(two_states, 2, sum_aggregation(2), Pointwise(0.0), G)
    X = RandomVector(two_states, [[1.0, -2.0], [0.0, 1.0]])
    brute = brute_force_rho(inst, X, GridSpec(-2, 2, 0.05), GridSpec(-3, 3, 0.05))
    assert abs(brute - compute_rho(inst, X).value) <= 0.1


def test_network_oracle_examples():
    assert brute_force_network_lambda([[0.0]], 2.0, [1.5], GridSpec(-4, 0, 0.1)) == 0.0
    assert brute_force_network_lambda([[0.0]], 2.0, [-3.0], GridSpec(-5, 0, 0.1)) == pytest.approx(-3.0, abs=0.3)
    Pi = np.array([[0.0, 0.5], [0.5, 0.0]])
    step = 0.01
    brute = brute_force_network_lambda(Pi, 2.0, [-1.0, -1.0], GridSpec(-5, 0, step))
    exact = Network(Pi, 2.0).evaluate([-1.0, -1.0])
    assert exact - (1 + 2.0) * 2 * step <= brute <= exact + 1e-12


def test_network_oracle_refinement():
    Pi = np.array([[0.0, 0.3, 0.2], [0.1, 0.0, 0.4], [0.3, 0.3, 0.0]])
    x = np.array([-1.2, 0.4, -0.7])
    exact = Network(Pi, 1.8).evaluate(x)
    for step in (0.2, 0.1, 0.05):
        brute = brute_force_network_lambda(Pi, 1.8, x, GridSpec(-4, 0, step))
        assert exact - (1 + 1.8) * 3 * step <= brute <= exact + 1e-12


def test_network_oracle_rejects_positive_grid():
    with pytest.raises(InputError):
        brute_force_network_lambda([[0.0]], 2.0, [1.0], GridSpec(-1, 1, 0.1))
