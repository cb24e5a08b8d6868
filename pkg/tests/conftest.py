import pytest

from sysrisk.acceptance import Pointwise
from sysrisk.aggregation import sum_aggregation
from sysrisk.core_model import RandomVector, build_scenario_space
from sysrisk.engine import Instance
from sysrisk.market import MarketSet


@pytest.fixture
def two_states():
    return build_scenario_space(["w1", "w2"], [1.0, 2.0])


@pytest.fixture
def running(two_states):
    """Two agents, two scenarios, total-wealth aggregation, no trading."""
    inst = Instance(two_states, 2, sum_aggregation(2), Pointwise(0.0), MarketSet.zero(two_states, 2))
    X = RandomVector(two_states, [[1.0, -2.0], [0.0, 1.0]])
    return inst, X
