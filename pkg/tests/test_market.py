import numpy as np
import pytest

from sysrisk.core_model import ProbabilityVector, RandomVector, build_scenario_space, pairing
from sysrisk.errors import InputError, InvalidFiltration, NonMeasurablePrices
from sysrisk.market import MarketSet, PricePaths, build_gain_basis, contains_market_arbitrage, market_from_tree


def one_period(s1, agent=0, N=2):
    sp = build_scenario_space([f"w{k}" for k in range(len(s1))])
    paths = PricePaths(np.array([[[1.0, 1.0], [1.0, v]] for v in s1]))
    return sp, build_gain_basis(sp, paths, {1: agent}, [[list(range(len(s1)))]], N)


def test_one_period_gain():
    sp, basis = one_period([2.0, 0.5])
    assert len(basis) == 1
    np.testing.assert_allclose(basis[0].values, [[1.0, -0.5], [0.0, 0.0]])


def test_no_risky_assets():
    sp = build_scenario_space(["a", "b"])
    paths = PricePaths(np.ones((2, 2, 1)))
    assert build_gain_basis(sp, paths, {}, [[[0, 1]]], 2) == []


def test_deterministic_asset_gives_zero_gain():
    _, basis = one_period([1.0, 1.0])
    assert np.all(basis[0].values == 0.0)


def test_zero_market_contains_only_zero(two_states):
    G = MarketSet.zero(two_states, 2)
    assert G.size == 0
    assert np.all(G.combine([]).values == 0.0)


def test_arbitrage_search_examples(two_states):
    assert contains_market_arbitrage(MarketSet.zero(two_states, 2), 0.1) is None
    hedge = MarketSet(two_states, 2, (RandomVector(two_states, [[1.0, -0.5], [0.0, 0.0]]),))
    for eps in (1e-6, 0.1, 1.0):
        assert contains_market_arbitrage(hedge, eps) is None
    arb = MarketSet(two_states, 2, (RandomVector(two_states, [[1.0, 2.0], [0.0, 0.0]]),))
    cert = contains_market_arbitrage(arb, 0.5)
    assert cert is not None and cert.agent == 0
    assert cert.coefficients[0] == pytest.approx(0.5)
    assert cert.min_payoff >= 0.5 - 1e-12
    with pytest.raises(InputError):
        contains_market_arbitrage(arb, 0.0)


def test_shared_payoff_needs_other_coordinates_cancelled(two_states):
    shared = RandomVector(two_states, [[1.0, 1.0], [-1.0, 2.0]])
    G = MarketSet(two_states, 2, (shared,))
    assert not G.per_agent
    assert contains_market_arbitrage(G, 0.1) is None


def test_cone_mode_rejects_negative_combination(two_states):
    G = MarketSet(two_states, 2, (RandomVector(two_states, [[1.0, -1.0], [0.0, 0.0]]),), "cone")
    with pytest.raises(InputError):
        G.combine([-1.0])


def tree():
    sp = build_scenario_space(["uu", "ud", "du", "dd"])
    S = np.array([[10, 12, 14.4], [10, 12, 9.6], [10, 8, 9.6], [10, 8, 6.4]], dtype=float)
    prices = np.stack([np.ones_like(S), S], axis=-1)
    return sp, prices, [[[0, 1, 2, 3]], [[0, 1], [2, 3]]]


def test_tree_gains_are_martingale_increments():
    sp, prices, filt = tree()
    basis = build_gain_basis(sp, PricePaths(prices), {1: [0, 1]}, filt, 2)
    assert len(basis) == 6
    # up and down moves are +-20%, so the risk-neutral weights are uniform
    Q = ProbabilityVector(sp, np.full((2, 4), 0.25))
    for g in basis:
        assert pairing(g, Q) == pytest.approx(0.0, abs=1e-12)


def test_numeraire_scaling_invariance():
    sp, prices, filt = tree()
    rng = np.random.default_rng(0)
    factor = np.ones((4, 3))
    factor[:, 1] = rng.uniform(0.5, 2.0)
    factor[:, 2] = rng.uniform(0.5, 2.0, 4)
    factor[1, 1] = factor[0, 1]
    factor[3, 1] = factor[2, 1] = rng.uniform(0.5, 2.0)
    scaled = prices * factor[:, :, None]
    a = build_gain_basis(sp, PricePaths(prices), {1: 0}, filt, 1)
    b = build_gain_basis(sp, PricePaths(scaled), {1: 0}, filt, 1)
    for g, h in zip(a, b):
        np.testing.assert_allclose(g.values, h.values, atol=1e-10)


def test_filtration_errors():
    sp, prices, filt = tree()
    with pytest.raises(InvalidFiltration):
        build_gain_basis(sp, PricePaths(prices), {1: 0}, [[[0, 1], [2, 3]], [[0, 1], [2, 3]]], 1)
    with pytest.raises(InvalidFiltration):
        build_gain_basis(sp, PricePaths(prices), {1: 0}, [[[0, 1, 2, 3]], [[0, 2], [1, 3]], [[0]]], 1)
    with pytest.raises(NonMeasurablePrices):
        build_gain_basis(sp, PricePaths(prices), {1: 0}, [[[0, 1, 2, 3]], [[0, 1, 2, 3]]], 1)


def test_span_closed_under_negation():
    sp, prices, filt = tree()
    G = market_from_tree(sp, PricePaths(prices), {1: 0}, filt, 1)
    rng = np.random.default_rng(5)
    for _ in range(50):
        h = rng.normal(size=G.size)
        np.testing.assert_allclose(G.combine(-h).values, -G.combine(h).values)
