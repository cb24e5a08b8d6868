import numpy as np
import pytest

from instances import random_aggregation
from sysrisk.aggregation import (
    AffineMax,
    NegativePart,
    Network,
    PiecewiseLinear,
    SumUtility,
    evaluate,
    hypograph_constraints,
    hypograph_value,
)
from sysrisk.errors import DimensionMismatch, InputError

KINDS = ("sum_utility", "negative_part", "network", "sum")


def test_negative_part_counts_only_losses():
    assert evaluate(NegativePart((1.0, 1.0, 1.0)), [1.0, -2.0, 3.0]) == -2.0


@pytest.mark.parametrize("kind", KINDS)
def test_zero_at_origin(kind):
    rng = np.random.default_rng(1)
    for N in (1, 2, 3):
        spec = random_aggregation(rng, kind, N)
        v = evaluate(spec, np.zeros(N))
        if kind == "network":
            assert abs(v) <= 1e-9
        else:
            assert v == 0.0


def test_network_single_firm():
    net = Network(np.zeros((1, 1)), 2.0)
    assert evaluate(net, [-3.0]) == pytest.approx(-3.0, abs=1e-12)


def test_network_nonnegative_input_is_zero():
    rng = np.random.default_rng(2)
    for _ in range(20):
        net = random_aggregation(rng, "network", 3)
        assert evaluate(net, rng.uniform(0, 5, 3)) == pytest.approx(0.0, abs=1e-12)


def test_network_rejects_bad_parameters():
    with pytest.raises(InputError):
        Network(np.zeros((2, 2)), 1.0)
    with pytest.raises(InputError):
        Network(np.eye(2) * 0.5, 2.0)
    with pytest.raises(InputError):
        Network(np.array([[0.0, 1.5], [0.0, 0.0]]), 2.0)


def test_affine_max_must_vanish_at_origin():
    with pytest.raises(InputError):
        AffineMax(np.array([[1.0]]), np.array([1.0]))
    with pytest.raises(InputError):
        AffineMax(np.array([[-1.0]]), np.array([0.0]))


def test_dimension_checked():
    with pytest.raises(DimensionMismatch):
        evaluate(NegativePart((1.0, 1.0)), [1.0, 2.0, 3.0])


def test_negative_part_hypograph_is_separable():
    spec = NegativePart((1.0, 0.0, 2.5))
    h = hypograph_constraints(spec)
    # one aux per weighted agent, capped at zero by a bound, plus the summing row
    assert h.n_rows == 3 and h.n_aux == 2
    assert np.all(h.aux_ub == 0.0)
    for x in ([1.0, -3.0, -0.4], [-2.0, 5.0, 0.0], [0.3, 0.1, 0.2]):
        assert hypograph_value(spec, x) == pytest.approx(float(spec.evaluate_many(np.array([x]))[0]), abs=1e-12)


def test_single_affine_piece():
    h = hypograph_constraints(AffineMax(np.array([[1.0]]), np.array([0.0])))
    assert h.Cx.shape == (1, 1) and h.Cx[0, 0] == -1.0 and h.rhs[0] == 0.0


def test_network_hypograph_projection_on_grid():
    net = Network(np.zeros((1, 1)), 2.0)
    for x in range(-5, 6):
        assert hypograph_value(net, [float(x)]) == pytest.approx(min(x, 0.0), abs=1e-9)
        assert evaluate(net, [float(x)]) == pytest.approx(min(x, 0.0), abs=1e-9)


def test_sum_utility_matches_direct_formula():
    u = PiecewiseLinear.from_pieces([(2.0, 0.0), (0.5, 0.0)])
    u1 = PiecewiseLinear.from_pieces([(1.0, 0.0), (0.0, 1.0)])
    spec = SumUtility(0.5, (1.0, 2.0), u, (u1, u1))
    x = np.array([0.4, -3.0])
    expected = 0.5 * min(2 * x.sum(), 0.5 * x.sum()) + min(x[0], 1.0) + 2 * min(x[1], 1.0)
    assert evaluate(spec, x) == pytest.approx(expected)


def test_piecewise_linear_checks():
    with pytest.raises(InputError):
        PiecewiseLinear.from_pieces([(1.0, 0.5)])
    with pytest.raises(InputError):
        PiecewiseLinear.from_pieces([(-1.0, 0.0)])


@pytest.mark.parametrize("kind", KINDS)
def test_monotone_and_concave(kind):
    rng = np.random.default_rng(7)
    for _ in range(1000 if kind != "network" else 150):
        N = int(rng.integers(1, 4))
        spec = random_aggregation(rng, kind, N)
        x = rng.normal(0, 3, N)
        xp = x + rng.exponential(1.0, N)
        assert evaluate(spec, x) <= evaluate(spec, xp) + 1e-12
        y = rng.normal(0, 3, N)
        lam = rng.random()
        mid = evaluate(spec, lam * x + (1 - lam) * y)
        assert mid >= lam * evaluate(spec, x) + (1 - lam) * evaluate(spec, y) - 1e-8


@pytest.mark.parametrize("kind", KINDS)
def test_hypograph_consistency(kind):
    rng = np.random.default_rng(11)
    for _ in range(60):
        N = int(rng.integers(1, 4))
        spec = random_aggregation(rng, kind, N)
        x = rng.normal(0, 3, N)
        assert hypograph_value(spec, x) == pytest.approx(evaluate(spec, x), abs=1e-8)


def test_evaluate_many_agrees_with_evaluate():
    rng = np.random.default_rng(3)
    for kind in KINDS:
        spec = random_aggregation(rng, kind, 2)
        xs = rng.normal(0, 2, (25, 2))
        np.testing.assert_allclose(spec.evaluate_many(xs), [evaluate(spec, x) for x in xs], atol=1e-10)
