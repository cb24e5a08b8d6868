"""Monotone acceptance sets for univariate (aggregated) positions.

Both forms are polyhedral and upward closed, and contain 0.  Constraints are
produced as ``coef . Y >= rhs`` over the scenario values ``Y(w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from sysrisk.core_model import ProbabilityVector, ScenarioSpace
from sysrisk.errors import DimensionMismatch, InputError

DEFAULT_TOL = 1e-9


class AcceptanceSpec:
    kind: str = ""

    def constraints(self, space: ScenarioSpace) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        """Return ``(C, d)`` such that ``Y`` is acceptable iff ``C @ Y >= d``."""
        raise NotImplementedError


@dataclass(frozen=True)
class Pointwise(AcceptanceSpec):
    """``{Y : Y(w) >= c for every w}`` with ``c <= 0``."""

    c: float = 0.0
    kind = "pointwise"

    def __post_init__(self) -> None:
        if not math.isfinite(self.c) or self.c > 0:
            raise InputError("pointwise threshold must be finite and <= 0")

    def constraints(self, space):
        n = space.size
        return np.eye(n), np.full(n, float(self.c))


@dataclass(frozen=True, eq=False)
class ExpectationFamily(AcceptanceSpec):
    """``{Y : sum_i E^{P_k^i}[Y] + alpha_k >= 0 for every test k}``.

    Each test is a probability vector ``P_k`` over N agents together with a
    penalty ``alpha_k >= 0``.
    """

    tests: tuple[tuple[ProbabilityVector, float], ...]
    kind = "expectation_family"

    def __post_init__(self) -> None:
        tests = tuple((P, float(a)) for P, a in self.tests)
        if not tests:
            raise InputError("an empty test family would accept every position")
        space = tests[0][0].space
        for P, a in tests:
            if P.space != space:
                raise DimensionMismatch("all tests must live on one scenario space")
            if not math.isfinite(a) or a < 0:
                raise InputError("penalties alpha_k must be finite and >= 0")
        object.__setattr__(self, "tests", tests)

    @property
    def space(self) -> ScenarioSpace:
        return self.tests[0][0].space

    @property
    def min_alpha(self) -> float:
        return min(a for _, a in self.tests)

    def constraints(self, space):
        if space != self.space:
            raise DimensionMismatch("acceptance tests live on another scenario space")
        C = np.array([P.weights.sum(axis=0) for P, _ in self.tests])
        d = -np.array([a for _, a in self.tests])
        return C, d


def acceptance_constraints(A: AcceptanceSpec, space: ScenarioSpace):
    return A.constraints(space)


def is_acceptable(
    A: AcceptanceSpec, Y: Sequence[float], space: ScenarioSpace, tol: float = DEFAULT_TOL
) -> bool:
    """True iff every defining inequality holds up to additive ``tol``."""
    Y = np.asarray(Y, dtype=float).reshape(-1)
    if Y.size != space.size:
        raise DimensionMismatch("position does not match the scenario space")
    if isinstance(A, Pointwise):
        return bool(np.all(Y >= A.c - tol))
    if isinstance(A, ExpectationFamily):
        for P, alpha in A.tests:
            if float(np.sum(P.weights @ Y)) + alpha < -tol:
                return False
        return True
    C, d = A.constraints(space)
    return bool(np.all(C @ Y >= d - tol))
