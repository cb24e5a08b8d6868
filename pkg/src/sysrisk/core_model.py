"""Finite scenario spaces, agent payoff profiles and vectors of measures.

Every matrix in the package is indexed ``[agent, scenario]`` with the
scenario order fixed when the :class:`ScenarioSpace` is built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from numpy.typing import NDArray

from sysrisk.errors import (
    DimensionMismatch,
    DuplicateId,
    EmptySpace,
    InputError,
    NotAProbability,
    ZBelowOne,
)

DEFAULT_PROB_TOL = 1e-10


def _frozen(a: NDArray) -> NDArray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ScenarioSpace:
    """Ordered finite sample space with a weight function ``Z >= 1``.

    ``path_data`` optionally carries per-scenario price paths (see
    :mod:`sysrisk.market`); it plays no role in membership checks.
    """

    scenario_ids: tuple[str, ...]
    z_values: NDArray[np.float64]
    path_data: Any = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if len(self.scenario_ids) == 0:
            raise EmptySpace("a scenario space needs at least one scenario")
        if len(set(self.scenario_ids)) != len(self.scenario_ids):
            raise DuplicateId(f"duplicate scenario ids in {list(self.scenario_ids)}")
        z = np.asarray(self.z_values, dtype=float)
        if z.shape != (len(self.scenario_ids),):
            raise DimensionMismatch("z_values must have one entry per scenario")
        if not np.all(np.isfinite(z)):
            raise InputError("z_values must be finite")
        if np.any(z < 1.0):
            raise ZBelowOne(f"Z must map into [1, inf); got min {z.min()}")
        object.__setattr__(self, "z_values", _frozen(z.copy()))

    @property
    def size(self) -> int:
        return len(self.scenario_ids)

    def index(self, scenario_id: str) -> int:
        return self.scenario_ids.index(scenario_id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScenarioSpace):
            return NotImplemented
        return self.scenario_ids == other.scenario_ids and np.array_equal(
            self.z_values, other.z_values
        )

    def __hash__(self) -> int:
        return hash((self.scenario_ids, self.z_values.tobytes()))


def build_scenario_space(
    ids: Sequence[Any], z_values: Sequence[float] | None = None, path_data: Any = None
) -> ScenarioSpace:
    """Build a space; ``z_values`` defaults to ``Z == 1``."""
    ids = tuple(str(i) for i in ids)
    if len(ids) == 0:
        raise EmptySpace("a scenario space needs at least one scenario")
    if z_values is None:
        z_values = [1.0] * len(ids)
    if len(z_values) != len(ids):
        raise DimensionMismatch(
            f"{len(ids)} scenario ids but {len(z_values)} z values"
        )
    return ScenarioSpace(ids, np.asarray(z_values, dtype=float), path_data)


def _check_matrix(space: ScenarioSpace, values: Any, what: str) -> NDArray[np.float64]:
    arr = np.array(values, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1:
        raise DimensionMismatch(f"{what} must be an N x |Omega| matrix with N >= 1")
    if arr.shape[1] != space.size:
        raise DimensionMismatch(
            f"{what} has {arr.shape[1]} columns, space has {space.size} scenarios"
        )
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} entries must be finite")
    return _frozen(arr)


@dataclass(frozen=True, eq=False)
class RandomVector:
    """Payoff profile of N agents; ``values[i, w]`` is agent i in scenario w."""

    space: ScenarioSpace
    values: NDArray[np.float64]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", _check_matrix(self.space, self.values, "RandomVector"))

    @property
    def n_agents(self) -> int:
        return self.values.shape[0]

    @classmethod
    def zeros(cls, space: ScenarioSpace, n_agents: int) -> RandomVector:
        return cls(space, np.zeros((n_agents, space.size)))

    @classmethod
    def constant(cls, space: ScenarioSpace, c: Sequence[float]) -> RandomVector:
        c = np.asarray(c, dtype=float).reshape(-1, 1)
        return cls(space, np.repeat(c, space.size, axis=1))

    def _same(self, other: RandomVector) -> None:
        if other.space != self.space or other.values.shape != self.values.shape:
            raise DimensionMismatch("random vectors live on different spaces or sizes")

    def __add__(self, other: RandomVector) -> RandomVector:
        self._same(other)
        return RandomVector(self.space, self.values + other.values)

    def __sub__(self, other: RandomVector) -> RandomVector:
        self._same(other)
        return RandomVector(self.space, self.values - other.values)

    def __neg__(self) -> RandomVector:
        return RandomVector(self.space, -self.values)

    def __mul__(self, k: float) -> RandomVector:
        return RandomVector(self.space, float(k) * self.values)

    __rmul__ = __mul__

    def shift(self, c: Sequence[float]) -> RandomVector:
        """Add the deterministic amount ``c[i]`` to agent i in every scenario."""
        c = np.asarray(c, dtype=float)
        if c.shape != (self.n_agents,):
            raise DimensionMismatch("shift must have one entry per agent")
        return RandomVector(self.space, self.values + c[:, None])


@dataclass(frozen=True, eq=False)
class MeasureVector:
    """N nonnegative measures on the scenario set, ``weights[i, w] = mu^i({w})``."""

    space: ScenarioSpace
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        w = _check_matrix(self.space, self.weights, "MeasureVector")
        if np.any(w < 0):
            raise InputError("measure weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    @property
    def n_agents(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class ProbabilityVector(MeasureVector):
    """A MeasureVector whose every row is a probability distribution."""

    def __post_init__(self) -> None:
        super().__post_init__()
        sums = self.weights.sum(axis=1)
        if np.any(np.abs(sums - 1.0) > DEFAULT_PROB_TOL):
            raise NotAProbability(f"row sums {sums.tolist()} differ from 1")

    def expectation(self, X: RandomVector) -> NDArray[np.float64]:
        """Per-agent expectations ``E^{Q_i}[X^i]``."""
        if X.space != self.space or X.n_agents != self.n_agents:
            raise DimensionMismatch("probability vector and payoff do not match")
        return np.einsum("iw,iw->i", self.weights, X.values)


def pairing(X: RandomVector, mu: MeasureVector) -> float:
    """Bilinear pairing ``sum_i sum_w X^i(w) mu^i({w})``."""
    if X.space != mu.space:
        raise DimensionMismatch("pairing across different scenario spaces")
    if X.n_agents != mu.n_agents:
        raise DimensionMismatch(
            f"pairing of {X.n_agents}-agent payoff with {mu.n_agents}-agent measure"
        )
    return float(np.sum(X.values * mu.weights))


def validate_probability_vector(
    mu: MeasureVector | tuple[ScenarioSpace, Any], tol: float = DEFAULT_PROB_TOL
) -> ProbabilityVector:
    """Accept weights within ``tol`` of a probability vector and clean them.

    Negative entries no smaller than ``-tol`` are clamped to zero and each
    row is renormalized to sum to one.  ``mu`` may also be a raw
    ``(space, weights)`` pair, which allows slightly negative inputs such as
    LP multipliers.
    """
    if isinstance(mu, MeasureVector):
        space, w = mu.space, np.array(mu.weights, dtype=float)
    else:
        space, raw = mu
        w = np.array(raw, dtype=float)
        if w.ndim == 1:
            w = w.reshape(1, -1)
        if w.ndim != 2 or w.shape[1] != space.size:
            raise DimensionMismatch("weights do not match the scenario space")
    if not np.all(np.isfinite(w)):
        raise NotAProbability("non-finite weight")
    if np.any(w < -tol):
        raise NotAProbability(f"materially negative weight {w.min():.3e}")
    sums = w.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > tol):
        raise NotAProbability(f"row sums {sums.tolist()} are not within {tol} of 1")
    w = np.clip(w, 0.0, None)
    w = w / w.sum(axis=1, keepdims=True)
    return ProbabilityVector(space, w)
