"""Achievable zero-cost payoffs.

A :class:`MarketSet` is the span (or cone) of finitely many basis payoff
profiles.  :func:`build_gain_basis` generates such a basis from price paths
on a scenario tree: one discounted one-step gain per period, information
cell and risky asset, placed in the coordinate of each agent allowed to
trade that asset.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from numpy.typing import NDArray

from sysrisk import lp as lpmod
from sysrisk.core_model import RandomVector, ScenarioSpace
from sysrisk.errors import (
    DimensionMismatch,
    InputError,
    InvalidFiltration,
    NonMeasurablePrices,
)

SPAN, CONE = "span", "cone"


@dataclass(frozen=True, eq=False)
class PricePaths:
    """``prices[w, t, j]`` is ``S_t^j(w)``; column 0 is the numeraire."""

    prices: NDArray[np.float64]

    def __post_init__(self) -> None:
        p = np.array(self.prices, dtype=float)
        if p.ndim != 3 or p.shape[1] < 2 or p.shape[2] < 1:
            raise InputError("prices must have shape (scenarios, T+1, J+1) with T >= 1")
        if not np.all(np.isfinite(p)):
            raise InputError("prices must be finite")
        if np.any(p[:, :, 0] <= 0):
            raise InputError("the numeraire must be strictly positive")
        if np.any(np.abs(p[:, 0, :] - p[0, 0, :]) > 1e-12):
            raise InputError("initial prices must not depend on the scenario")
        p.setflags(write=False)
        object.__setattr__(self, "prices", p)

    @property
    def T(self) -> int:
        return self.prices.shape[1] - 1

    @property
    def J(self) -> int:
        return self.prices.shape[2] - 1

    def discounted(self) -> NDArray[np.float64]:
        return self.prices[:, :, 1:] / self.prices[:, :, :1]


@dataclass(frozen=True, eq=False)
class MarketSet:
    """``G = {sum_k h_k g_k}`` with ``h`` free (span) or ``h >= 0`` (cone)."""

    space: ScenarioSpace
    n_agents: int
    basis: tuple[RandomVector, ...] = ()
    mode: str = SPAN

    def __post_init__(self) -> None:
        if self.mode not in (SPAN, CONE):
            raise InputError(f"market mode must be 'span' or 'cone', not {self.mode!r}")
        object.__setattr__(self, "basis", tuple(self.basis))
        for g in self.basis:
            if g.space != self.space or g.n_agents != self.n_agents:
                raise DimensionMismatch("basis payoff does not match the market's space/agents")

    @classmethod
    def zero(cls, space: ScenarioSpace, n_agents: int) -> MarketSet:
        return cls(space, n_agents, (), SPAN)

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def is_span(self) -> bool:
        return self.mode == SPAN

    @property
    def per_agent(self) -> bool:
        """Every basis payoff is nonzero in at most one agent coordinate."""
        return all(np.count_nonzero(np.any(g.values != 0, axis=1)) <= 1 for g in self.basis)

    def tensor(self) -> NDArray[np.float64]:
        """Basis as a ``K x N x |Omega|`` array."""
        if not self.basis:
            return np.zeros((0, self.n_agents, self.space.size))
        return np.stack([g.values for g in self.basis])

    def combine(self, h: Sequence[float]) -> RandomVector:
        h = np.asarray(h, dtype=float).reshape(-1)
        if h.size != self.size:
            raise DimensionMismatch(f"{h.size} coefficients for {self.size} basis payoffs")
        if self.mode == CONE and np.any(h < 0):
            raise InputError("cone combinations need nonnegative coefficients")
        vals = np.tensordot(h, self.tensor(), axes=1) if self.size else np.zeros(
            (self.n_agents, self.space.size))
        return RandomVector(self.space, vals)


def _check_partition(part: Sequence[Sequence[int]], n: int, t: int) -> list[list[int]]:
    cells = [sorted(int(w) for w in cell) for cell in part]
    flat = [w for cell in cells for w in cell]
    if any(len(c) == 0 for c in cells) or sorted(flat) != list(range(n)):
        raise InvalidFiltration(f"period {t} partition does not cover each scenario exactly once")
    return cells


def _refines(fine: list[list[int]], coarse: list[list[int]]) -> bool:
    owner = {}
    for k, cell in enumerate(coarse):
        for w in cell:
            owner[w] = k
    return all(len({owner[w] for w in cell}) == 1 for cell in fine)


def build_gain_basis(
    space: ScenarioSpace,
    paths: PricePaths,
    agent_assignment: Mapping[int, int | Sequence[int]],
    filtration: Sequence[Sequence[Sequence[int]]],
    n_agents: int,
) -> list[RandomVector]:
    """Discounted one-step gains ``1_cell * (S_{t+1}/S^0_{t+1} - S_t/S^0_t)``.

    ``agent_assignment`` maps a risky asset index ``j`` in ``1..J`` to the
    agent (or agents) trading it.  ``filtration[t]`` is the partition of the
    scenario indices known at trading date ``t = 0..T-1``.
    """
    n = space.size
    if paths.prices.shape[0] != n:
        raise DimensionMismatch("one price path per scenario is required")
    T, J = paths.T, paths.J
    if len(filtration) != T:
        raise InvalidFiltration(f"need {T} partitions (dates 0..T-1), got {len(filtration)}")
    parts = [_check_partition(p, n, t) for t, p in enumerate(filtration)]
    if len(parts[0]) != 1:
        raise InvalidFiltration("the date-0 partition must be trivial")
    for t in range(1, T):
        if not _refines(parts[t], parts[t - 1]):
            raise InvalidFiltration(f"partition at date {t} does not refine date {t - 1}")
    for t, cells in enumerate(parts):
        for cell in cells:
            block = paths.prices[cell, t, :]
            if np.any(np.abs(block - block[0]) > 1e-12 * np.maximum(1.0, np.abs(block[0]))):
                raise NonMeasurablePrices(f"prices at date {t} vary within cell {cell}")

    assign: dict[int, list[int]] = {}
    for j, agents in agent_assignment.items():
        j = int(j)
        if not 1 <= j <= J:
            raise InputError(f"asset index {j} outside 1..{J}")
        agents = [agents] if isinstance(agents, (int, np.integer)) else list(agents)
        for a in agents:
            if not 0 <= int(a) < n_agents:
                raise InputError(f"agent index {a} outside 0..{n_agents - 1}")
        assign[j] = [int(a) for a in agents]

    disc = paths.discounted()
    basis: list[RandomVector] = []
    for t, cells in enumerate(parts):
        for cell in cells:
            for j in range(1, J + 1):
                gain = np.zeros(n)
                gain[cell] = disc[cell, t + 1, j - 1] - disc[cell, t, j - 1]
                for a in assign.get(j, []):
                    vals = np.zeros((n_agents, n))
                    vals[a] = gain
                    basis.append(RandomVector(space, vals))
    return basis


def market_from_tree(
    space: ScenarioSpace,
    paths: PricePaths,
    agent_assignment: Mapping[int, int | Sequence[int]],
    filtration: Sequence[Sequence[Sequence[int]]],
    n_agents: int,
    mode: str = SPAN,
) -> MarketSet:
    basis = build_gain_basis(space, paths, agent_assignment, filtration, n_agents)
    return MarketSet(space, n_agents, tuple(basis), mode)


@dataclass(frozen=True, eq=False)
class ArbitrageCertificate:
    agent: int
    coefficients: NDArray[np.float64]
    payoff: NDArray[np.float64]
    min_payoff: float


def contains_market_arbitrage(G: MarketSet, eps: float) -> ArbitrageCertificate | None:
    """Look for ``g in G`` of the form ``(0, .., g^i, .., 0)`` with ``g^i >= eps``.

    Returns the smallest-L1 combination found for the first such agent, or
    ``None`` if no agent has one.
    """
    if not eps > 0:
        raise InputError("eps must be positive")
    if G.size == 0:
        return None
    Gt = G.tensor()
    K, N, n = Gt.shape
    for i in range(N):
        if G.per_agent:
            ks = [k for k in range(K) if np.any(Gt[k, i] != 0)]
        else:
            ks = list(range(K))
        if not ks:
            continue
        sub = Gt[ks]
        m = len(ks)
        rows = []
        # variables: (h_plus, h_minus) for span, h for cone
        def expand(coefs):
            return np.concatenate([coefs, -coefs]) if G.is_span else coefs
        for w in range(n):
            rows.append((expand(sub[:, i, w]), lpmod.GE, eps))
        if not G.per_agent:
            for j in range(N):
                if j == i:
                    continue
                for w in range(n):
                    if np.any(sub[:, j, w] != 0):
                        rows.append((expand(sub[:, j, w]), lpmod.EQ, 0.0))
        nv = 2 * m if G.is_span else m
        res = lpmod.solve(lpmod.make_lp(np.ones(nv), rows, lb=0.0))
        if res.optimal:
            x = res.x
            h = x[:m] - x[m:] if G.is_span else x
            coefs = np.zeros(K)
            coefs[ks] = h
            payoff = np.tensordot(coefs, Gt, axes=1)
            return ArbitrageCertificate(i, coefs, payoff, float(payoff[i].min()))
    return None
