"""Concave increasing aggregation functions with ``Lambda(0) = 0``.

Each variant can be evaluated pointwise and described by a polyhedral
hypograph, which is what the risk engine embeds in its linear programs.
The closed-form variants are minima of finitely many affine maps; the
network variant is the value of an inner maximization and carries
auxiliary variables ``(y, b)`` in its hypograph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from sysrisk import lp as lpmod
from sysrisk.errors import DimensionMismatch, InnerLPFailed, InputError

_ZERO_TOL = 1e-12


@dataclass(frozen=True)
class PiecewiseLinear:
    """Univariate concave ``u(t) = min_k (slope_k * t + intercept_k)``."""

    slopes: tuple[float, ...]
    intercepts: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.slopes) == 0 or len(self.slopes) != len(self.intercepts):
            raise InputError("a piecewise-linear function needs matching nonempty pieces")
        if any(not math.isfinite(v) for v in (*self.slopes, *self.intercepts)):
            raise InputError("pieces must be finite")
        if min(self.slopes) < 0:
            raise InputError("utility pieces must have nonnegative slopes")
        if abs(min(self.intercepts)) > _ZERO_TOL:
            raise InputError("u(0) = min(intercepts) must equal 0")

    @classmethod
    def from_pieces(cls, pieces: Sequence[tuple[float, float]]) -> PiecewiseLinear:
        return cls(tuple(float(p[0]) for p in pieces), tuple(float(p[1]) for p in pieces))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.min(np.multiply.outer(t, self.slopes) + np.asarray(self.intercepts), axis=-1)


@dataclass(frozen=True)
class Hypograph:
    """Rows ``Cx.x + cu*u + Caux.w (rel) rhs`` whose projection is ``u <= Lambda(x)``."""

    n_agents: int
    Cx: NDArray[np.float64]
    cu: NDArray[np.float64]
    Caux: NDArray[np.float64]
    relations: tuple[str, ...]
    rhs: NDArray[np.float64]
    aux_lb: NDArray[np.float64]
    aux_ub: NDArray[np.float64]

    @property
    def n_aux(self) -> int:
        return self.Caux.shape[1]

    @property
    def n_rows(self) -> int:
        return self.rhs.size


class AggregationSpec:
    """Base class; subclasses are immutable dataclasses."""

    kind: str = ""

    @property
    def n_agents(self) -> int:
        raise NotImplementedError

    def _check_x(self, x) -> NDArray[np.float64]:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n_agents:
            raise DimensionMismatch(f"expected {self.n_agents} components, got {x.shape[-1]}")
        if not np.all(np.isfinite(x)):
            raise InputError("aggregation input must be finite")
        return x

    def evaluate(self, x) -> float:
        return float(self.evaluate_many(np.atleast_2d(self._check_x(x)))[0])

    def evaluate_many(self, xs: NDArray) -> NDArray[np.float64]:
        """Evaluate on the rows of an ``M x N`` array."""
        raise NotImplementedError

    def hypograph(self) -> Hypograph:
        raise NotImplementedError

    def _assert_zero_at_origin(self) -> None:
        v = self.evaluate(np.zeros(self.n_agents))
        if abs(v) > 1e-9:
            raise InputError(f"aggregation must vanish at 0, got {v}")


class PiecewiseAggregation(AggregationSpec):
    """Variants that are a minimum of affine maps ``a_k.x + b_k``."""

    def pieces(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        raise NotImplementedError

    def hypograph(self) -> Hypograph:
        a, b = self.pieces()
        k = b.size
        return Hypograph(
            n_agents=self.n_agents,
            Cx=-a,
            cu=np.ones(k),
            Caux=np.zeros((k, 0)),
            relations=(lpmod.LE,) * k,
            rhs=b.copy(),
            aux_lb=np.zeros(0),
            aux_ub=np.zeros(0),
        )


def _dedupe(a: NDArray, b: NDArray) -> tuple[NDArray, NDArray]:
    rows = np.round(np.column_stack([a, b]), 14)
    _, idx = np.unique(rows, axis=0, return_index=True)
    idx = np.sort(idx)
    return a[idx], b[idx]


def _sum_of_minima(terms: list[tuple[NDArray, NDArray]], n: int) -> tuple[NDArray, NDArray]:
    """Pieces of ``sum_t min_k (a_tk.x + b_tk)`` by expanding the product."""
    if not terms:
        return np.zeros((1, n)), np.zeros(1)
    a_out, b_out = [], []
    for combo in itertools.product(*[range(t[1].size) for t in terms]):
        a_out.append(sum(t[0][k] for t, k in zip(terms, combo)))
        b_out.append(sum(t[1][k] for t, k in zip(terms, combo)))
    return _dedupe(np.array(a_out, dtype=float), np.array(b_out, dtype=float))


@dataclass(frozen=True, eq=False)
class AffineMax(PiecewiseAggregation):
    """Generic concave PL aggregation ``min_k (a_k.x + b_k)`` (slopes >= 0, min b = 0)."""

    slopes: NDArray[np.float64]
    intercepts: NDArray[np.float64]
    kind = "affine_max"

    def __post_init__(self) -> None:
        a = np.atleast_2d(np.array(self.slopes, dtype=float))
        b = np.array(self.intercepts, dtype=float).reshape(-1)
        if a.shape[0] != b.size or b.size == 0:
            raise InputError("one intercept per affine piece is required")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise InputError("pieces must be finite")
        if np.any(a < 0):
            raise InputError("aggregation pieces must have nonnegative slopes")
        if abs(b.min()) > _ZERO_TOL:
            raise InputError("min of intercepts must be 0 so that Lambda(0) = 0")
        object.__setattr__(self, "slopes", a)
        object.__setattr__(self, "intercepts", b)
        self._assert_zero_at_origin()

    @property
    def n_agents(self) -> int:
        return self.slopes.shape[1]

    def pieces(self):
        return self.slopes.copy(), self.intercepts.copy()

    def evaluate_many(self, xs):
        return np.min(xs @ self.slopes.T + self.intercepts, axis=1)


def sum_aggregation(n: int) -> AffineMax:
    """``Lambda(x) = sum_i x_i``."""
    return AffineMax(np.ones((1, n)), np.zeros(1))


@dataclass(frozen=True)
class SumUtility(PiecewiseAggregation):
    """``alpha*u(sum x) + sum_i alpha_i*u_i(x_i)`` with concave PL utilities."""

    alpha: float
    alphas: tuple[float, ...]
    u: PiecewiseLinear | None
    us: tuple[PiecewiseLinear | None, ...]
    kind = "sum_utility"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(float(v) for v in self.alphas))
        object.__setattr__(self, "us", tuple(self.us))
        if len(self.alphas) == 0:
            raise InputError("need at least one agent")
        if len(self.us) != len(self.alphas):
            raise DimensionMismatch("one utility per agent is required")
        if self.alpha < 0 or min(self.alphas) < 0:
            raise InputError("utility weights must be nonnegative")
        if self.alpha > 0 and self.u is None:
            raise InputError("alpha > 0 needs the aggregate utility u")
        for a_i, u_i in zip(self.alphas, self.us):
            if a_i > 0 and u_i is None:
                raise InputError("alpha_i > 0 needs the utility u_i")
        self._assert_zero_at_origin()

    @property
    def n_agents(self) -> int:
        return len(self.alphas)

    def pieces(self):
        n = self.n_agents
        terms = []
        if self.alpha > 0:
            s = np.asarray(self.u.slopes)
            terms.append((self.alpha * np.outer(s, np.ones(n)), self.alpha * np.asarray(self.u.intercepts)))
        for i, (a_i, u_i) in enumerate(zip(self.alphas, self.us)):
            if a_i > 0:
                e = np.zeros(n)
                e[i] = 1.0
                terms.append((a_i * np.outer(u_i.slopes, e), a_i * np.asarray(u_i.intercepts)))
        return _sum_of_minima(terms, n)

    def hypograph(self) -> Hypograph:
        """Separable form: one auxiliary ``t_k <= u_k(.)`` per utility term and
        ``u <= sum_k w_k t_k``.  Row count grows with the sum, not the product,
        of the piece counts."""
        n = self.n_agents
        terms = []
        if self.alpha > 0:
            terms.append((self.alpha, np.ones(n), self.u))
        for i, (a_i, u_i) in enumerate(zip(self.alphas, self.us)):
            if a_i > 0:
                e = np.zeros(n)
                e[i] = 1.0
                terms.append((a_i, e, u_i))
        K = len(terms)
        rows_x, rows_u, rows_w, rhs = [np.zeros(n)], [1.0], [np.array([-w for w, _, _ in terms])], [0.0]
        for k, (_, e, fn) in enumerate(terms):
            for slope, icpt in zip(fn.slopes, fn.intercepts):
                unit = np.zeros(K)
                unit[k] = 1.0
                rows_x.append(-slope * e)
                rows_u.append(0.0)
                rows_w.append(unit)
                rhs.append(icpt)
        r = len(rhs)
        return Hypograph(
            n_agents=n,
            Cx=np.array(rows_x),
            cu=np.array(rows_u),
            Caux=np.array(rows_w).reshape(r, K),
            relations=(lpmod.LE,) * r,
            rhs=np.array(rhs),
            aux_lb=np.full(K, -np.inf),
            aux_ub=np.full(K, np.inf),
        )

    def evaluate_many(self, xs):
        out = np.zeros(xs.shape[0])
        if self.alpha > 0:
            out += self.alpha * self.u(xs.sum(axis=1))
        for i, (a_i, u_i) in enumerate(zip(self.alphas, self.us)):
            if a_i > 0:
                out += a_i * u_i(xs[:, i])
        return out


@dataclass(frozen=True)
class NegativePart(PiecewiseAggregation):
    """``-sum_i alpha_i * (x_i)^-``, the weighted total shortfall."""

    alphas: tuple[float, ...]
    kind = "negative_part"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", tuple(float(v) for v in self.alphas))
        if len(self.alphas) == 0:
            raise InputError("need at least one agent")
        if min(self.alphas) < 0 or not all(math.isfinite(v) for v in self.alphas):
            raise InputError("alpha_i must be finite and nonnegative")

    @property
    def n_agents(self) -> int:
        return len(self.alphas)

    def pieces(self):
        n = self.n_agents
        terms = []
        for i, a_i in enumerate(self.alphas):
            if a_i > 0:
                e = np.zeros(n)
                e[i] = a_i
                terms.append((np.vstack([np.zeros(n), e]), np.zeros(2)))
        return _sum_of_minima(terms, n)

    def hypograph(self) -> Hypograph:
        """Separable form: ``t_i <= alpha_i x_i`` with ``t_i <= 0`` as a bound, and ``u <= sum t_i``."""
        n = self.n_agents
        live = [i for i, a in enumerate(self.alphas) if a > 0]
        K = len(live)
        Cx = np.zeros((K + 1, n))
        Caux = np.zeros((K + 1, K))
        Caux[0] = -1.0
        for k, i in enumerate(live):
            Cx[k + 1, i] = -self.alphas[i]
            Caux[k + 1, k] = 1.0
        cu = np.zeros(K + 1)
        cu[0] = 1.0
        return Hypograph(
            n_agents=n, Cx=Cx, cu=cu, Caux=Caux, relations=(lpmod.LE,) * (K + 1),
            rhs=np.zeros(K + 1), aux_lb=np.full(K, -np.inf), aux_ub=np.zeros(K),
        )

    def evaluate_many(self, xs):
        return np.minimum(xs, 0.0) @ np.asarray(self.alphas)


@dataclass(frozen=True, eq=False)
class Network(AggregationSpec):
    """Clearing-style aggregation

    ``max { sum y + gamma_net * sum b : y, b <= 0,
            x_i >= b_i + y_i - sum_j Pi[j, i] y_j }``

    where ``Pi[j, i]`` is the fraction of firm j's debt owed to firm i and
    ``gamma_net > 1`` prices capital injections against debt reduction.
    """

    liabilities: NDArray[np.float64]
    gamma_net: float
    kind = "network"

    def __post_init__(self) -> None:
        Pi = np.atleast_2d(np.array(self.liabilities, dtype=float))
        n = Pi.shape[0]
        if Pi.shape != (n, n):
            raise InputError("liability matrix must be square")
        if not np.all(np.isfinite(Pi)) or np.any(Pi < 0) or np.any(Pi > 1):
            raise InputError("liability fractions must lie in [0, 1]")
        if np.any(np.abs(np.diag(Pi)) > 0):
            raise InputError("liability matrix must have a zero diagonal")
        if np.any(Pi.sum(axis=1) > 1 + 1e-12):
            raise InputError("liability rows must sum to at most 1")
        if not (math.isfinite(self.gamma_net) and self.gamma_net > 1):
            raise InputError("gamma_net must exceed 1")
        Pi.setflags(write=False)
        object.__setattr__(self, "liabilities", Pi)
        object.__setattr__(self, "gamma_net", float(self.gamma_net))

    @property
    def n_agents(self) -> int:
        return self.liabilities.shape[0]

    def hypograph(self) -> Hypograph:
        n = self.n_agents
        Pi = self.liabilities
        # aux = (y_1..y_n, b_1..b_n)
        Cx = np.zeros((n + 1, n))
        cu = np.zeros(n + 1)
        Caux = np.zeros((n + 1, 2 * n))
        cu[0] = 1.0
        Caux[0, :n] = -1.0
        Caux[0, n:] = -self.gamma_net
        for i in range(n):
            Cx[i + 1, i] = 1.0
            Caux[i + 1, :n] = Pi[:, i]
            Caux[i + 1, i] -= 1.0
            Caux[i + 1, n + i] = -1.0
        return Hypograph(
            n_agents=n,
            Cx=Cx,
            cu=cu,
            Caux=Caux,
            relations=(lpmod.LE,) + (lpmod.GE,) * n,
            rhs=np.zeros(n + 1),
            aux_lb=np.full(2 * n, -math.inf),
            aux_ub=np.zeros(2 * n),
        )

    def inner_lp(self, x) -> lpmod.LinearProgram:
        n = self.n_agents
        x = np.asarray(x, dtype=float)
        c = np.concatenate([np.ones(n), np.full(n, self.gamma_net)])
        A = np.zeros((n, 2 * n))
        for i in range(n):
            A[i, :n] = -self.liabilities[:, i]
            A[i, i] += 1.0
            A[i, n + i] = 1.0
        return lpmod.LinearProgram(
            c, A, (lpmod.LE,) * n, x, np.full(2 * n, -math.inf), np.zeros(2 * n), sense="max"
        )

    def evaluate_many(self, xs):
        out = np.empty(xs.shape[0])
        for k, x in enumerate(xs):
            res = lpmod.solve(self.inner_lp(x))
            if not res.optimal:
                raise InnerLPFailed(f"network inner problem returned {res.status.value}")
            out[k] = res.value
        return out


def evaluate(spec: AggregationSpec, x) -> float:
    return spec.evaluate(x)


def hypograph_constraints(spec: AggregationSpec) -> Hypograph:
    return spec.hypograph()


def hypograph_value(spec: AggregationSpec, x) -> float:
    """``max {u : (x, u) in hypograph}`` computed with the LP kernel."""
    h = spec.hypograph()
    x = spec._check_x(x)
    na = h.n_aux
    c = np.zeros(1 + na)
    c[0] = 1.0
    A = np.column_stack([h.cu, h.Caux])
    b = h.rhs - h.Cx @ x
    lb = np.concatenate([[-math.inf], h.aux_lb])
    ub = np.concatenate([[math.inf], h.aux_ub])
    res = lpmod.solve(lpmod.LinearProgram(c, A, h.relations, b, lb, ub, sense="max"))
    if not res.optimal:
        raise InnerLPFailed(f"hypograph LP returned {res.status.value}")
    return res.value


def strictly_increasing_sampled(spec: AggregationSpec, rng: np.random.Generator, n: int = 200) -> bool:
    """Sampled check that raising any single coordinate strictly raises Lambda."""
    N = spec.n_agents
    xs = rng.uniform(-5, 5, size=(n, N))
    base = spec.evaluate_many(xs)
    for i in range(N):
        bumped = xs.copy()
        bumped[:, i] += rng.uniform(0.01, 1.0, size=n)
        if np.any(spec.evaluate_many(bumped) <= base + 1e-12):
            return False
    return True
