"""Market-adjusted systemic risk measures on a finite scenario space.

``rho(X) = inf { sum m : Lambda(m + X + g) in A for some g in G }``

and its variant ``rho_Gamma`` in which the traded payoff is aggregated by a
separate function: ``Lambda(m + X) + Gamma(g) in A``.  Both are solved as a
single LP in which ``Lambda(...) in A`` is relaxed to ``u <= Lambda(...)``
and ``u in A``; the relaxation is exact because ``A`` is upward closed.

The dual side (worst-case probability vector ``Q*`` and the penalty) is
read off the LP multipliers and then recomputed independently from support
functions of the acceptable set and of the market.
"""

from __future__ import annotations

import enum
import logging
import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from sysrisk import lp as lpmod
from sysrisk.acceptance import AcceptanceSpec, ExpectationFamily, is_acceptable
from sysrisk.aggregation import AggregationSpec, Hypograph, strictly_increasing_sampled
from sysrisk.core_model import (
    ProbabilityVector,
    RandomVector,
    ScenarioSpace,
    validate_probability_vector,
)
from sysrisk.errors import (
    DimensionMismatch,
    DualExtractionFailed,
    InputError,
    MissingGamma,
    NotAProbability,
    NotASpan,
)
from sysrisk.market import MarketSet

log = logging.getLogger(__name__)

RHO, RHO_GAMMA = "rho", "rho_gamma"
DUAL_PROB_TOL = 1e-8
DUALITY_TOL = 1e-6
FAIR_TOL = 1e-9


class Finiteness(str, enum.Enum):
    FINITE = "Finite"
    MINUS_INFINITY = "MinusInfinity"
    PLUS_INFINITY = "PlusInfinity"


@dataclass(frozen=True, eq=False)
class Instance:
    space: ScenarioSpace
    n_agents: int
    aggregation: AggregationSpec
    acceptance: AcceptanceSpec
    market: MarketSet
    gamma_aggregation: AggregationSpec | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.n_agents < 1:
            raise InputError("need at least one agent")
        if self.aggregation.n_agents != self.n_agents:
            raise DimensionMismatch("aggregation dimension differs from the agent count")
        if self.gamma_aggregation is not None and self.gamma_aggregation.n_agents != self.n_agents:
            raise DimensionMismatch("second aggregation dimension differs from the agent count")
        if self.market.space != self.space or self.market.n_agents != self.n_agents:
            raise DimensionMismatch("market does not match the instance")
        if isinstance(self.acceptance, ExpectationFamily):
            if self.acceptance.space != self.space:
                raise DimensionMismatch("acceptance tests live on another space")
            for P, _ in self.acceptance.tests:
                if P.n_agents != self.n_agents:
                    raise DimensionMismatch("acceptance test has the wrong number of agents")

    def zero(self) -> RandomVector:
        return RandomVector.zeros(self.space, self.n_agents)

    def check_x(self, X: RandomVector) -> None:
        if X.space != self.space or X.n_agents != self.n_agents:
            raise DimensionMismatch("payoff profile does not match the instance")


# --------------------------------------------------------------------------
# LP assembly


class _Builder:
    """Collects variables and dense row blocks over chosen columns."""

    def __init__(self) -> None:
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.names: list[str] = []
        self.blocks: list[tuple[list[int], NDArray, tuple[str, ...], NDArray]] = []
        self.row_names: list[str] = []

    def var(self, name: str, lb: float = -math.inf, ub: float = math.inf) -> int:
        self.lb.append(lb)
        self.ub.append(ub)
        self.names.append(name)
        return len(self.lb) - 1

    def block(self, cols: list[int], M: NDArray, rels: tuple[str, ...], rhs: NDArray,
              names: list[str]) -> list[int]:
        start = len(self.row_names)
        self.blocks.append((cols, M, rels, rhs))
        self.row_names.extend(names)
        return list(range(start, len(self.row_names)))

    def row(self, coefs: dict[int, float], rel: str, rhs: float, name: str) -> int:
        cols = list(coefs)
        return self.block(cols, np.array([[coefs[j] for j in cols]]), (rel,), np.array([float(rhs)]), [name])[0]

    def build(self, objective: dict[int, float], sense: str = "min") -> lpmod.LinearProgram:
        n = len(self.lb)
        c = np.zeros(n)
        for j, v in objective.items():
            c[j] += v
        A = np.zeros((len(self.row_names), n))
        rels: list[str] = []
        r = 0
        for cols, M, rl, _ in self.blocks:
            k = M.shape[0]
            for p, j in enumerate(cols):
                A[r:r + k, j] += M[:, p]
            rels.extend(rl)
            r += k
        b = np.concatenate([blk[3] for blk in self.blocks]) if self.blocks else np.zeros(0)
        return lpmod.LinearProgram(
            c, A, tuple(rels), b, np.array(self.lb), np.array(self.ub), sense,
            tuple(self.names), tuple(self.row_names),
        )


def _hypograph(spec: AggregationSpec) -> Hypograph:
    """``spec.hypograph()``, memoised on the (immutable) spec object."""
    h = spec.__dict__.get("_hypograph_cache")
    if h is None:
        h = spec.hypograph()
        object.__setattr__(spec, "_hypograph_cache", h)
    return h


def _add_hypograph(
    bld: _Builder,
    hyp: Hypograph,
    value_var: int,
    x_vars: list[dict[int, float]],
    x_const: NDArray,
    tag: str,
) -> list[int]:
    """Instantiate ``value <= Agg(x)`` with ``x_i = x_const[i] + sum x_vars[i]``."""
    aux = [bld.var(f"{tag}_w{k}", hyp.aux_lb[k], hyp.aux_ub[k]) for k in range(hyp.n_aux)]
    xcols = sorted({j for xv in x_vars for j in xv})
    pos = {j: p for p, j in enumerate(xcols)}
    X = np.zeros((hyp.n_agents, len(xcols)))
    for i, xv in enumerate(x_vars):
        for j, v in xv.items():
            X[i, pos[j]] += v
    M = np.hstack([hyp.Cx @ X, hyp.cu[:, None], hyp.Caux])
    rhs = hyp.rhs - hyp.Cx @ np.asarray(x_const, dtype=float)
    return bld.block(xcols + [value_var] + aux, M, hyp.relations, rhs,
                     [f"{tag}_h{r}" for r in range(hyp.n_rows)])


def _add_acceptance(bld: _Builder, inst: Instance, value_vars: list[list[int]]) -> list[int]:
    """``C @ (sum of value_vars per scenario) >= d``."""
    C, d = inst.acceptance.constraints(inst.space)
    cols = [v for vs in value_vars for v in vs]
    M = np.repeat(C, [len(vs) for vs in value_vars], axis=1)
    return bld.block(cols, M, (lpmod.GE,) * C.shape[0], np.asarray(d, dtype=float),
                     [f"acc{k}" for k in range(C.shape[0])])


@dataclass(frozen=True, eq=False)
class PrimalLP:
    lp: lpmod.LinearProgram
    m_vars: list[int]
    h_vars: list[int]
    lambda_rows: list[list[int]]
    variant: str


def _market_terms(inst: Instance, h_vars: list[int], w: int) -> list[dict[int, float]]:
    Gt = inst.market.tensor()
    out = []
    for i in range(inst.n_agents):
        out.append({h: Gt[k, i, w] for k, h in enumerate(h_vars) if Gt[k, i, w] != 0.0})
    return out


def _h_bounds(inst: Instance) -> tuple[float, float]:
    return (-math.inf if inst.market.is_span else 0.0), math.inf


def assemble_primal(inst: Instance, X: RandomVector, variant: str = RHO) -> PrimalLP:
    """Primal LP for ``rho`` (or ``rho_Gamma``) at ``X``; objective ``min sum m``.

    ``X`` only enters the right-hand side of the aggregation rows, so the LP
    at ``X = 0`` is built once per instance and variant and then shifted.
    """
    inst.check_x(X)
    cache = inst.__dict__.setdefault("_primal_templates", {})
    tpl = cache.get(variant)
    if tpl is None:
        tpl = cache[variant] = _assemble_template(inst, variant)
    hyp = _hypograph(inst.aggregation)
    rows = np.asarray(tpl.lambda_rows)
    b = tpl.lp.b.copy()
    b[rows] -= (hyp.Cx @ X.values).T
    return dataclasses.replace(tpl, lp=tpl.lp.with_rhs(b))


def _assemble_template(inst: Instance, variant: str) -> PrimalLP:
    X = inst.zero()
    if variant == RHO_GAMMA and inst.gamma_aggregation is None:
        raise MissingGamma("the rho_Gamma variant needs a second aggregation function")
    if variant not in (RHO, RHO_GAMMA):
        raise InputError(f"unknown variant {variant!r}")
    bld = _Builder()
    N, n = inst.n_agents, inst.space.size
    m_vars = [bld.var(f"m{i}") for i in range(N)]
    hlo, hhi = _h_bounds(inst)
    h_vars = [bld.var(f"h{k}", hlo, hhi) for k in range(inst.market.size)]
    hyp = _hypograph(inst.aggregation)
    hyp_g = _hypograph(inst.gamma_aggregation) if variant == RHO_GAMMA else None
    lambda_rows: list[list[int]] = []
    values: list[list[int]] = []
    for w in range(n):
        u = bld.var(f"u{w}")
        mkt = _market_terms(inst, h_vars, w)
        if variant == RHO:
            xv = [{m_vars[i]: 1.0, **mkt[i]} for i in range(N)]
            lambda_rows.append(_add_hypograph(bld, hyp, u, xv, X.values[:, w], f"L{w}"))
            values.append([u])
        else:
            xv = [{m_vars[i]: 1.0} for i in range(N)]
            lambda_rows.append(_add_hypograph(bld, hyp, u, xv, X.values[:, w], f"L{w}"))
            v = bld.var(f"v{w}")
            _add_hypograph(bld, hyp_g, v, mkt, np.zeros(N), f"G{w}")
            values.append([u, v])
    _add_acceptance(bld, inst, values)
    lp = bld.build({j: 1.0 for j in m_vars})
    return PrimalLP(lp, m_vars, h_vars, lambda_rows, variant)


# --------------------------------------------------------------------------
# Primal


@dataclass(frozen=True, eq=False)
class RiskResult:
    status: Finiteness
    value: float
    m: NDArray[np.float64] | None
    h: NDArray[np.float64] | None
    primal: PrimalLP
    lp_result: lpmod.LPResult

    @property
    def finite(self) -> bool:
        return self.status is Finiteness.FINITE


def _solve_primal(inst: Instance, X: RandomVector, variant: str) -> RiskResult:
    P = assemble_primal(inst, X, variant)
    res = lpmod.solve(P.lp)
    if res.status is lpmod.Status.OPTIMAL:
        return RiskResult(Finiteness.FINITE, res.value, res.x[P.m_vars], res.x[P.h_vars], P, res)
    if res.status is lpmod.Status.UNBOUNDED:
        return RiskResult(Finiteness.MINUS_INFINITY, -math.inf, None, None, P, res)
    return RiskResult(Finiteness.PLUS_INFINITY, math.inf, None, None, P, res)


def compute_rho(inst: Instance, X: RandomVector | None = None) -> RiskResult:
    return _solve_primal(inst, X if X is not None else inst.zero(), RHO)


def compute_rho_gamma(inst: Instance, X: RandomVector | None = None) -> RiskResult:
    return _solve_primal(inst, X if X is not None else inst.zero(), RHO_GAMMA)


def compute_risk(inst: Instance, X: RandomVector | None = None, variant: str = RHO) -> RiskResult:
    return _solve_primal(inst, X if X is not None else inst.zero(), variant)


def compute_gamma(inst: Instance, variant: str = RHO) -> float:
    """``rho(0)``, the canonical threshold of the instance (may be ``-inf``)."""
    res = compute_risk(inst, None, variant)
    if res.finite and res.value > 1e-9:
        log.warning("rho(0) = %.6g is positive; the threshold is expected to be <= 0", res.value)
    return res.value


def acceptable_position(inst: Instance, X: RandomVector, m, h, variant: str = RHO,
                        tol: float = 1e-7) -> bool:
    """Direct check that ``(m, h)`` secures ``X``, by pointwise evaluation."""
    g = inst.market.combine(h)
    xs = (X.values + np.asarray(m, dtype=float)[:, None])
    if variant == RHO:
        agg = inst.aggregation.evaluate_many((xs + g.values).T)
    else:
        agg = inst.aggregation.evaluate_many(xs.T) + inst.gamma_aggregation.evaluate_many(g.values.T)
    return is_acceptable(inst.acceptance, agg, inst.space, tol)


# --------------------------------------------------------------------------
# Support functions and dual


def _aggregate_support_lp(inst: Instance, Q: ProbabilityVector, variant: str) -> lpmod.LinearProgram:
    """``max sum_i E^{Q_i}[-W^i]`` over the acceptable set of the variant."""
    bld = _Builder()
    N, n = inst.n_agents, inst.space.size
    hyp = _hypograph(inst.aggregation)
    objective: dict[int, float] = {}
    values = []
    h_vars: list[int] = []
    if variant == RHO_GAMMA:
        hlo, hhi = _h_bounds(inst)
        h_vars = [bld.var(f"h{k}", hlo, hhi) for k in range(inst.market.size)]
        hyp_g = _hypograph(inst.gamma_aggregation)
    for w in range(n):
        W = [bld.var(f"W{i}_{w}") for i in range(N)]
        for i in range(N):
            objective[W[i]] = -Q.weights[i, w]
        u = bld.var(f"u{w}")
        _add_hypograph(bld, hyp, u, [{W[i]: 1.0} for i in range(N)], np.zeros(N), f"L{w}")
        if variant == RHO_GAMMA:
            v = bld.var(f"v{w}")
            _add_hypograph(bld, hyp_g, v, _market_terms(inst, h_vars, w), np.zeros(N), f"G{w}")
            values.append([u, v])
        else:
            values.append([u])
    _add_acceptance(bld, inst, values)
    return bld.build(objective, sense="max")


def support_aggregate(inst: Instance, Q: ProbabilityVector, variant: str = RHO) -> float:
    """Support function of ``{W : Lambda(W) in A}`` at ``Q`` (``+inf`` if unbounded).

    For the ``rho_Gamma`` variant the set is ``{W : Lambda(W) + Gamma(g) in A, g in G}``.
    """
    res = lpmod.solve(_aggregate_support_lp(inst, Q, variant))
    if res.status is lpmod.Status.UNBOUNDED:
        return math.inf
    if not res.optimal:
        raise InputError("acceptable set is empty")
    return res.value


def market_pairings(G: MarketSet, Q: ProbabilityVector) -> NDArray[np.float64]:
    """``sum_i E^{Q_i}[g_k^i]`` for every basis payoff ``g_k``."""
    if G.size == 0:
        return np.zeros(0)
    return np.einsum("kiw,iw->k", G.tensor(), Q.weights)


def support_market(G: MarketSet, Q: ProbabilityVector, sign: float = -1.0,
                   tol: float = FAIR_TOL) -> float:
    """``sup_{g in G} sum_i E^{sign*Q_i}[-g^i]``: either 0 or ``+inf``."""
    p = -sign * market_pairings(G, Q)
    scale = 1.0 + (float(np.max(np.abs(G.tensor()))) if G.size else 0.0)
    if G.is_span:
        return 0.0 if np.all(np.abs(p) <= tol * scale) else math.inf
    return 0.0 if np.all(p <= tol * scale) else math.inf


def support_function(target: str, inst: Instance, Q: ProbabilityVector, sign: float = 1.0,
                     variant: str = RHO) -> float:
    if target == "aggregate_acceptance":
        return support_aggregate(inst, Q, variant)
    if target == "market":
        return support_market(inst.market, Q, sign)
    raise InputError(f"unknown support-function target {target!r}")


def penalty_decomposition(inst: Instance, Q: ProbabilityVector, variant: str = RHO) -> tuple[float, float]:
    """``(sigma_{Lambda^-1(A)}(Q), sigma_G(-Q))``.

    In the ``rho_Gamma`` variant the market is folded into the first set, so
    the second component is 0.
    """
    first = support_aggregate(inst, Q, variant)
    if variant == RHO_GAMMA:
        return first, 0.0
    return first, support_market(inst.market, Q, -1.0)


@dataclass(frozen=True, eq=False)
class DualResult:
    Q: ProbabilityVector
    penalty: float
    dual_value: float
    primal_value: float
    decomposition: tuple[float, float]
    # rho*(-Q) via the Fenchel equality sum E^Q[-X] - rho(X) at the optimum.
    conjugate_at_optimum: float

    @property
    def gap(self) -> float:
        return abs(self.dual_value - self.primal_value)


def extract_measure(inst: Instance, risk: RiskResult, tol: float = DUAL_PROB_TOL) -> ProbabilityVector:
    """Aggregate the multipliers of the rows coupling ``m`` to each scenario."""
    if not risk.finite:
        raise DualExtractionFailed(f"no dual optimizer: rho is {risk.status.value}")
    y = risk.lp_result.duals
    A = risk.primal.lp.A
    N, n = inst.n_agents, inst.space.size
    weights = np.zeros((N, n))
    for w in range(n):
        rows = risk.primal.lambda_rows[w]
        for i, mv in enumerate(risk.primal.m_vars):
            weights[i, w] = float(y[rows] @ A[rows, mv])
    try:
        return validate_probability_vector((inst.space, weights), tol)
    except NotAProbability as exc:
        raise DualExtractionFailed(str(exc)) from exc


def compute_dual(inst: Instance, X: RandomVector | None = None, variant: str = RHO,
                 tol: float = DUAL_PROB_TOL) -> DualResult:
    X = X if X is not None else inst.zero()
    risk = compute_risk(inst, X, variant)
    Q = extract_measure(inst, risk, tol)
    dec = penalty_decomposition(inst, Q, variant)
    penalty = dec[0] + dec[1]
    ex = float(np.sum(Q.expectation(-X)))
    dual_value = ex - penalty
    conj = ex - risk.value
    log.debug("decomposition %s, conjugate %s", dec, conj)
    if not abs(dual_value - risk.value) <= DUALITY_TOL * (1.0 + abs(risk.value)):
        raise DualExtractionFailed(
            f"dual value {dual_value} does not match primal {risk.value}")
    return DualResult(Q, penalty, dual_value, risk.value, dec, conj)


def dual_objective(inst: Instance, Q: ProbabilityVector, X: RandomVector | None = None,
                   variant: str = RHO) -> float:
    """``sum_i E^{Q_i}[-X^i] - penalty(Q)`` for an arbitrary ``Q`` (weak-duality side)."""
    X = X if X is not None else inst.zero()
    dec = penalty_decomposition(inst, Q, variant)
    return float(np.sum(Q.expectation(-X))) - dec[0] - dec[1]


# --------------------------------------------------------------------------
# Arbitrage and fairness


@dataclass(frozen=True, eq=False)
class ArbitrageVerdict:
    arbitrage_free: bool
    gamma: float
    gamma_star: float
    m: NDArray[np.float64] | None = None
    h: NDArray[np.float64] | None = None
    certificate_verified: bool | None = None


def detect_regulatory_arbitrage(inst: Instance, gamma: float | None = None,
                                variant: str = RHO, tol: float = 1e-9) -> ArbitrageVerdict:
    """Is there ``m`` with ``sum m < gamma`` made acceptable by a zero-cost trade?"""
    risk = compute_risk(inst, None, variant)
    gstar = risk.value
    if gamma is None:
        # with gamma* = -inf every finite threshold admits arbitrage; 0 is the natural one
        gamma = gstar if math.isfinite(gstar) else (0.0 if gstar < 0 else gstar)
    if risk.status is Finiteness.PLUS_INFINITY or gstar >= gamma - tol:
        return ArbitrageVerdict(True, gamma, gstar)
    if risk.finite:
        m, h = risk.m, risk.h
    else:
        res = risk.lp_result
        P = risk.primal
        x0, ray = res.x, res.ray
        dsum = float(np.sum(ray[P.m_vars]))
        s0 = float(np.sum(x0[P.m_vars]))
        t = max(0.0, (s0 - gamma + 1.0) / -dsum) if dsum < 0 else 0.0
        x = x0 + t * ray
        m, h = x[P.m_vars], x[P.h_vars]
    ok = float(np.sum(m)) < gamma and acceptable_position(inst, inst.zero(), m, h, variant)
    return ArbitrageVerdict(False, gamma, gstar, m, h, ok)


def is_fair(Q: ProbabilityVector, G: MarketSet, tol: float = 1e-6) -> bool:
    """Every basis payoff has zero total expectation under ``Q``."""
    if not G.is_span:
        raise NotASpan("fairness is defined for a linear space of payoffs")
    return bool(np.all(np.abs(market_pairings(G, Q)) <= tol))


@dataclass(frozen=True, eq=False)
class FairMeasureReport:
    Q: ProbabilityVector | None
    gamma: float
    gamma_star: float
    validated: bool
    min_slack: float | None
    seed: int
    n_samples: int


def sample_acceptable(inst: Instance, rng: np.random.Generator, n_samples: int,
                      variant: str = RHO) -> list[RandomVector]:
    """Random elements of the set of positions that can be made acceptable.

    Each sample is ``Y + m_Y + D`` with ``Y`` random, ``m_Y`` an optimal
    allocation for ``Y`` and ``D >= 0`` a random (sometimes zero) top-up.
    """
    out = []
    N, n = inst.n_agents, inst.space.size
    while len(out) < n_samples:
        Y = RandomVector(inst.space, rng.normal(0.0, 2.0, size=(N, n)))
        r = compute_risk(inst, Y, variant)
        if not r.finite:
            continue
        top = rng.exponential(0.5, size=(N, n)) * (rng.random() < 0.5)
        out.append(RandomVector(inst.space, Y.values + r.m[:, None] + top))
    return out


def find_fair_measure(inst: Instance, gamma: float | None = None, variant: str = RHO,
                      seed: int = 0, n_samples: int = 200,
                      tol: float = DUAL_PROB_TOL) -> FairMeasureReport:
    """A probability vector under which every securable position is worth ``>= gamma``."""
    risk = compute_risk(inst, None, variant)
    gstar = risk.value
    if gamma is None:
        gamma = gstar
    if not risk.finite or gamma > gstar + 1e-9:
        return FairMeasureReport(None, gamma, gstar, False, None, seed, 0)
    dual = compute_dual(inst, None, variant, tol)
    Q = dual.Q
    rng = np.random.default_rng(seed)
    slack = math.inf
    for X in sample_acceptable(inst, rng, n_samples, variant):
        slack = min(slack, float(np.sum(Q.expectation(X))) - gamma)
    validated = slack >= -1e-6
    return FairMeasureReport(Q, gamma, gstar, validated, slack, seed, n_samples)


# --------------------------------------------------------------------------
# Assumption (A)


@dataclass(frozen=True)
class AssumptionStep:
    n: int
    z: float
    success: bool
    witness: tuple[float, ...] | None
    rho_bound_value: float
    rho_bound_limit: float
    bound_holds: bool


@dataclass(frozen=True)
class AssumptionReport:
    gamma: float
    gamma_star: float
    steps: tuple[AssumptionStep, ...]
    n0: int | None
    all_success: bool
    gamma_nonpositive: bool
    proposition_sufficient: bool | None = None

    @property
    def holds(self) -> bool:
        return self.all_success and all(s.bound_holds for s in self.steps)


def _assumption_lp(inst: Instance, level: float, variant: str) -> tuple[lpmod.LinearProgram, list[int]]:
    bld = _Builder()
    N, n = inst.n_agents, inst.space.size
    hlo, hhi = _h_bounds(inst)
    h_vars = [bld.var(f"h{k}", hlo, hhi) for k in range(inst.market.size)]
    hyp = _hypograph(inst.aggregation)
    const = np.full(N, level)
    values = []
    for w in range(n):
        u = bld.var(f"u{w}")
        mkt = _market_terms(inst, h_vars, w)
        if variant == RHO:
            _add_hypograph(bld, hyp, u, mkt, const, f"L{w}")
            values.append([u])
        else:
            _add_hypograph(bld, hyp, u, [{} for _ in range(N)], const, f"L{w}")
            v = bld.var(f"v{w}")
            _add_hypograph(bld, _hypograph(inst.gamma_aggregation), v, mkt, np.zeros(N), f"G{w}")
            values.append([u, v])
    _add_acceptance(bld, inst, values)
    return bld.build({}), h_vars


def check_assumption_A(inst: Instance, gamma: float | None = None, n_max: int = 10,
                       variant: str = RHO, seed: int = 0) -> AssumptionReport:
    """Finite-scale check of the richness condition on the market.

    On a finite space ``z = max Z`` kills the ``(Z - z)^+`` term, so for
    each ``n`` the condition reduces to the existence of ``g`` in ``G`` with
    ``(gamma/N + 1/n) 1 + g`` acceptable after aggregation.  The implied
    bound ``rho(-n (Z - z)^+ 1) <= N/n + gamma`` is checked with a primal solve.
    """
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    gstar = compute_gamma(inst, variant)
    if gamma is None:
        gamma = gstar
    if not math.isfinite(gamma):
        raise InputError("the threshold gamma must be finite")
    N = inst.n_agents
    z = float(np.max(inst.space.z_values))
    steps = []
    for n in range(1, n_max + 1):
        lp, h_vars = _assumption_lp(inst, gamma / N + 1.0 / n, variant)
        res = lpmod.solve(lp)
        witness = tuple(float(v) for v in res.x[h_vars]) if res.status is not lpmod.Status.INFEASIBLE else None
        shortfall = -n * np.maximum(inst.space.z_values - z, 0.0)
        X = RandomVector(inst.space, np.tile(shortfall, (N, 1)))
        rb = compute_risk(inst, X, variant).value
        limit = N / n + gamma
        steps.append(AssumptionStep(n, z, witness is not None, witness, rb, limit, rb <= limit + 1e-8))
    n0 = None
    for s in reversed(steps):
        if not s.success:
            break
        n0 = s.n
    prop = None
    if isinstance(inst.acceptance, ExpectationFamily):
        prop = inst.acceptance.min_alpha == 0.0 and strictly_increasing_sampled(
            inst.aggregation, np.random.default_rng(seed))
    return AssumptionReport(gamma, gstar, tuple(steps), n0, all(s.success for s in steps),
                            gamma <= 1e-12, prop)
