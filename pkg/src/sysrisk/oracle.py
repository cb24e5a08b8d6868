"""Brute-force reference computations for the test-suite.

Nothing here is used by the production code paths; each function solves
its problem by exhaustive search so that it can be used to cross-check the
simplex-based engine.  Not part of the public API.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from sysrisk.errors import BudgetExceeded, InputError

GRID_BUDGET = 10**6
_BIG = 1e6


@dataclass(frozen=True)
class GridSpec:
    lower: float
    upper: float
    step: float

    def __post_init__(self) -> None:
        if not self.lower < self.upper:
            raise InputError("grid needs lower < upper")
        if not self.step > 0:
            raise InputError("grid step must be positive")

    def points(self) -> NDArray[np.float64]:
        n = int(math.floor((self.upper - self.lower) / self.step + 1e-9)) + 1
        return self.lower + self.step * np.arange(n)


def _grid_size(grids: list[GridSpec]) -> int:
    total = 1
    for g in grids:
        total *= g.points().size
    return total


# --------------------------------------------------------------------------
# Linear programs by vertex enumeration.


def vertex_enumeration_lp(lp) -> tuple[str, float | None]:
    """Solve a small LP by enumerating basic solutions.

    Infinite variable bounds are replaced by a box of half-width 1e6; an
    optimum only reachable on that box is reported as ``"Unbounded"``.
    """
    n = lp.n_vars
    rows: list[tuple[NDArray, str, float, bool]] = []
    for k in range(lp.n_rows):
        rows.append((lp.A[k], lp.relations[k], float(lp.b[k]), False))
    eye = np.eye(n)
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        rows.append((eye[j], ">=", float(lo) if np.isfinite(lo) else -_BIG, not np.isfinite(lo)))
        rows.append((eye[j], "<=", float(hi) if np.isfinite(hi) else _BIG, not np.isfinite(hi)))
    M = np.array([r[0] for r in rows])
    rhs = np.array([r[2] for r in rows])
    rel = np.array([r[1] for r in rows])
    boxed = np.array([r[3] for r in rows])
    eq = [k for k, r in enumerate(rows) if r[1] == "="]
    ineq = [k for k, r in enumerate(rows) if r[1] != "="]
    if len(eq) >= n:
        # Surplus equalities are enforced by the feasibility filter below.
        choices = itertools.combinations(eq, n)
    else:
        choices = (eq + list(c) for c in itertools.combinations(ineq, n - len(eq)))
    combos = np.array(list(itertools.islice(choices, GRID_BUDGET + 1)), dtype=int).reshape(-1, n)
    if combos.shape[0] > GRID_BUDGET:
        raise BudgetExceeded(f"more than {GRID_BUDGET} bases to enumerate")
    tol_all = 1e-7 * np.maximum(1.0, np.abs(rhs))
    sols_l, combos_l = [], []
    for s in range(0, combos.shape[0], 100_000):
        cb = combos[s:s + 100_000]
        S = M[cb]
        det = np.linalg.det(S) if n else np.ones(len(cb))
        good = np.abs(det) > 1e-9
        cb, S = cb[good], S[good]
        if cb.shape[0] == 0:
            continue
        sols = np.linalg.solve(S, rhs[cb][..., None])[..., 0]
        ax = sols @ M.T
        feas = np.ones(len(sols), dtype=bool)
        feas &= np.all(np.where(rel == "<=", ax <= rhs + tol_all, True), axis=1)
        feas &= np.all(np.where(rel == ">=", ax >= rhs - tol_all, True), axis=1)
        feas &= np.all(np.where(rel == "=", np.abs(ax - rhs) <= tol_all, True), axis=1)
        sols_l.append(sols[feas])
        combos_l.append(cb[feas])
    if not sols_l or sum(len(x) for x in sols_l) == 0:
        return "Infeasible", None
    feas_sols = np.concatenate(sols_l)
    feas_combos = np.concatenate(combos_l)
    sgn = 1.0 if lp.sense == "min" else -1.0
    vals = sgn * (feas_sols @ lp.c)
    on_box = np.any(boxed[feas_combos], axis=1)
    best = vals.min()
    ties = vals <= best + 1e-9 * max(1.0, abs(best))
    if np.all(on_box[ties]):
        return "Unbounded", None
    return "Optimal", float(sgn * vals[ties & ~on_box].min())


# --------------------------------------------------------------------------
# Capital requirement by grid search.


def _check_budget(grids: list[GridSpec]) -> None:
    cells = 1.0
    for g in grids:
        cells *= (g.upper - g.lower) / g.step
    if cells > GRID_BUDGET * (1 + 1e-9):
        raise BudgetExceeded(f"grid has {cells:.3g} cells, budget is {GRID_BUDGET}")


def _mesh(axes: list[NDArray[np.float64]]) -> NDArray[np.float64]:
    if not axes:
        return np.zeros((1, 0))
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(axes))


def brute_force_rho(inst, X, m_grid: GridSpec, h_grid: GridSpec | None = None,
                    tol: float = 1e-9, chunk: int = 100_000) -> float:
    """Smallest ``sum m`` over grid points whose aggregated position is acceptable.

    ``m_grid`` is used for every agent and ``h_grid`` for every market
    coefficient; the aggregation is evaluated scenario by scenario.
    """
    from sysrisk.acceptance import acceptance_constraints

    N, K = inst.n_agents, inst.market.size
    if N > 2 or K > 2:
        raise InputError("brute force is limited to N <= 2 and at most 2 market payoffs")
    if K and h_grid is None:
        raise InputError("a grid for the market coefficients is required")
    grids = [m_grid] * N + ([h_grid] * K if K else [])
    _check_budget(grids)
    m_pts = _mesh([m_grid.points()] * N)
    h_pts = _mesh([h_grid.points()] * K) if K else np.zeros((1, 0))
    Xv = np.asarray(X.values, dtype=float)
    T = inst.market.tensor() if K else np.zeros((0, N, inst.space.size))
    C, d = acceptance_constraints(inst.acceptance, inst.space)
    n = inst.space.size
    best = math.inf
    order = np.argsort(m_pts.sum(axis=1), kind="stable")
    m_pts = m_pts[order]
    for h in h_pts:
        base = Xv + np.tensordot(h, T, axes=1) if K else Xv
        for s in range(0, m_pts.shape[0], chunk):
            ms = m_pts[s:s + chunk]
            if ms[0].sum() >= best:
                break
            pos = ms[:, :, None] + base[None, :, :]
            flat = pos.transpose(0, 2, 1).reshape(-1, N)
            Y = inst.aggregation.evaluate_many(flat).reshape(-1, n)
            ok = np.all(Y @ C.T >= d - tol, axis=1)
            if ok.any():
                best = min(best, float(ms[ok].sum(axis=1).min()))
    return best


# --------------------------------------------------------------------------
# Network aggregation by enumeration.


def brute_force_network_lambda(Pi, gamma_net: float, x, grid: GridSpec) -> float:
    """Grid maximum of ``sum y + gamma_net * sum b`` over the clearing constraints.

    ``y`` ranges over the grid (which must lie in ``(-inf, 0]``).  For fixed
    ``y`` the best ``b`` is explicit, ``b_i = min(0, x_i - y_i + (Pi^T y)_i)``,
    so only the ``N`` coordinates of ``y`` are enumerated.
    """
    Pi = np.atleast_2d(np.asarray(Pi, dtype=float))
    x = np.asarray(x, dtype=float).reshape(-1)
    N = x.size
    if N > 3 or Pi.shape != (N, N):
        raise InputError("network oracle needs a square Pi with N <= 3")
    if grid.upper > 0:
        raise InputError("the y grid must be nonpositive")
    _check_budget([grid] * N)
    pts = grid.points()
    if pts[-1] < 0 and abs(pts[-1]) < 1e-12:
        pts[-1] = 0.0
    Y = _mesh([pts] * N)
    b = np.minimum(0.0, x[None, :] - Y + Y @ Pi)
    return float(np.max(Y.sum(axis=1) + gamma_net * b.sum(axis=1)))
