"""Dense two-phase primal simplex with Bland's rule.

All optimization in the package goes through :func:`solve`.  Problems are
small (a few hundred columns at most), so a dense tableau is used and every
pivot is cheap to audit.

Free variables are eliminated before the simplex starts and recovered from
their defining rows afterwards.  That presolve does not depend on the
right-hand side and is memoised, since callers re-solve one program for many
``b``.  Phase one uses a single auxiliary column for slack rows that start at a
negative level and classical artificials only for rows without a unit column.

Dual multipliers are reported as sensitivities ``d value / d rhs`` in the
sense of the problem as posed, so for a minimization a ``>=`` row has a
nonnegative multiplier and a ``<=`` row a nonpositive one; the signs flip
for a maximization.  Reduced costs are ``c - A^T y``.
"""

from __future__ import annotations

import enum
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from sysrisk.errors import InputError, NumericalBreakdown

PIVOT_TOL = 1e-9
OPT_TOL = 1e-9
FEAS_TOL = 1e-9
REPORT_TOL = 1e-8
REL_PIVOT_TOL = 1e-10
REFACTOR_EVERY = 100
MARKOWITZ = 0.1
MAX_PIVOTS = 100_000

LE, GE, EQ = "<=", ">=", "="
_RELATIONS = (LE, GE, EQ)


class Status(str, enum.Enum):
    OPTIMAL = "Optimal"
    UNBOUNDED = "Unbounded"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """``min/max c.x  s.t.  A[k].x (rel[k]) b[k],  lb <= x <= ub``."""

    c: NDArray[np.float64]
    A: NDArray[np.float64]
    relations: tuple[str, ...]
    b: NDArray[np.float64]
    lb: NDArray[np.float64]
    ub: NDArray[np.float64]
    sense: str = "min"
    var_names: tuple[str, ...] | None = None
    row_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        c = np.array(self.c, dtype=float).reshape(-1)
        n = c.size
        A = np.array(self.A, dtype=float)
        if A.size == 0:
            A = A.reshape(0, n)
        b = np.array(self.b, dtype=float).reshape(-1)
        lb = np.array(self.lb, dtype=float).reshape(-1)
        ub = np.array(self.ub, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[1] != n or A.shape[0] != b.size:
            raise InputError(f"inconsistent LP dimensions: c {n}, A {A.shape}, b {b.size}")
        if len(self.relations) != b.size or any(r not in _RELATIONS for r in self.relations):
            raise InputError("one relation in {<=, >=, =} is needed per row")
        if lb.size != n or ub.size != n:
            raise InputError("bounds must have one entry per variable")
        if self.sense not in ("min", "max"):
            raise InputError(f"unknown objective sense {self.sense!r}")
        for arr, name in ((c, "c"), (A, "A"), (b, "b")):
            if not np.all(np.isfinite(arr)):
                raise InputError(f"LP data {name} must be finite")
        if np.any(np.isnan(lb)) or np.any(np.isnan(ub)) or np.any(lb == np.inf) or np.any(ub == -np.inf):
            raise InputError("invalid variable bounds")
        if self.var_names is not None and len(self.var_names) != n:
            raise InputError("var_names length mismatch")
        if self.row_names is not None and len(self.row_names) != b.size:
            raise InputError("row_names length mismatch")
        for name, arr in (("c", c), ("A", A), ("b", b), ("lb", lb), ("ub", ub)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "relations", tuple(self.relations))

    def with_rhs(self, b: NDArray) -> "LinearProgram":
        """Same program with a new right-hand side; the (read-only) rest is shared."""
        b = np.array(b, dtype=float).reshape(-1)
        if b.shape != self.b.shape:
            raise InputError(f"rhs has {b.size} entries, the program has {self.b.size} rows")
        if not np.all(np.isfinite(b)):
            raise InputError("LP data b must be finite")
        b.setflags(write=False)
        out = object.__new__(LinearProgram)
        out.__dict__.update(self.__dict__)
        object.__setattr__(out, "b", b)
        return out

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.b.size

    def names(self) -> tuple[str, ...]:
        return self.var_names or tuple(f"x{j}" for j in range(self.n_vars))

    def to_text(self) -> str:
        """Byte-stable text export, one constraint per line."""
        names = self.names()

        def terms(coefs: NDArray) -> str:
            parts = [f"{repr(float(v))}*{names[j]}" for j, v in enumerate(coefs) if v != 0.0]
            return " + ".join(parts) if parts else "0"

        lines = [f"{self.sense} {terms(self.c)}"]
        rnames = self.row_names or tuple(f"r{k}" for k in range(self.n_rows))
        for k in range(self.n_rows):
            lines.append(f"{rnames[k]}: {terms(self.A[k])} {self.relations[k]} {repr(float(self.b[k]))}")
        for j, nm in enumerate(names):
            lines.append(f"bound {nm}: {repr(float(self.lb[j]))} {repr(float(self.ub[j]))}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class LPResult:
    status: Status
    value: float | None = None
    x: NDArray[np.float64] | None = None
    duals: NDArray[np.float64] | None = None
    reduced_costs: NDArray[np.float64] | None = None
    # Unbounded: a feasible point plus an improving ray.
    ray: NDArray[np.float64] | None = None
    # Infeasible: multipliers y with min-sense signs (>= rows y >= 0,
    # <= rows y <= 0) such that y.b exceeds max of (A^T y).x over the box.
    farkas: NDArray[np.float64] | None = None
    pivots: int = 0
    meta: dict = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


def make_lp(
    c: Sequence[float],
    rows: Sequence[tuple[Sequence[float], str, float]] = (),
    lb: Sequence[float] | float = 0.0,
    ub: Sequence[float] | float = math.inf,
    sense: str = "min",
) -> LinearProgram:
    """Convenience constructor from a list of ``(coefs, relation, rhs)``."""
    c = np.asarray(c, dtype=float)
    n = c.size
    A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), n)
    rel = tuple(r[1] for r in rows)
    b = np.array([r[2] for r in rows], dtype=float)
    lb = np.broadcast_to(np.asarray(lb, dtype=float), (n,)).copy()
    ub = np.broadcast_to(np.asarray(ub, dtype=float), (n,)).copy()
    return LinearProgram(c, A, rel, b, lb, ub, sense)


@dataclass
class _StandardForm:
    """``min cs.z  s.t.  As z = bs`` with ``x = shift + T z[:n_struct]``.

    Columns in ``free`` are unrestricted; all others are nonnegative.  Nothing
    here depends on the right-hand side; :func:`_std_rhs` maps ``b`` to ``bs``.
    """

    As: NDArray
    cs: NDArray
    T: NDArray
    shift: NDArray
    n_struct: int
    row_scale: NDArray
    n_orig_rows: int
    free: list
    A_shift: NDArray
    widths: NDArray


def _standardize(lp: LinearProgram) -> _StandardForm:
    n = lp.n_vars
    cols: list[tuple[int, float]] = []
    free: list[int] = []
    shift = np.zeros(n)
    bound_rows: list[tuple[int, float]] = []
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if np.isfinite(lo):
            if np.isfinite(hi) and hi < lo:
                raise InputError(f"variable {j} has lb > ub")
            shift[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            free.append(len(cols))
            cols.append((j, 1.0))
    ns = len(cols)
    T = np.zeros((n, ns))
    for k, (j, s) in enumerate(cols):
        T[j, k] = s

    m0 = lp.n_rows
    m = m0 + len(bound_rows)
    A_rows = np.zeros((m, ns))
    A_rows[:m0] = lp.A @ T
    slack_sign = np.zeros(m)
    for k, rel in enumerate(lp.relations):
        slack_sign[k] = {LE: 1.0, GE: -1.0, EQ: 0.0}[rel]
    widths = np.zeros(len(bound_rows))
    for r, (col, width) in enumerate(bound_rows):
        A_rows[m0 + r, col] = 1.0
        widths[r] = width
        slack_sign[m0 + r] = 1.0

    scale = np.max(np.abs(A_rows), axis=1) if ns else np.zeros(m)
    scale = np.where(scale > 0, scale, 1.0)
    A_rows = A_rows / scale[:, None]

    slack_rows = [k for k in range(m) if slack_sign[k] != 0.0]
    As = np.zeros((m, ns + len(slack_rows)))
    As[:, :ns] = A_rows
    for s, k in enumerate(slack_rows):
        As[k, ns + s] = slack_sign[k]
    cs = np.zeros(ns + len(slack_rows))
    cvec = lp.c if lp.sense == "min" else -lp.c
    cs[:ns] = T.T @ cvec
    return _StandardForm(As, cs, T, shift, ns, scale, m0, free, lp.A @ shift, widths)


def _std_rhs(sf: _StandardForm, b: NDArray) -> NDArray:
    return np.concatenate([b - sf.A_shift, sf.widths]) / sf.row_scale


class _Tableau:
    """Dense tableau ``[B^-1 A | B^-1 b]`` with the reduced-cost row last.

    Basis entries ``>= n`` are artificial columns; ``art_row`` maps each to the
    row of its unit column.  They never re-enter, so the tableau omits them.
    """

    def __init__(self, A: NDArray, b: NDArray, basis: list[int], art_row: dict[int, int] | None = None):
        m, n = A.shape
        self.m, self.n = m, n
        self.A0 = A
        self.b0 = b
        self.art_row = art_row or {}
        self.c: NDArray | None = None
        self.t = np.zeros((m + 1, n + 1))
        self.t[:m, :n] = A
        self.t[:m, n] = b
        self.basis = list(basis)
        self.pivots = 0

    def restricted(self, rows: list[int], ncols: int) -> "_Tableau":
        """Phase-two tableau on ``rows`` and the first ``ncols`` columns.

        Every artificial and every dropped column must have left the basis.
        """
        sub = _Tableau.__new__(_Tableau)
        sub.m, sub.n = len(rows), ncols
        sub.A0 = self.A0[rows, :ncols]
        sub.b0 = self.b0[rows]
        sub.art_row = {}
        sub.c = None
        sub.t = np.zeros((len(rows) + 1, ncols + 1))
        sub.t[:-1, :ncols] = self.t[rows, :ncols]
        sub.t[:-1, ncols] = self.t[rows, self.n]
        sub.basis = [self.basis[r] for r in rows]
        sub.pivots = self.pivots
        return sub

    def set_objective(self, c: NDArray) -> None:
        m, n = self.m, self.n
        self.c = np.array(c, dtype=float)
        cb = self.c[self.basis] if m else np.zeros(0)
        self.t[m, :n] = self.c[:n] - cb @ self.t[:m, :n]
        self.t[m, n] = -(cb @ self.t[:m, n])

    def basis_matrix(self) -> NDArray:
        B = np.zeros((self.m, self.m))
        for k, j in enumerate(self.basis):
            if j < self.n:
                B[:, k] = self.A0[:, j]
            else:
                B[self.art_row[j], k] = 1.0
        return B

    def refactor(self) -> None:
        """Rebuild ``B^-1 [A | b]`` from the original rows to shed accumulated roundoff."""
        if not self.m:
            return
        m, n = self.m, self.n
        try:
            sol = np.linalg.solve(self.basis_matrix(), np.column_stack([self.A0, self.b0]))
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("basis became singular") from exc
        sol[np.abs(sol) < 1e-13] = 0.0
        for k, j in enumerate(self.basis):
            if j < n:
                sol[:, j] = 0.0
                sol[k, j] = 1.0
        self.t[:m] = sol
        if self.c is not None:
            self.set_objective(self.c)

    def pivot(self, r: int, q: int) -> None:
        t = self.t
        t[r] /= t[r, q]
        col = t[:, q].copy()
        col[r] = 0.0
        t -= col[:, None] * t[r]
        self.basis[r] = q
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise NumericalBreakdown("pivot limit exceeded")

    def run(self, allowed: int) -> int:
        """Iterate to optimality; returns -1 or the entering column of an unbounded ray."""
        # inlined Bland loop; the per-pivot cost is dominated by call overhead
        t, m, n, basis = self.t, self.m, self.n, self.basis
        obj = t[m, :allowed]
        rhs_col = t[:m, n]
        while True:
            neg = obj < -OPT_TOL
            q = int(neg.argmax())
            if not neg[q]:
                return -1
            if m == 0:
                return q
            # the ratio test runs on Python lists: m is small and calls dominate
            col = t[:m, q].tolist()
            thr = max(PIVOT_TOL, REL_PIVOT_TOL * max(max(col), -min(col)))
            rhs = rhs_col.tolist()
            cand = [(rhs[i] / a if rhs[i] > 0.0 else 0.0, i) for i, a in enumerate(col) if a > thr]
            if not cand:
                return q
            best = min(cand)[0]
            lim = best + 1e-12 * max(1.0, best)
            r = min((i for v, i in cand if v <= lim), key=basis.__getitem__)
            piv = t[r, q]
            if abs(piv) < 1e-11:
                raise NumericalBreakdown(f"pivot magnitude {piv:.2e}")
            t[r] /= piv
            pc = t[:, q].copy()
            pc[r] = 0.0
            # t[r, q] is exactly 1 now, so column q becomes an exact unit vector
            t -= pc[:, None] * t[r]
            basis[r] = q
            self.pivots += 1
            if self.pivots > MAX_PIVOTS:
                raise NumericalBreakdown("pivot limit exceeded")
            if self.pivots % REFACTOR_EVERY == 0:
                self.refactor()
                t = self.t
                obj = t[m, :allowed]
                rhs_col = t[:m, n]


def _basis_duals(A: NDArray, basis: list[int], c: NDArray) -> NDArray:
    B = A[:, basis]
    try:
        return np.linalg.solve(B.T, c[basis])
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown("singular basis matrix") from exc


@dataclass
class _Reduced:
    """Standard form with the free columns eliminated by a block Gauss step.

    Reduced row ``k`` equals ``E[k] @ (As z - bs)``; ``elim`` pairs each
    eliminated free column with the original row that now defines it.
    ``unit[k]`` is a column whose only nonzero is a +1 in row ``k`` (or -1).
    """

    A: NDArray
    c: NDArray
    E: NDArray
    cols: NDArray
    rows: list
    elim: list
    lone: list
    unit: list


def _pivot_rows(F: NDArray, free: list[int]) -> tuple[list[tuple[int, int]], list[int]]:
    """Partial-pivoting row choice for the free block ``F``, done on sparse dicts.

    The block is tiny and very sparse, so plain dicts beat per-column numpy calls.
    """
    rows: dict[int, dict[int, float]] = {}
    cols: dict[int, dict[int, float]] = {k: {} for k in range(F.shape[1])}
    ii, kk = np.nonzero(F)
    for i, k, v in zip(ii.tolist(), kk.tolist(), F[ii, kk].tolist()):
        rows.setdefault(i, {})[k] = v
        cols[k][i] = v
    elim: list[tuple[int, int]] = []
    lone: list[int] = []
    for k in range(F.shape[1]):
        col = cols.pop(k)
        big = max(map(abs, col.values()), default=0.0)
        if big <= PIVOT_TOL:
            lone.append(free[k])
            for i in col:
                rows[i].pop(k, None)
            continue
        # threshold Markowitz: sparsest row among the acceptable pivots
        floor = MARKOWITZ * big
        r = min((i for i, v in col.items() if abs(v) >= floor), key=lambda i: len(rows[i]))
        prow = rows.pop(r)
        piv = prow.pop(k)
        for k2 in prow:
            cols[k2].pop(r, None)
        for i, v in col.items():
            if i == r:
                continue
            ri = rows[i]
            ri.pop(k, None)
            f = v / piv
            for k2, w in prow.items():
                nv = ri.get(k2, 0.0) - f * w
                if abs(nv) < 1e-14:
                    ri.pop(k2, None)
                    cols[k2].pop(i, None)
                else:
                    ri[k2] = nv
                    cols[k2][i] = nv
        elim.append((free[k], r))
    return elim, lone


def _eliminate_free(sf: _StandardForm) -> _Reduced:
    m, nz = sf.As.shape
    free = sf.free
    elim, lone = _pivot_rows(sf.As[:, free], free) if free and m else ([], list(free))
    fq = [q for q, _ in elim]
    fr = [r for _, r in elim]
    done = set(fr)
    rows = [k for k in range(m) if k not in done]
    freeset = set(free)
    cols = np.array([j for j in range(nz) if j not in freeset], dtype=int)
    A = sf.As[rows][:, cols]
    c = sf.cs[cols].copy()
    E = np.zeros((len(rows), m))
    E[np.arange(len(rows)), rows] = 1.0
    if elim:
        # z_F = B^-1 (bs_P - As_P z_rest): substitute into the other rows and the cost
        B = sf.As[np.ix_(fr, fq)]
        try:
            S = np.linalg.solve(B, np.column_stack([sf.As[fr][:, cols], np.eye(len(fr))]))
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("singular free-variable block") from exc
        nc = len(cols)
        L = sf.As[np.ix_(rows, fq)]
        A -= L @ S[:, :nc]
        E[:, fr] -= L @ S[:, nc:]
        c -= sf.cs[fq] @ S[:, :nc]
        A[np.abs(A) < 1e-13] = 0.0
    # a column with a single nonzero can start in the basis of its row;
    # scale that row so the entry is +1
    unit = [-1] * len(rows)
    if rows:
        single = np.flatnonzero(np.count_nonzero(A, axis=0) == 1)
        where = np.argmax(A[:, single] != 0, axis=0)
        for j, k in zip(single.tolist(), where.tolist()):
            if unit[k] < 0:
                unit[k] = j
        seeded = [k for k in range(len(rows)) if unit[k] >= 0]
        scale = np.ones(len(rows))
        scale[seeded] = 1.0 / A[seeded, [unit[k] for k in seeded]]
        A *= scale[:, None]
        E *= scale[:, None]
    return _Reduced(A, c, E, cols, rows, elim, lone, unit)


_PRESOLVE_CACHE: "OrderedDict[tuple, tuple[_StandardForm, _Reduced]]" = OrderedDict()
PRESOLVE_CACHE_SIZE = 64


def _presolve(lp: LinearProgram) -> tuple[_StandardForm, _Reduced]:
    """Right-hand-side independent preprocessing, memoised on the LP data.

    Repeated evaluations on one instance only change ``b``, so the
    standardisation and the free-column elimination are shared.
    """
    key = lp.__dict__.get("_presolve_key")
    if key is None:
        key = (lp.A.shape, lp.A.tobytes(), lp.c.tobytes(), lp.lb.tobytes(), lp.ub.tobytes(),
               lp.relations, lp.sense)
        object.__setattr__(lp, "_presolve_key", key)
    hit = _PRESOLVE_CACHE.get(key)
    if hit is not None:
        _PRESOLVE_CACHE.move_to_end(key)
        return hit
    sf = _standardize(lp)
    out = (sf, _eliminate_free(sf))
    _PRESOLVE_CACHE[key] = out
    if len(_PRESOLVE_CACHE) > PRESOLVE_CACHE_SIZE:
        _PRESOLVE_CACHE.popitem(last=False)
    return out


def _recover_free(sf: _StandardForm, red: _Reduced, z: NDArray, rhs: NDArray) -> NDArray:
    """Fill eliminated free entries of ``z`` so that their defining rows hold with ``rhs``."""
    if not red.elim:
        return z
    fq = [q for q, _ in red.elim]
    fr = [r for _, r in red.elim]
    rest = z.copy()
    rest[fq] = 0.0
    B = sf.As[np.ix_(fr, fq)]
    try:
        z[fq] = np.linalg.solve(B, rhs[fr] - sf.As[fr] @ rest)
    except np.linalg.LinAlgError as exc:
        raise NumericalBreakdown("singular free-variable block") from exc
    return z


def solve(lp: LinearProgram) -> LPResult:
    """Solve ``lp``; the result carries certificates for every status."""
    sf, red = _presolve(lp)
    bs = _std_rhs(sf, lp.b)
    m, nr = red.A.shape
    k0 = sf.n_orig_rows

    # Seed the basis with unit columns, scaled to +1.  A row whose unit column
    # then sits at a negative level joins the single auxiliary column x0.
    b = red.E @ bs
    A, E = red.A, red.E
    basis = list(red.unit)
    short = [k for k in range(m) if basis[k] >= 0 and b[k] < 0]
    # Rows without a unit column get a classical artificial (never re-entering).
    art_rows = [k for k in range(m) if basis[k] < 0]
    neg = [k for k in art_rows if b[k] < 0]
    if neg:
        A, E = A.copy(), E.copy()
        A[neg], b[neg], E[neg] = -A[neg], -b[neg], -E[neg]
    n1 = nr + 1 if short else nr
    A1 = A
    if short:
        A1 = np.zeros((m, n1))
        A1[:, :nr] = A
        A1[short, nr] = -1.0
    art_row = {}
    for a, k in enumerate(art_rows):
        basis[k] = n1 + a
        art_row[n1 + a] = k
    tab = _Tableau(A1, b, basis, art_row)
    keep = list(range(m))
    if short or art_rows:
        c1 = np.zeros(n1 + len(art_rows))
        c1[nr:] = 1.0
        if short:
            # x0 enters at the most negative row, making every level nonnegative
            tab.pivot(min(short, key=lambda k: b[k]), nr)
        tab.set_objective(c1)
        tab.run(n1)
        infeas = -tab.t[m, -1]
        if infeas > FEAS_TOL:
            y1 = _basis_duals(tab.basis_matrix(), list(range(m)), c1[tab.basis])
            farkas = (E.T @ y1)[:k0] / sf.row_scale[:k0]
            return LPResult(Status.INFEASIBLE, farkas=farkas, pivots=tab.pivots,
                            meta={"phase1_value": float(infeas)})
        # Drive zero-level x0/artificials out of the basis; drop redundant rows.
        for r in range(m):
            if tab.basis[r] >= nr:
                nz = np.nonzero(np.abs(tab.t[r, :nr]) > PIVOT_TOL)[0]
                if nz.size:
                    tab.pivot(r, int(nz[0]))
                else:
                    keep.remove(r)
        tab = tab.restricted(keep, nr)

    tab.set_objective(red.c)
    q = tab.run(nr)

    nz_all = sf.As.shape[1]
    z = np.zeros(nz_all)
    if keep:
        try:
            z[red.cols[tab.basis]] = np.linalg.solve(A[np.ix_(keep, tab.basis)], b[keep])
        except np.linalg.LinAlgError as exc:
            raise NumericalBreakdown("singular final basis") from exc
    z[red.cols] = np.maximum(z[red.cols], 0.0)
    z = _recover_free(sf, red, z, bs)
    x = sf.shift + sf.T @ z[: sf.n_struct]
    sense_sign = 1.0 if lp.sense == "min" else -1.0

    ray_dir = None
    if q >= 0:
        ray_dir = np.zeros(nz_all)
        ray_dir[red.cols[q]] = 1.0
        for r, bv in enumerate(tab.basis):
            ray_dir[red.cols[bv]] = -tab.t[r, q]
        ray_dir = _recover_free(sf, red, ray_dir, np.zeros(bs.size))
    else:
        # a free column untouched by every remaining row moves the objective alone
        for fq in red.lone:
            d = np.zeros(nz_all)
            d[fq] = 1.0
            d = _recover_free(sf, red, d, np.zeros(bs.size))
            slope = float(sf.cs @ d)
            if abs(slope) > OPT_TOL:
                ray_dir = -d if slope > 0 else d
                break
    if ray_dir is not None:
        ray = sf.T @ ray_dir[: sf.n_struct]
        nrm = np.max(np.abs(ray))
        if nrm > 0:
            ray = ray / nrm
        return LPResult(Status.UNBOUNDED, x=x, ray=ray, pivots=tab.pivots)

    brows = [red.rows[k] for k in keep] + [r for _, r in red.elim]
    bcols = [int(red.cols[v]) for v in tab.basis] + [fq for fq, _ in red.elim]
    y_full = np.zeros(bs.size)
    if brows:
        y_full[brows] = _basis_duals(sf.As[brows], bcols, sf.cs)
    duals = sense_sign * y_full[:k0] / sf.row_scale[:k0]
    rc = lp.c - lp.A.T @ duals
    value = float(lp.c @ x)
    return LPResult(Status.OPTIMAL, value=value, x=x, duals=duals, reduced_costs=rc,
                    pivots=tab.pivots)


# --------------------------------------------------------------------------
# Certificate checks (used by callers and by the test-suite).


def primal_residual(lp: LinearProgram, x: NDArray) -> float:
    """Largest violation of rows and bounds, rows scaled by max |coef|."""
    ax = lp.A @ x
    scale = np.maximum(np.max(np.abs(lp.A), axis=1, initial=0.0), 1.0) if lp.n_rows else np.ones(0)
    viol = [0.0]
    for k, rel in enumerate(lp.relations):
        d = (ax[k] - lp.b[k]) / scale[k]
        if rel == LE:
            viol.append(max(d, 0.0))
        elif rel == GE:
            viol.append(max(-d, 0.0))
        else:
            viol.append(abs(d))
    viol.append(float(np.max(np.maximum(lp.lb - x, 0.0), initial=0.0)))
    viol.append(float(np.max(np.maximum(x - lp.ub, 0.0), initial=0.0)))
    return max(viol)


def dual_value(lp: LinearProgram, y: NDArray) -> float:
    """Lagrangian dual objective for multipliers ``y`` (sensitivity convention)."""
    rc = lp.c - lp.A.T @ y
    val = float(lp.b @ y)
    for j, d in enumerate(rc):
        if d == 0.0:
            continue
        # min: positive reduced cost sits at lb; max: at ub.
        at_lower = (d > 0) == (lp.sense == "min")
        bound = lp.lb[j] if at_lower else lp.ub[j]
        if not np.isfinite(bound):
            if abs(d) <= REPORT_TOL:
                continue
            return -math.inf if lp.sense == "min" else math.inf
        val += d * bound
    return val


def optimality_residuals(lp: LinearProgram, res: LPResult) -> dict[str, float]:
    """Primal, dual-sign and complementary-slackness residuals plus the gap."""
    x, y = res.x, res.duals
    s = 1.0 if lp.sense == "min" else -1.0
    ax = lp.A @ x
    dual_sign = 0.0
    comp = 0.0
    for k, rel in enumerate(lp.relations):
        if rel == GE:
            dual_sign = max(dual_sign, -s * y[k])
        elif rel == LE:
            dual_sign = max(dual_sign, s * y[k])
        if rel != EQ:
            comp = max(comp, abs(y[k] * (ax[k] - lp.b[k])))
    rc = lp.c - lp.A.T @ y
    for j, d in enumerate(rc):
        sd = s * d
        if sd > 0:
            if not np.isfinite(lp.lb[j]):
                dual_sign = max(dual_sign, sd)
            else:
                comp = max(comp, abs(sd * (x[j] - lp.lb[j])))
        elif sd < 0:
            if not np.isfinite(lp.ub[j]):
                dual_sign = max(dual_sign, -sd)
            else:
                comp = max(comp, abs(sd * (lp.ub[j] - x[j])))
    dv = dual_value(lp, y)
    return {
        "primal": primal_residual(lp, x),
        "dual": dual_sign,
        "complementarity": comp,
        "gap": abs(res.value - dv) / (1.0 + abs(res.value)),
    }


def verify_ray(lp: LinearProgram, res: LPResult, tol: float = REPORT_TOL) -> bool:
    """Check that ``res.ray`` is a recession direction that improves the objective."""
    r = res.ray
    if r is None or res.x is None:
        return False
    if primal_residual(lp, res.x) > tol:
        return False
    ar = lp.A @ r
    for k, rel in enumerate(lp.relations):
        if rel == LE and ar[k] > tol:
            return False
        if rel == GE and ar[k] < -tol:
            return False
        if rel == EQ and abs(ar[k]) > tol:
            return False
    if np.any((np.isfinite(lp.lb)) & (r < -tol)) or np.any((np.isfinite(lp.ub)) & (r > tol)):
        return False
    improve = lp.c @ r
    return bool(improve < -tol) if lp.sense == "min" else bool(improve > tol)


def verify_farkas(lp: LinearProgram, res: LPResult, tol: float = REPORT_TOL) -> bool:
    """Check the infeasibility certificate in ``res.farkas``."""
    y = res.farkas
    if y is None:
        return False
    for k, rel in enumerate(lp.relations):
        if rel == GE and y[k] < -tol:
            return False
        if rel == LE and y[k] > tol:
            return False
    w = lp.A.T @ y
    sup = 0.0
    for j, wj in enumerate(w):
        if wj == 0.0:
            continue
        bound = lp.ub[j] if wj > 0 else lp.lb[j]
        if not np.isfinite(bound):
            if abs(wj) <= tol:
                continue
            return False
        sup += wj * bound
    return bool(float(lp.b @ y) - sup > tol)
