"""Invariant checks run on a single instance by ``sysrisk verify``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from sysrisk.core_model import RandomVector
from sysrisk.engine import (
    RHO,
    RHO_GAMMA,
    Instance,
    check_assumption_A,
    compute_dual,
    compute_risk,
    detect_regulatory_arbitrage,
    find_fair_measure,
    is_fair,
)
from sysrisk.errors import DualExtractionFailed


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str


def verify_instance(inst: Instance, X: RandomVector | None = None, variant: str = RHO,
                    seed: int = 0, tol: float = 1e-6, n_random: int = 5) -> list[PropertyCheck]:
    rng = np.random.default_rng(seed)
    X = X if X is not None else inst.zero()
    out: list[PropertyCheck] = []
    base = compute_risk(inst, None, variant)
    gstar = base.value

    if not base.finite:
        verdict = detect_regulatory_arbitrage(inst, 0.0, variant)
        out.append(PropertyCheck("arbitrage_certificate",
                                 (not verdict.arbitrage_free) and bool(verdict.certificate_verified),
                                 f"gamma* = {gstar}"))
        try:
            compute_dual(inst, None, variant)
            out.append(PropertyCheck("dual_refused", False, "dual extracted despite gamma* = -inf"))
        except DualExtractionFailed:
            out.append(PropertyCheck("dual_refused", True, "no dual optimizer, as expected"))
        fair = find_fair_measure(inst, 0.0, variant, seed=seed, n_samples=0)
        out.append(PropertyCheck("no_fair_measure", fair.Q is None, ""))
        return out

    samples = [X] + [RandomVector(inst.space, rng.normal(0, 2, X.values.shape)) for _ in range(n_random)]
    worst_gap = 0.0
    worst_dec = 0.0
    # the Gamma variant's dual carries no fairness statement about G
    check_fair = inst.market.is_span and variant != RHO_GAMMA
    fair_ok = True
    for Y in samples:
        r = compute_risk(inst, Y, variant)
        d = compute_dual(inst, Y, variant)
        worst_gap = max(worst_gap, d.gap / (1 + abs(r.value)))
        worst_dec = max(worst_dec, abs(d.penalty - d.conjugate_at_optimum))
        if check_fair:
            fair_ok &= is_fair(d.Q, inst.market, tol)
    out.append(PropertyCheck("duality_gap", worst_gap <= tol, f"max relative gap {worst_gap:.3e}"))
    out.append(PropertyCheck("penalty_decomposition", worst_dec <= tol, f"max mismatch {worst_dec:.3e}"))
    if check_fair:
        out.append(PropertyCheck("dual_fairness", fair_ok, ""))

    cash_err = 0.0
    mono_err = 0.0
    conv_err = 0.0
    for Y in samples:
        ry = compute_risk(inst, Y, variant).value
        c = rng.normal(0, 1, inst.n_agents)
        rc = compute_risk(inst, Y.shift(c), variant).value
        cash_err = max(cash_err, abs(rc - (ry - c.sum())) / (1 + abs(ry)))
        D = RandomVector(inst.space, rng.exponential(1.0, Y.values.shape))
        rd = compute_risk(inst, Y + D, variant).value
        mono_err = max(mono_err, rd - ry)
        Z = RandomVector(inst.space, rng.normal(0, 2, Y.values.shape))
        rz = compute_risk(inst, Z, variant).value
        lam = float(rng.random())
        rmix = compute_risk(inst, Y * lam + Z * (1 - lam), variant).value
        conv_err = max(conv_err, rmix - (lam * ry + (1 - lam) * rz))
    out.append(PropertyCheck("cash_additivity", cash_err <= 1e-8, f"max error {cash_err:.3e}"))
    out.append(PropertyCheck("monotonicity", mono_err <= 1e-8, f"max violation {mono_err:.3e}"))
    out.append(PropertyCheck("convexity", conv_err <= 1e-8, f"max violation {conv_err:.3e}"))

    fair = find_fair_measure(inst, gstar, variant, seed=seed)
    out.append(PropertyCheck("fair_measure", fair.Q is not None and fair.validated,
                             f"min slack {fair.min_slack}"))
    verdict = detect_regulatory_arbitrage(inst, gstar, variant)
    out.append(PropertyCheck("no_arbitrage_at_gamma_star", verdict.arbitrage_free, ""))
    rep = check_assumption_A(inst, gstar, 10, variant)
    out.append(PropertyCheck("assumption_A", rep.holds, f"n0 = {rep.n0}"))
    return out
