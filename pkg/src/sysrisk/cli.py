"""Command-line front end.

Exit codes: 0 success, 1 failed property or arbitrage found, 2 bad input,
3 numerical failure.  The default tolerance can be overridden with the
``SYSRISK_TOL`` environment variable (read once at startup).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from sysrisk import engine
from sysrisk.errors import InputError, NumericalError
from sysrisk.io import dumps_report, load_instance, load_payoff
from sysrisk.verify import verify_instance

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
COMMANDS = ("rho", "rho-gamma", "dual", "gamma", "arbitrage", "fair", "check-a", "verify")


def _env_tol() -> float:
    raw = os.environ.get("SYSRISK_TOL")
    if raw is None:
        return 1e-6
    try:
        v = float(raw)
    except ValueError:
        v = math.nan
    if not v > 0:
        print(f"input error: SYSRISK_TOL={raw!r} must be a positive number", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    return v


DEFAULT_TOL = _env_tol()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sysrisk", description="Market-adjusted systemic risk measures.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--x", help="payoff JSON file (default: zero profile)")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--variant", choices=(engine.RHO, engine.RHO_GAMMA), default=None,
                   help="risk measure for dual/gamma/arbitrage/fair/check-a/verify")
    p.add_argument("--gamma", type=float, default=None, help="threshold (default: computed rho(0))")
    p.add_argument("--n-max", type=int, default=10)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--seed", type=int, default=0)
    return p


def _vec(a) -> list[float] | None:
    return None if a is None else [float(v) for v in np.asarray(a).reshape(-1)]


def _assumption_summary(inst, gstar: float, variant: str) -> dict[str, Any]:
    if not math.isfinite(gstar):
        return {"checked": False, "reason": "rho(0) is not finite"}
    rep = engine.check_assumption_A(inst, gstar, 10, variant)
    return {"checked": True, "holds": rep.holds, "n0": rep.n0}


def _run(args: argparse.Namespace) -> tuple[int, dict[str, Any]]:
    if args.tol <= 0:
        raise InputError("--tol must be positive")
    inst = load_instance(args.instance)
    X = load_payoff(args.x, inst) if args.x else inst.zero()
    variant = args.variant or (engine.RHO_GAMMA if args.command == "rho-gamma" else engine.RHO)
    gstar = engine.compute_gamma(inst, variant)
    report: dict[str, Any] = {
        "command": args.command,
        "instance": inst.name,
        "variant": variant,
        "gamma": gstar,
        "assumption_A": _assumption_summary(inst, gstar, variant),
    }
    code = EXIT_OK
    cmd = args.command
    if cmd in ("rho", "rho-gamma"):
        r = engine.compute_risk(inst, X, variant)
        report.update(status=r.status.value, value=r.value, m=_vec(r.m), h=_vec(r.h))
        if r.finite:
            report["g"] = inst.market.combine(r.h).values.tolist()
    elif cmd == "dual":
        d = engine.compute_dual(inst, X, variant)
        report.update(Q=d.Q.weights.tolist(), penalty=d.penalty, dual_value=d.dual_value,
                      primal_value=d.primal_value,
                      decomposition={"aggregate_acceptance": d.decomposition[0], "market": d.decomposition[1]})
    elif cmd == "gamma":
        report["value"] = gstar
    elif cmd == "arbitrage":
        v = engine.detect_regulatory_arbitrage(inst, args.gamma, variant)
        report.update(threshold=v.gamma, arbitrage_free=v.arbitrage_free)
        if not v.arbitrage_free:
            report["certificate"] = {"m": _vec(v.m), "h": _vec(v.h), "sum_m": float(np.sum(v.m)),
                                     "g": inst.market.combine(v.h).values.tolist(),
                                     "verified": v.certificate_verified}
            code = EXIT_FAIL
    elif cmd == "fair":
        f = engine.find_fair_measure(inst, args.gamma, variant, seed=args.seed)
        report.update(threshold=f.gamma, found=f.Q is not None, seed=f.seed,
                      samples=f.n_samples, validated=f.validated, min_slack=f.min_slack)
        if f.Q is not None:
            report["Q"] = f.Q.weights.tolist()
            if not f.validated:
                code = EXIT_FAIL
    elif cmd == "check-a":
        if args.n_max < 1:
            raise InputError("--n-max must be at least 1")
        rep = engine.check_assumption_A(inst, args.gamma, args.n_max, variant)
        report.update(threshold=rep.gamma, n0=rep.n0, all_success=rep.all_success, holds=rep.holds,
                      gamma_nonpositive=rep.gamma_nonpositive,
                      proposition_sufficient=rep.proposition_sufficient,
                      steps=[{"n": s.n, "z": s.z, "success": s.success,
                              "witness": list(s.witness) if s.witness is not None else None,
                              "rho_bound_value": s.rho_bound_value,
                              "rho_bound_limit": s.rho_bound_limit,
                              "bound_holds": s.bound_holds} for s in rep.steps])
        if not rep.holds:
            code = EXIT_FAIL
    elif cmd == "verify":
        checks = verify_instance(inst, X, variant, seed=args.seed, tol=args.tol)
        report["checks"] = [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks]
        report["passed"] = all(c.passed for c in checks)
        if not report["passed"]:
            code = EXIT_FAIL
    return code, report


def _text(report: dict[str, Any]) -> str:
    lines = []
    for key in sorted(report):
        val = report[key]
        if key == "checks":
            for c in val:
                lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['name']} {c['detail']}".rstrip())
            continue
        if key == "steps":
            for s in val:
                lines.append(f"  n={s['n']}: success={s['success']} bound {s['rho_bound_value']:.6g} <= "
                             f"{s['rho_bound_limit']:.6g}: {s['bound_holds']}")
            continue
        lines.append(f"{key}: {val}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code, report = _run(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(dumps_report(report) if args.format == "json" else _text(report))
    return code


if __name__ == "__main__":
    raise SystemExit(main())
