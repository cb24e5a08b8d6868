"""JSON readers for instances and payoffs, and a byte-stable report writer."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from sysrisk.acceptance import AcceptanceSpec, ExpectationFamily, Pointwise
from sysrisk.aggregation import (
    AffineMax,
    AggregationSpec,
    NegativePart,
    Network,
    PiecewiseLinear,
    SumUtility,
)
from sysrisk.core_model import (
    RandomVector,
    ScenarioSpace,
    build_scenario_space,
    validate_probability_vector,
)
from sysrisk.engine import Instance
from sysrisk.errors import DimensionMismatch, InputError
from sysrisk.market import MarketSet, PricePaths, market_from_tree


def _req(d: dict, key: str, where: str) -> Any:
    if not isinstance(d, dict) or key not in d:
        raise InputError(f"{where}: missing field {key!r}")
    return d[key]


def space_from_json(d: dict) -> ScenarioSpace:
    scen = _req(d, "scenarios", "space")
    if not isinstance(scen, list):
        raise InputError("space.scenarios must be a list")
    return build_scenario_space([_req(s, "id", "scenario") for s in scen],
                                [float(s.get("z", 1.0)) for s in scen])


def random_vector_from_json(d: dict, space: ScenarioSpace, n_agents: int | None = None) -> RandomVector:
    values = _req(d, "values", "random vector")
    X = RandomVector(space, values)
    declared = d.get("agents")
    if declared is not None and int(declared) != X.n_agents:
        raise DimensionMismatch(f"declared {declared} agents but {X.n_agents} rows given")
    if n_agents is not None and X.n_agents != n_agents:
        raise DimensionMismatch(f"payoff has {X.n_agents} agents, instance has {n_agents}")
    return X


def _pl(d: dict | None) -> PiecewiseLinear | None:
    if d is None:
        return None
    return PiecewiseLinear.from_pieces(
        [(float(_req(p, "slope", "piece")), float(_req(p, "intercept", "piece"))) for p in _req(d, "pieces", "utility")]
    )


def aggregation_from_json(d: dict, n_agents: int) -> AggregationSpec:
    kind = _req(d, "kind", "aggregation")
    if kind == "sum_utility":
        alphas = d.get("alphas", [0.0] * n_agents)
        us = d.get("us", [None] * n_agents)
        return SumUtility(float(d.get("alpha", 0.0)), tuple(alphas), _pl(d.get("u")),
                          tuple(_pl(u) for u in us))
    if kind == "negative_part":
        return NegativePart(tuple(d.get("alphas", [1.0] * n_agents)))
    if kind == "network":
        return Network(np.array(_req(d, "Pi", "network"), dtype=float), float(_req(d, "gamma_net", "network")))
    if kind == "affine_max":
        pieces = _req(d, "pieces", "affine_max")
        return AffineMax(np.array([p["slope"] for p in pieces], dtype=float),
                         np.array([p["intercept"] for p in pieces], dtype=float))
    if kind == "sum":
        return AffineMax(np.ones((1, n_agents)), np.zeros(1))
    raise InputError(f"unknown aggregation kind {kind!r}")


def acceptance_from_json(d: dict, space: ScenarioSpace, n_agents: int) -> AcceptanceSpec:
    kind = _req(d, "kind", "acceptance")
    if kind == "pointwise":
        return Pointwise(float(d.get("c", 0.0)))
    if kind == "expectation_family":
        tests = []
        for t in _req(d, "tests", "expectation_family"):
            P = validate_probability_vector((space, _req(t, "P", "test")))
            if P.n_agents != n_agents:
                raise DimensionMismatch("acceptance test has the wrong number of agents")
            tests.append((P, float(_req(t, "alpha", "test"))))
        return ExpectationFamily(tuple(tests))
    raise InputError(f"unknown acceptance kind {kind!r}")


def _cells(cells: list, space: ScenarioSpace) -> list[list[int]]:
    out = []
    for cell in cells:
        out.append([space.index(str(w)) if isinstance(w, str) else int(w) for w in cell])
    return out


def market_from_json(d: dict | None, space: ScenarioSpace, n_agents: int) -> MarketSet:
    if d is None:
        return MarketSet.zero(space, n_agents)
    kind = _req(d, "kind", "market")
    mode = d.get("mode", "span")
    if kind == "basis":
        vecs = [random_vector_from_json(v, space, n_agents) for v in d.get("vectors", [])]
        return MarketSet(space, n_agents, tuple(vecs), mode)
    if kind == "tree":
        paths = PricePaths(np.array(_req(d, "paths", "tree"), dtype=float))
        if "T" in d and int(d["T"]) != paths.T:
            raise DimensionMismatch(f"declared T={d['T']} but paths have T={paths.T}")
        if "assets" in d and int(d["assets"]) != paths.J:
            raise DimensionMismatch(f"declared {d['assets']} assets but paths have {paths.J}")
        filt = [_cells(part, space) for part in _req(d, "filtration", "tree")]
        assign = {int(k): v for k, v in _req(d, "agent_assignment", "tree").items()}
        return market_from_tree(space, paths, assign, filt, n_agents, mode)
    raise InputError(f"unknown market kind {kind!r}")


def instance_from_json(d: dict, name: str = "") -> Instance:
    space = space_from_json(_req(d, "space", "instance"))
    N = int(_req(d, "N", "instance"))
    lam = aggregation_from_json(_req(d, "lambda", "instance"), N)
    gam = aggregation_from_json(d["gamma_agg"], N) if d.get("gamma_agg") else None
    acc = acceptance_from_json(_req(d, "acceptance", "instance"), space, N)
    mkt = market_from_json(d.get("market"), space, N)
    return Instance(space, N, lam, acc, mkt, gam, name=name or d.get("name", ""))


def load_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: invalid JSON ({exc})") from exc


def load_instance(path: str | Path) -> Instance:
    return instance_from_json(load_json(path), name=Path(path).stem)


def load_payoff(path: str | Path, inst: Instance) -> RandomVector:
    return random_vector_from_json(load_json(path), inst.space, inst.n_agents)


# --------------------------------------------------------------------------
# Output


def _fmt_float(v: float) -> str:
    if math.isnan(v):
        return '"nan"'
    if math.isinf(v):
        return '"+inf"' if v > 0 else '"-inf"'
    if v == 0.0:
        return "0.0"
    s = format(v, ".17g")
    return s if any(ch in s for ch in ".e") else s + ".0"


def _dump(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        return _dump(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(x, (int, float, np.floating, np.integer)) and not isinstance(x, bool) for x in obj):
            return "[" + ", ".join(_dump(x, indent, level + 1) for x in obj) + "]"
        items = [pad + _dump(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_report(obj: Any, indent: int = 2) -> str:
    """Sorted keys, floats with 17 significant digits, infinities as strings."""
    return _dump(obj, indent, 0) + "\n"
