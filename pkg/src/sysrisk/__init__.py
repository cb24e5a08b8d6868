"""Market-adjusted systemic risk measures on finite scenario spaces."""

from sysrisk.acceptance import ExpectationFamily, Pointwise, acceptance_constraints, is_acceptable
from sysrisk.aggregation import (
    AffineMax,
    NegativePart,
    Network,
    PiecewiseLinear,
    SumUtility,
    hypograph_constraints,
    sum_aggregation,
)
from sysrisk.core_model import (
    MeasureVector,
    ProbabilityVector,
    RandomVector,
    ScenarioSpace,
    build_scenario_space,
    pairing,
    validate_probability_vector,
)
from sysrisk.engine import (
    RHO,
    RHO_GAMMA,
    Finiteness,
    Instance,
    check_assumption_A,
    compute_dual,
    compute_gamma,
    compute_rho,
    compute_rho_gamma,
    detect_regulatory_arbitrage,
    find_fair_measure,
    is_fair,
    penalty_decomposition,
    support_function,
)
from sysrisk.errors import InputError, NumericalError, SysRiskError
from sysrisk.io import load_instance, load_payoff
from sysrisk.lp import LinearProgram, Status, make_lp, solve
from sysrisk.market import MarketSet, PricePaths, build_gain_basis, contains_market_arbitrage

__version__ = "0.1.0"

__all__ = [
    "acceptance_constraints",
    "AffineMax",
    "build_gain_basis",
    "build_scenario_space",
    "check_assumption_A",
    "compute_dual",
    "compute_gamma",
    "compute_rho",
    "compute_rho_gamma",
    "contains_market_arbitrage",
    "detect_regulatory_arbitrage",
    "ExpectationFamily",
    "find_fair_measure",
    "Finiteness",
    "hypograph_constraints",
    "InputError",
    "Instance",
    "is_acceptable",
    "is_fair",
    "LinearProgram",
    "load_instance",
    "load_payoff",
    "make_lp",
    "MarketSet",
    "MeasureVector",
    "NegativePart",
    "Network",
    "NumericalError",
    "pairing",
    "penalty_decomposition",
    "PiecewiseLinear",
    "Pointwise",
    "PricePaths",
    "ProbabilityVector",
    "RandomVector",
    "RHO",
    "RHO_GAMMA",
    "ScenarioSpace",
    "solve",
    "Status",
    "sum_aggregation",
    "SumUtility",
    "support_function",
    "SysRiskError",
    "validate_probability_vector",
]
