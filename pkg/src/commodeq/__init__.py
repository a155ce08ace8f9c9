from importlib.metadata import PackageNotFoundError, version

from .equilibrium import (
    Equilibrium,
    ModelKind,
    NoForwardEquilibrium,
    SolveDiagnostics,
    brownian_closed_form,
    clearing_map,
    convenience_yield,
    expected_price_change,
    forward_premium,
    forward_price_zero_storage,
    solve,
    solve_no_forward,
)
from .errors import (
    AlphaOutOfRange,
    CommodeqError,
    ConfigError,
    Degenerate,
    DegenerateCorrelation,
    DegenerateStorageCost,
    InvalidModel,
    InvalidParams,
    McOverflow,
    NoBracket,
    NoConvergence,
    NoRoot,
    NotBrownian,
    NotConcave,
    ZeroForward,
    ZeroSpot,
    ZeroVariance,
)
from .investor import InvestorResponse, investor_utility, marginal_utility
from .levy_models import (
    LevyModel,
    UniTriplet,
    cumulant,
    esscher_root,
    esscher_tilt,
    exp_transform,
    project,
)
from .market_core import LegacyHedge, MarketParams, PriceMoments
from .oracle import GridConfig, McConfig, McEstimate, oracle_equilibrium
from .producer import ProducerResponse, producer_utility
from .scenario import Scenario, load_scenario, parse_scenario

try:
    # Change here if project is renamed and does not equal the package name
    dist_name = __name__
    __version__ = version(dist_name)
except PackageNotFoundError:  # pragma: no cover
    __version__ = "unknown"
finally:
    del version, PackageNotFoundError

__all__ = [
    # Factor models
    "LevyModel",
    "UniTriplet",
    "cumulant",
    "esscher_tilt",
    "project",
    "exp_transform",
    "esscher_root",
    # Market
    "MarketParams",
    "LegacyHedge",
    "PriceMoments",
    # Agents
    "ProducerResponse",
    "producer_utility",
    "InvestorResponse",
    "investor_utility",
    "marginal_utility",
    # Equilibrium
    "ModelKind",
    "Equilibrium",
    "NoForwardEquilibrium",
    "SolveDiagnostics",
    "solve",
    "solve_no_forward",
    "clearing_map",
    "brownian_closed_form",
    "forward_price_zero_storage",
    "convenience_yield",
    "forward_premium",
    "expected_price_change",
    # Oracles
    "McConfig",
    "McEstimate",
    "GridConfig",
    "oracle_equilibrium",
    # Scenarios
    "Scenario",
    "load_scenario",
    "parse_scenario",
    # Errors
    "CommodeqError",
    "InvalidModel",
    "InvalidParams",
    "AlphaOutOfRange",
    "NoBracket",
    "NoRoot",
    "Degenerate",
    "NotConcave",
    "NoConvergence",
    "NotBrownian",
    "DegenerateCorrelation",
    "ZeroVariance",
    "ZeroSpot",
    "ZeroForward",
    "DegenerateStorageCost",
    "McOverflow",
    "ConfigError",
]
