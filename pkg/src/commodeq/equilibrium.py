"""
Forward Market Equilibrium

An equilibrium is a forward price ``F`` at which the producer's optimal
forward position and the investor's optimal position offset each other,

    Phi(F) = hp(F) + hs(F, alpha(F)) = 0,

where ``alpha(F)`` is the producer's optimal storage at ``F`` and enters the
investor's problem through the expected terminal spot price. ``Phi`` is
decreasing in ``F``: a higher forward price makes the producer sell more and
the investor buy less. :func:`solve` walks from the expected terminal price
towards the sign change of ``Phi``, treating forward prices at which an agent
has no well-posed optimum as outside the bracket, refines it with ``brentq``, polishes it with one Newton step
when storage is not switching between clamped and interior at the root, and
checks local uniqueness by the sign change of ``Phi`` across the root.

The remaining functions derive the quantities reported for an equilibrium:
the initial spot price, the forward premium, the convenience yield and the
expected change of the spot price, together with the zero-storage forward
price, the joint closed form for Brownian factors and the benchmark market
without forward contracts.
"""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import investor, producer
from .errors import (
    DegenerateCorrelation,
    DegenerateStorageCost,
    NoBracket,
    NoConvergence,
    NotBrownian,
    NotConcave,
    ZeroForward,
    ZeroSpot,
    ZeroVariance,
)
from .levy_models import LevyModel
from .market_core import MarketParams, spot_price_initial, terminal_moments
from .rootfind import bracketed_root, central_difference, newton_polish, walk_bracket

__all__ = [
    "ModelKind",
    "SolveDiagnostics",
    "Equilibrium",
    "NoForwardEquilibrium",
    "clearing_map",
    "solve",
    "forward_price_zero_storage",
    "brownian_closed_form",
    "convenience_yield",
    "forward_premium",
    "expected_price_change",
    "solve_no_forward",
]

_logger = logging.getLogger(__name__)

MAX_STEPS = 120
ROOT_XTOL = 1e-12
CLEARING_RTOL = 1e-9
UNIQUENESS_STEP = 1e-4
POLISH_STEP = 1e-7


class ModelKind(str, Enum):
    """Factor dynamics handled by :func:`solve`."""

    BROWNIAN = "brownian"
    JUMP_DIFFUSION = "jump_diffusion"


@dataclass(frozen=True)
class SolveDiagnostics:
    """How an equilibrium was found."""

    kind: ModelKind
    bracket: Tuple[float, float]
    evaluations: int
    polished: bool
    clamped: bool
    unique: bool


@dataclass(frozen=True)
class Equilibrium:
    """Equilibrium storage, forward position and prices.

    ``h`` is the producer's position; the investor holds ``-h`` up to the
    clearing residual. The premium, yield and expected change are NaN when
    the price they divide by is zero.
    """

    alpha: float
    h: float
    forward_price: float
    spot_price: float
    expected_spot: float
    forward_premium: float
    convenience_yield: float
    expected_price_change: float
    clearing_residual: float
    producer_utility: float
    investor_utility: float
    hedge_fraction: float
    diagnostics: Optional[SolveDiagnostics] = field(default=None, compare=False)

    def as_dict(self) -> Dict[str, float]:
        """Numeric fields by name, diagnostics left out."""
        values = asdict(self)
        values.pop("diagnostics")
        return values


@dataclass(frozen=True)
class NoForwardEquilibrium:
    """Storage and prices in the market without forward contracts."""

    alpha: float
    spot_price: float
    expected_spot: float
    expected_price_change: float
    producer_utility: float


Responses = Tuple[producer.ProducerResponse, investor.InvestorResponse]


def _resolve_kind(model: LevyModel, kind: Optional[ModelKind]) -> ModelKind:
    if kind is None:
        return ModelKind.JUMP_DIFFUSION if model.has_active_jumps else ModelKind.BROWNIAN
    kind = ModelKind(kind)
    if kind is ModelKind.BROWNIAN and model.has_active_jumps:
        raise NotBrownian("Brownian equilibrium requested for a model with jump atoms")
    return kind


def _responder(
    params: MarketParams, model: LevyModel, kind: ModelKind
) -> Callable[[float], Responses]:
    if kind is ModelKind.BROWNIAN:
        best_p, best_s = producer.best_response_bm, investor.best_response_bm
    else:
        best_p, best_s = producer.best_response_jd, investor.best_response_jd

    def respond(forward: float) -> Responses:
        prod = best_p(params, model, forward)
        return prod, best_s(params, model, prod.alpha, forward)

    return respond


def clearing_map(
    params: MarketParams, model: LevyModel, kind: Optional[ModelKind] = None
) -> Callable[[float], float]:
    """The excess forward demand ``Phi(F) = hp(F) + hs(F, alpha(F))``."""
    respond = _responder(params, model, _resolve_kind(model, kind))

    def phi(forward: float) -> float:
        prod, inv = respond(forward)
        return prod.hp + inv.hs

    return phi


def solve(
    params: MarketParams, model: LevyModel, kind: Optional[ModelKind] = None
) -> Equilibrium:
    """Clear the forward market.

    :param params: market parameters
    :param model: factor dynamics
    :param kind: solver family; inferred from the model when omitted
    :raises NoBracket: ``Phi`` keeps its sign along the whole walk
    :raises NotConcave: an agent has no concave problem at ``E[P_T]``
    :raises NoConvergence: the clearing residual exceeds ``1e-9 (1 + |F|)``
    :return: the equilibrium with derived quantities and diagnostics
    """
    kind = _resolve_kind(model, kind)
    respond = _responder(params, model, kind)
    evaluations = 0

    def phi(forward: float) -> float:
        nonlocal evaluations
        evaluations += 1
        prod, inv = respond(forward)
        return prod.hp + inv.hs

    start = terminal_moments(params, model, 0.0)
    bracket = walk_bracket(
        phi,
        start.mean,
        start.std or 1.0,
        max_steps=MAX_STEPS,
        tolerate=(NotConcave, NoBracket, NoConvergence),
    )
    xtol = ROOT_XTOL * (1.0 + abs(start.mean))
    forward = bracketed_root(phi, bracket, xtol=xtol)

    delta = POLISH_STEP * (1.0 + abs(forward))
    smooth = respond(forward - delta)[0].clamped == respond(forward + delta)[0].clamped
    polished = False
    if smooth:

        def slope(f: float) -> float:
            return central_difference(phi, f, delta)

        refined = newton_polish(phi, forward, slope, (bracket[0], bracket[1]))
        polished, forward = refined != forward, refined
    else:
        _logger.debug("storage switches regime at F=%r, Newton polish skipped", forward)

    prod, inv = respond(forward)
    residual = prod.hp + inv.hs
    if abs(residual) > CLEARING_RTOL * (1.0 + abs(forward)):
        raise NoConvergence(f"forward market does not clear at F={forward!r}", residual)

    step = UNIQUENESS_STEP * (1.0 + abs(forward))
    unique = phi(forward - step) * phi(forward + step) < 0.0
    if not unique:
        _logger.warning("clearing map shows no sign change around F=%r", forward)

    diagnostics = SolveDiagnostics(
        kind=kind,
        bracket=(bracket[0], bracket[1]),
        evaluations=evaluations,
        polished=polished,
        clamped=prod.clamped,
        unique=unique,
    )
    return _assemble(params, model, prod, inv, forward, residual, diagnostics)


def _assemble(
    params: MarketParams,
    model: LevyModel,
    prod: producer.ProducerResponse,
    inv: investor.InvestorResponse,
    forward: float,
    residual: float,
    diagnostics: Optional[SolveDiagnostics],
) -> Equilibrium:
    spot = spot_price_initial(params, prod.alpha)
    expected = terminal_moments(params, model, prod.alpha).mean
    sales = params.pi_t + prod.alpha * (1.0 - params.eps)
    return Equilibrium(
        alpha=prod.alpha,
        h=prod.hp,
        forward_price=forward,
        spot_price=spot,
        expected_spot=expected,
        forward_premium=_ratio(forward_premium, expected, forward),
        convenience_yield=_ratio(convenience_yield, spot, forward, params.rate, params.eps),
        expected_price_change=_ratio(expected_price_change, spot, expected),
        clearing_residual=residual,
        producer_utility=prod.utility,
        investor_utility=inv.utility,
        hedge_fraction=-prod.hp / sales if sales else float("nan"),
        diagnostics=diagnostics,
    )


def _ratio(fn: Callable[..., float], *args: float) -> float:
    """Evaluate a reported ratio, NaN when its denominator price is zero."""
    try:
        return fn(*args)
    except (ZeroForward, ZeroSpot) as exc:
        _logger.warning("%s reported as NaN: %s", fn.__name__, exc)
        return float("nan")


def _brownian_inputs(params: MarketParams, model: LevyModel) -> Tuple[investor.BrownianLeg, float, float]:
    leg = investor.brownian_leg(model)
    effective = params.gamma_s * (1.0 - leg.rho * leg.rho)
    if effective <= 0.0:
        raise DegenerateCorrelation(f"|rho| = 1 (rho={leg.rho!r}) leaves no effective risk aversion")
    variance = terminal_moments(params, model, 0.0).variance
    if variance <= 0.0:
        raise ZeroVariance("terminal spot price has zero variance")
    return leg, effective, variance


def forward_price_zero_storage(params: MarketParams, model: LevyModel) -> float:
    """Equilibrium forward price when the producer stores nothing.

    ``F = E - G V (lambda rho sqrt(T) / (g sqrt(V)) + pi_t + h')`` with the
    effective investor risk aversion ``g = gamma_s (1 - rho^2)`` and
    ``G = gamma_p g / (gamma_p + g)``.

    :raises NotBrownian: the model has jump atoms
    """
    leg, effective, variance = _brownian_inputs(params, model)
    joint = params.gamma_p * effective / (params.gamma_p + effective)
    stock = leg.lambda_mpr * leg.rho * np.sqrt(model.horizon) / (effective * np.sqrt(variance))
    expected = terminal_moments(params, model, 0.0).mean
    return float(expected - joint * variance * (stock + params.pi_t + params.legacy_position))


def brownian_closed_form(params: MarketParams, model: LevyModel) -> Tuple[float, float, float]:
    """Joint explicit solution ``(alpha, h, F)`` for Brownian factors.

    Clearing at fixed storage makes ``F`` affine in ``alpha``; substituting
    into the producer's storage condition gives ``alpha``, which is then
    clamped to ``[0, pi0]``.
    """
    leg, effective, variance = _brownian_inputs(params, model)
    keep = 1.0 - params.eps
    joint = params.gamma_p * effective / (params.gamma_p + effective)
    stock = leg.lambda_mpr * leg.rho * np.sqrt(model.horizon) / (effective * np.sqrt(variance))
    exposure = params.pi_t + params.legacy_position
    d = producer.d_constants(params, variance, 0.0, producer.mean_shift(params, model))
    ratio = joint / effective
    free = (-d.d2 - d.d3 * stock + d.d3 * ratio * (exposure + stock)) / (
        2.0 * d.d1 - d.d3 * ratio * keep
    )
    alpha = min(max(free, 0.0), params.pi0)
    moments = terminal_moments(params, model, alpha)
    forward = moments.mean - joint * variance * (keep * alpha + exposure + stock)
    hp = (moments.mean - forward) / (params.gamma_p * variance) - (keep * alpha + exposure)
    return float(alpha), float(hp), float(forward)


def convenience_yield(spot: float, forward: float, rate: float, eps: float) -> float:
    """Convenience yield ``y`` solving ``F = P0 (1 + R) / (1 - eps) - y P0``.

    :raises ZeroSpot: ``P0 = 0``
    :raises DegenerateStorageCost: ``eps >= 1``

    Examples:
        >>> round(convenience_yield(60.0, 58.0, 0.02, 0.1), 5)
        0.16667
    """
    if eps >= 1.0:
        raise DegenerateStorageCost(f"depreciation eps={eps!r} leaves nothing in storage")
    if spot == 0.0:
        raise ZeroSpot("convenience yield needs a nonzero spot price")
    return (1.0 + rate) / (1.0 - eps) - forward / spot


def forward_premium(expected_spot: float, forward: float) -> float:
    """Premium ``(E[P_T] - F) / F`` earned by the long side.

    Examples:
        >>> forward_premium(50.0, 40.0)
        0.25
    """
    if forward == 0.0:
        raise ZeroForward("forward premium needs a nonzero forward price")
    return (expected_spot - forward) / forward


def expected_price_change(spot: float, expected_spot: float) -> float:
    """Relative expected change ``(E[P_T] - P0) / P0`` of the spot price.

    Examples:
        >>> expected_price_change(50.0, 55.0)
        0.1
    """
    if spot == 0.0:
        raise ZeroSpot("expected price change needs a nonzero spot price")
    return (expected_spot - spot) / spot


def solve_no_forward(params: MarketParams, model: LevyModel) -> NoForwardEquilibrium:
    """Benchmark market in which no forward contract is traded."""
    response = producer.no_forward(params, model)
    spot = spot_price_initial(params, response.alpha)
    expected = terminal_moments(params, model, response.alpha).mean
    return NoForwardEquilibrium(
        alpha=response.alpha,
        spot_price=spot,
        expected_spot=expected,
        expected_price_change=_ratio(expected_price_change, spot, expected),
        producer_utility=response.utility,
    )
