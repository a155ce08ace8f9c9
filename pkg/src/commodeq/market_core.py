"""
Market Core

This module holds the economic parameters of the two-date commodity market
and the maps every solver shares. Demand is linear, ``psi0(x) = mu - m x``,
with inverse ``phi0(y) = (mu - y) / m``. At time 0 the producer sells
``pi0 - alpha`` units and stores ``alpha``; at time ``T`` the stored units
arrive depreciated by ``1 - eps`` next to the new production ``pi_t`` and
meet a demand curve shifted by the random shock ``X``. The spot prices are
therefore

    P0  = phi0(pi0 - alpha)
    P_T = phi0(pi_t) - alpha (1 - eps) / m + X / m.

The producer's terminal wealth splits into a deterministic part
:func:`quad_revenue`, quadratic in the storage and linear in the forward
position, plus ``hedge_ratio * X``. Both agents' solvers are built on that
split.

A legacy forward position ``(h', F')`` entered before time 0 can be attached
to the parameters; it adds ``h' (P_T - F')`` to the producer's wealth.
"""

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import AlphaOutOfRange, InvalidParams
from .levy_models import LevyModel

__all__ = [
    "LegacyHedge",
    "MarketParams",
    "PriceMoments",
    "check_alpha",
    "demand",
    "inverse_demand",
    "spot_price_initial",
    "terminal_price",
    "terminal_moments",
    "quad_revenue",
    "hedge_ratio",
    "producer_position",
]

ALPHA_TOL = 1e-12

Real = Union[float, np.ndarray]


@dataclass(frozen=True)
class LegacyHedge:
    """Forward position ``position`` at strike ``strike`` held before time 0."""

    position: float
    strike: float


@dataclass(frozen=True)
class MarketParams:
    """Demand, production, storage, rates and risk aversions.

    :param mu: demand intercept
    :param m: demand slope (quantity per unit of price), positive
    :param pi0: production at time 0
    :param pi_t: production at time ``T``
    :param eps: storage depreciation in ``[0, 1)``
    :param rate: simple interest rate over ``[0, T]``, greater than -1
    :param gamma_p: producer risk aversion
    :param gamma_s: investor risk aversion
    :param legacy_hedge: forward position already held by the producer

    Examples:
        >>> params = MarketParams(mu=100.0, m=2.0, pi0=50.0, pi_t=40.0)
        >>> params.replace(m=1.0).m
        1.0
        >>> MarketParams(mu=100.0, m=0.0, pi0=50.0, pi_t=40.0)
        Traceback (most recent call last):
        ...
        commodeq.errors.InvalidParams: demand slope m must be positive, got 0.0
    """

    mu: float
    m: float
    pi0: float
    pi_t: float
    eps: float = 0.0
    rate: float = 0.0
    gamma_p: float = 1.0
    gamma_s: float = 1.0
    legacy_hedge: Optional[LegacyHedge] = None

    def __post_init__(self) -> None:
        for name in ("mu", "m", "pi0", "pi_t", "eps", "rate", "gamma_p", "gamma_s"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise InvalidParams(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)
        if self.m <= 0.0:
            raise InvalidParams(f"demand slope m must be positive, got {self.m!r}")
        if self.gamma_p <= 0.0 or self.gamma_s <= 0.0:
            raise InvalidParams(
                f"risk aversions must be positive, got {self.gamma_p!r}, {self.gamma_s!r}"
            )
        if not 0.0 <= self.eps < 1.0:
            raise InvalidParams(f"depreciation eps must lie in [0, 1), got {self.eps!r}")
        if self.pi0 < 0.0 or self.pi_t < 0.0:
            raise InvalidParams(
                f"production must be nonnegative, got {self.pi0!r}, {self.pi_t!r}"
            )
        if self.rate <= -1.0:
            raise InvalidParams(f"interest rate must exceed -1, got {self.rate!r}")
        hedge = self.legacy_hedge
        if hedge is not None and not (np.isfinite(hedge.position) and np.isfinite(hedge.strike)):
            raise InvalidParams(f"legacy hedge must be finite, got {hedge!r}")

    def replace(self, **changes: Union[float, LegacyHedge, None]) -> "MarketParams":
        """Validated copy with some fields changed."""
        return replace(self, **changes)

    @property
    def legacy_position(self) -> float:
        return 0.0 if self.legacy_hedge is None else float(self.legacy_hedge.position)

    @property
    def legacy_strike(self) -> float:
        return 0.0 if self.legacy_hedge is None else float(self.legacy_hedge.strike)


@dataclass(frozen=True)
class PriceMoments:
    """Mean and variance of the terminal spot price."""

    mean: float
    variance: float

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


def check_alpha(params: MarketParams, alpha: float) -> None:
    """Raise :class:`AlphaOutOfRange` unless ``0 <= alpha <= pi0``."""
    if not -ALPHA_TOL <= alpha <= params.pi0 + ALPHA_TOL:
        raise AlphaOutOfRange(alpha, params.pi0)


def demand(params: MarketParams, x: Real) -> Real:
    """Quantity demanded at price ``x``.

    Examples:
        >>> demand(MarketParams(mu=100.0, m=2.0, pi0=0.0, pi_t=0.0), 10.0)
        80.0
    """
    return params.mu - params.m * x


def inverse_demand(params: MarketParams, y: Real) -> Real:
    """Price at which ``y`` units are demanded.

    Examples:
        >>> inverse_demand(MarketParams(mu=100.0, m=2.0, pi0=0.0, pi_t=0.0), 40.0)
        30.0
    """
    return (params.mu - y) / params.m


def spot_price_initial(params: MarketParams, alpha: float) -> float:
    """Spot price at time 0 when ``alpha`` units are stored.

    :raises AlphaOutOfRange: ``alpha`` outside ``[0, pi0]``

    Examples:
        >>> spot_price_initial(MarketParams(mu=100.0, m=1.0, pi0=50.0, pi_t=0.0), 10.0)
        60.0
    """
    check_alpha(params, alpha)
    return inverse_demand(params, params.pi0 - alpha)


def terminal_price(params: MarketParams, alpha: float, x_realization: Real = 0.0) -> Real:
    """Spot price at ``T`` for a realisation of the demand shock.

    ``x_realization`` may be an array of samples.

    Examples:
        >>> params = MarketParams(mu=100.0, m=1.0, pi0=50.0, pi_t=40.0, eps=0.1)
        >>> terminal_price(params, 10.0, 5.0)
        56.0
    """
    check_alpha(params, alpha)
    carried = alpha * (1.0 - params.eps)
    return inverse_demand(params, params.pi_t) - carried / params.m + x_realization / params.m


def terminal_moments(params: MarketParams, model: LevyModel, alpha: float) -> PriceMoments:
    """Mean and variance of ``P_T``.

    The mean includes the drift of the demand shock, ``b2 T / m``, which is
    zero for the models built by :class:`LevyModel`'s constructors unless a
    nonzero ``drift2`` is given.
    """
    shock = model.demand_triplet()
    horizon = model.horizon
    mean = terminal_price(params, alpha) + shock.drift * horizon / params.m
    variance = shock.cumulant_second(0.0) * horizon / params.m**2
    return PriceMoments(float(mean), float(variance))


def quad_revenue(params: MarketParams, alpha: Real, hp: Real, forward: float) -> Real:
    """Deterministic part ``q(alpha, hp)`` of the producer's terminal wealth.

    Storage and position may be arrays of matching shape.

    The legacy hedge, when present, contributes
    ``h' (phi0(pi_t) - alpha (1 - eps) / m - F')``.

    Examples:
        >>> params = MarketParams(mu=100.0, m=1.0, pi0=50.0, pi_t=40.0)
        >>> quad_revenue(params, 0.0, 0.0, 0.0)
        4900.0
    """
    mu, m, pi0, pi_t = params.mu, params.m, params.pi0, params.pi_t
    keep, growth = 1.0 - params.eps, 1.0 + params.rate
    phi_t = inverse_demand(params, pi_t)
    phi_0 = inverse_demand(params, pi0)
    value = (
        -(alpha**2) * (growth + keep**2) / m
        + alpha * (2.0 * growth * pi0 - 2.0 * keep * pi_t - (params.rate + params.eps) * mu) / m
        - alpha * hp * keep / m
        - hp * (forward - (mu - pi_t) / m)
        + pi_t * phi_t
        + pi0 * phi_0 * growth
    )
    legacy = params.legacy_position
    if legacy:
        value += legacy * (phi_t - alpha * keep / m - params.legacy_strike)
    return value


def hedge_ratio(params: MarketParams, alpha: Real, hp: Real) -> Real:
    """Exposure ``l(alpha, hp)`` of the producer's wealth to the demand shock.

    Examples:
        >>> hedge_ratio(MarketParams(mu=100.0, m=2.0, pi0=50.0, pi_t=40.0, eps=0.1), 10.0, -20.0)
        14.5
    """
    exposure = alpha * (1.0 - params.eps) + hp + params.pi_t + params.legacy_position
    return exposure / params.m


def producer_position(
    params: MarketParams, alpha: float, hp: float, forward: float, x_realization: Real
) -> Real:
    """Producer's terminal wealth for a realisation of the demand shock.

    Sales at ``T``, the forward payoff, the legacy hedge payoff and the time 0
    sales reinvested at ``rate``.
    """
    price_t = terminal_price(params, alpha, x_realization)
    sold_t = params.pi_t + alpha * (1.0 - params.eps)
    wealth = price_t * sold_t + hp * (price_t - forward)
    wealth = wealth + (1.0 + params.rate) * spot_price_initial(params, alpha) * (params.pi0 - alpha)
    if params.legacy_hedge is not None:
        wealth = wealth + params.legacy_position * (price_t - params.legacy_strike)
    return wealth
