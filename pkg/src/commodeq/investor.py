"""
Investor Best Response

The investor takes the forward position ``hs`` opposite to the producer and
trades a stock whose log-price is ``Y = <u_stock, Z>``. With exponential
utility the stock-trading problem has an explicit value: under the measure
obtained by Esscher-tilting ``Z`` with ``xi = -(gamma_s hs / m) u_demand``,
the investor's optimal stock holding earns the relative entropy of the
minimal entropy martingale measure. That measure is itself an Esscher
transform of the exponential-transform triplet of the stock, with parameter
``eta*`` found by :func:`~commodeq.levy_models.esscher_root`. The certainty
equivalent is

    U(hs) = -(T / gamma_s) (kappa_s(eta*) + kappa_2(-gamma_s hs / m)) + hs (P_T(x=0) - F),

where ``kappa_s`` is the cumulant of the exponential-transform triplet under
the tilted measure and ``P_T(x=0)`` the deterministic part of the terminal
spot price. The demand drift is priced by ``kappa_2``.

With Brownian factors ``U`` is a concave quadratic and
:func:`best_response_bm` is explicit; with jumps :func:`best_response_jd`
brackets the zero of :func:`marginal_utility`. Since ``eta*`` minimises the
tilted cumulant, only the explicit dependence of that cumulant on ``hs``
enters the derivative:

    U'(hs) = (T / m) (eta* c_sd + sum_j lambda_j^xi z_j (exp(eta* w_j) - 1)
                       + kappa_2'(-gamma_s hs / m)) + P_T(x=0) - F,

with ``c_sd`` the stock-demand covariance, ``lambda_j^xi`` the tilted
intensities, ``z_j`` the demand move and ``w_j = exp(y_j) - 1`` the stock
return of atom ``j``.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DegenerateCorrelation, NoConvergence, NotBrownian, NotConcave, ZeroVariance
from .levy_models import (
    LevyModel,
    cumulant_demand,
    esscher_root,
    esscher_tilt,
    exp_transform,
    project,
)
from .market_core import MarketParams, check_alpha, terminal_moments, terminal_price
from .rootfind import bracketed_root, expand_bracket, saturate

__all__ = [
    "BrownianLeg",
    "InvestorResponse",
    "brownian_leg",
    "stock_value",
    "entropy_value",
    "investor_utility",
    "marginal_utility",
    "best_response_bm",
    "best_response_jd",
    "best_response",
]

_logger = logging.getLogger(__name__)

CORRELATION_TOL = 1e-12
ENTROPY_TOL = 1e-12
FOC_RTOL = 1e-8


@dataclass(frozen=True)
class BrownianLeg:
    """Volatilities, correlation and market price of risk of a Brownian model."""

    sigma1: float
    sigma2: float
    rho: float
    lambda_mpr: float


@dataclass(frozen=True)
class InvestorResponse:
    """Optimal forward position at given storage and forward price.

    :param hs: forward position
    :param eta_star: Esscher parameter of the minimal entropy measure at ``hs``
    :param entropy: relative entropy earned by trading the stock, nonnegative
    :param utility: certainty equivalent at ``hs``
    :param residual: first-order residual at ``hs``
    """

    hs: float
    eta_star: float
    entropy: float
    utility: float
    residual: float = 0.0


def brownian_leg(model: LevyModel) -> BrownianLeg:
    """Recover ``(sigma1, sigma2, rho, lambda_mpr)`` from a jump-free model.

    The stock leg uses ``b1 = sigma1 lambda_mpr - sigma1^2 / 2``. A model
    without stock volatility reports ``rho = lambda_mpr = 0``.

    :raises NotBrownian: the model has active jump atoms

    Examples:
        >>> leg = brownian_leg(LevyModel.brownian(0.2, 10.0, 0.5, 0.3))
        >>> round(leg.rho, 12), round(leg.lambda_mpr, 12)
        (0.5, 0.3)
    """
    if model.has_active_jumps:
        raise NotBrownian("model has jump atoms")
    stock = project(model, model.u_stock)
    shock = project(model, model.u_demand)
    sigma1, sigma2 = np.sqrt(stock.variance), np.sqrt(shock.variance)
    if sigma1 == 0.0:
        return BrownianLeg(0.0, float(sigma2), 0.0, 0.0)
    cross = float(np.asarray(model.u_stock) @ model.c @ np.asarray(model.u_demand))
    rho = cross / (sigma1 * sigma2) if sigma2 > 0.0 else 0.0
    lambda_mpr = (stock.drift + 0.5 * stock.variance) / sigma1
    return BrownianLeg(float(sigma1), float(sigma2), float(rho), float(lambda_mpr))


def stock_value(params: MarketParams, model: LevyModel, hs: float) -> Tuple[float, float]:
    """Esscher root and entropy of the stock leg for forward position ``hs``.

    :return: ``(eta_star, entropy)``; ``(0, 0)`` when the stock is riskless
        with zero drift
    """
    zeta = params.gamma_s * hs / params.m
    tilted = esscher_tilt(model, -zeta * np.asarray(model.u_demand))
    transformed = exp_transform(project(tilted, tilted.u_stock))
    if transformed.is_zero:
        return 0.0, 0.0
    eta = esscher_root(transformed)
    entropy = -model.horizon * transformed.cumulant(eta)
    if entropy < -ENTROPY_TOL:
        _logger.warning("negative stock entropy %r at hs=%r", entropy, hs)
    return eta, entropy


def entropy_value(params: MarketParams, model: LevyModel, hs: float) -> float:
    """Relative entropy of the minimal entropy martingale measure at ``hs``.

    Examples:
        >>> params = MarketParams(mu=200.0, m=1.0, pi0=100.0, pi_t=100.0, gamma_s=0.1)
        >>> model = LevyModel.brownian(0.2, 10.0, 0.0, 0.3, 2.0)
        >>> round(entropy_value(params, model, 0.0), 12)
        0.09
    """
    return stock_value(params, model, hs)[1]


def investor_utility(
    params: MarketParams, model: LevyModel, alpha: float, hs: float, forward: float
) -> float:
    """Certainty equivalent of the investor with an optimally traded stock.

    :raises AlphaOutOfRange: storage outside ``[0, pi0]``
    """
    check_alpha(params, alpha)
    gamma = params.gamma_s
    _, entropy = stock_value(params, model, hs)
    risk = cumulant_demand(model, -gamma * hs / params.m)
    expected = terminal_price(params, alpha)
    return (entropy - model.horizon * risk) / gamma + hs * (expected - forward)


def marginal_utility(
    params: MarketParams, model: LevyModel, alpha: float, hs: float, forward: float
) -> float:
    """Derivative of :func:`investor_utility` with respect to ``hs``.

    The Esscher root is an interior minimiser of the tilted cumulant, so the
    derivative only sees the explicit dependence on ``hs`` through the tilt
    ``-gamma_s hs / m`` along the demand factor.

    :raises AlphaOutOfRange: storage outside ``[0, pi0]``

    Examples:
        >>> params = MarketParams(mu=200.0, m=1.0, pi0=100.0, pi_t=100.0, gamma_s=0.1)
        >>> model = LevyModel.brownian(0.2, 10.0, 0.0, 0.3, 0.25)
        >>> round(marginal_utility(params, model, 0.0, 0.0, 100.0), 12)
        0.0
    """
    check_alpha(params, alpha)
    zeta = params.gamma_s * hs / params.m
    u_stock = np.asarray(model.u_stock)
    u_demand = np.asarray(model.u_demand)
    tilted = esscher_tilt(model, -zeta * u_demand)
    transformed = exp_transform(project(tilted, tilted.u_stock))
    stock_slope = 0.0
    if not transformed.is_zero:
        eta = esscher_root(transformed)
        stock_slope = eta * float(u_stock @ model.c @ u_demand)
        if tilted.has_jumps:
            lifts = np.expm1(tilted.points @ u_stock)
            moves = tilted.points @ u_demand
            stock_slope += float(np.sum(tilted.intensities * moves * np.expm1(eta * lifts)))
    demand_slope = model.demand_triplet().cumulant_derivative(-zeta)
    scale = model.horizon / params.m
    return scale * (stock_slope + demand_slope) + terminal_price(params, alpha) - forward


def best_response_bm(
    params: MarketParams, model: LevyModel, alpha: float, forward: float
) -> InvestorResponse:
    """Explicit investor optimum for Brownian factors.

    ``hs = (E - F) / (g V) - lambda rho sqrt(T) / (g sqrt(V))`` with the
    effective risk aversion ``g = gamma_s (1 - rho^2)``.

    :raises NotBrownian: the model has jump atoms
    :raises DegenerateCorrelation: ``|rho| = 1``
    :raises ZeroVariance: ``Var[P_T] = 0``
    """
    leg = brownian_leg(model)
    effective = params.gamma_s * (1.0 - leg.rho * leg.rho)
    if effective <= params.gamma_s * CORRELATION_TOL:
        raise DegenerateCorrelation(f"|rho| = 1 (rho={leg.rho!r}) leaves no effective risk aversion")
    moments = terminal_moments(params, model, alpha)
    if moments.variance <= 0.0:
        raise ZeroVariance("terminal spot price has zero variance")
    premium = (moments.mean - forward) / (effective * moments.variance)
    stock_hedge = leg.lambda_mpr * leg.rho * np.sqrt(model.horizon) / (effective * moments.std)
    hs = float(premium - stock_hedge)
    eta, entropy = stock_value(params, model, hs)
    return InvestorResponse(
        hs=hs,
        eta_star=eta,
        entropy=entropy,
        utility=investor_utility(params, model, alpha, hs, forward),
    )


def best_response_jd(
    params: MarketParams, model: LevyModel, alpha: float, forward: float
) -> InvestorResponse:
    """Investor optimum for a model with jump atoms.

    The zero of :func:`marginal_utility` is bracketed around the origin.
    Models without active atoms use :func:`best_response_bm`.

    :raises NotConcave: the marginal utility rises across the bracket
    :raises NoConvergence: the marginal utility exceeds
        ``1e-8 (1 + |F| + |E[P_T] - F|)`` at the root
    """
    if not model.has_active_jumps:
        return best_response_bm(params, model, alpha, forward)
    check_alpha(params, alpha)

    def marginal(hs: float) -> float:
        return marginal_utility(params, model, alpha, hs, forward)

    moments = terminal_moments(params, model, alpha)
    gap = abs(moments.mean - forward)
    width = 1.0 + gap / (params.gamma_s * max(moments.variance, 1e-300))
    g = saturate(marginal)
    bracket = expand_bracket(g, -width, width)
    lo, hi, flo, fhi = bracket
    if flo < fhi:
        raise NotConcave(f"investor marginal utility increases on [{lo!r}, {hi!r}]")
    hs = bracketed_root(g, bracket, xtol=1e-12 * (1.0 + width))

    residual = abs(marginal(hs))
    if residual > FOC_RTOL * (1.0 + abs(forward) + gap):
        raise NoConvergence("investor first-order condition not met", residual)
    _logger.debug("investor optimum hs=%r, residual %r", hs, residual)
    eta, entropy = stock_value(params, model, hs)
    return InvestorResponse(
        hs=hs,
        eta_star=eta,
        entropy=entropy,
        utility=investor_utility(params, model, alpha, hs, forward),
        residual=residual,
    )


def best_response(
    params: MarketParams, model: LevyModel, alpha: float, forward: float
) -> InvestorResponse:
    """Dispatch on the model: closed form without active atoms, bracketing with."""
    if model.has_active_jumps:
        return best_response_jd(params, model, alpha, forward)
    return best_response_bm(params, model, alpha, forward)
