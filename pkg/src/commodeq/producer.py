"""
Producer Best Response

The producer chooses how much of the time 0 production to store, ``alpha``,
and how many forward contracts to buy, ``hp`` (negative values are sales),
so as to maximise the certainty equivalent of exponential utility,

    U(alpha, hp) = q(alpha, hp) - (T / gamma_p) kappa_2(-gamma_p l(alpha, hp)),

where ``q`` is the deterministic revenue of :func:`~commodeq.market_core.quad_revenue`
and ``l`` the exposure of :func:`~commodeq.market_core.hedge_ratio`.

The Gaussian part and the drift of the demand shock make ``U`` an explicit
quadratic with coefficients ``d1 .. d6`` (:func:`d_constants`). Without jumps
the maximiser is available in closed form (:func:`best_response_bm`). Jump
atoms add a strictly concave exponential term that enters both first-order
conditions through the same scalar, so the conditions reduce to a single
monotone equation in ``hp`` along a straight line in the ``(alpha, hp)``
plane (:func:`best_response_jd`). Storage is confined to ``[0, pi0]``; when
the unconstrained optimum leaves that interval the storage is clamped and
the forward position re-optimised at the clamped storage.

:func:`no_forward` solves the same problem without a forward market.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import NoConvergence, NotBrownian, NotConcave
from .levy_models import LevyModel, UniTriplet, cumulant_demand
from .market_core import MarketParams, check_alpha, hedge_ratio, inverse_demand, quad_revenue
from .rootfind import bracketed_root, expand_bracket, saturate

__all__ = [
    "QuadCoefficients",
    "ProducerResponse",
    "NoForwardResponse",
    "brownian_variance",
    "mean_shift",
    "d_constants",
    "producer_utility",
    "first_order_conditions",
    "best_response_bm",
    "best_response_jd",
    "best_response",
    "no_forward",
]

_logger = logging.getLogger(__name__)

FOC_RTOL = 1e-9
HEDGE_XTOL = 1e-13


@dataclass(frozen=True)
class QuadCoefficients:
    """Coefficients of ``d1 a^2 + d2 a + d3 a h + d4 h^2 + d5 h + d6``."""

    d1: float
    d2: float
    d3: float
    d4: float
    d5: float
    d6: float

    def value(self, alpha: float, hp: float) -> float:
        return (
            self.d1 * alpha * alpha
            + self.d2 * alpha
            + self.d3 * alpha * hp
            + self.d4 * hp * hp
            + self.d5 * hp
            + self.d6
        )

    @property
    def discriminant(self) -> float:
        return 4.0 * self.d1 * self.d4 - self.d3 * self.d3

    @property
    def scale(self) -> float:
        """Magnitude used to turn residual tolerances into relative ones."""
        return 1.0 + abs(self.d2) + abs(self.d5)


@dataclass(frozen=True)
class ProducerResponse:
    """Optimal storage and forward position at a given forward price.

    :param alpha: storage in ``[0, pi0]``
    :param hp: forward position
    :param utility: certainty equivalent at the optimum
    :param clamped: storage hit ``0`` or ``pi0``
    :param coefficients: the quadratic coefficients used
    :param residual: largest first-order residual at the optimum
    """

    alpha: float
    hp: float
    utility: float
    clamped: bool
    coefficients: QuadCoefficients
    residual: float = 0.0


@dataclass(frozen=True)
class NoForwardResponse:
    """Optimal storage when no forward contract is traded."""

    alpha: float
    utility: float
    clamped: bool


def brownian_variance(params: MarketParams, model: LevyModel) -> float:
    """Gaussian part of ``Var[P_T]``, ``c_2 T / m^2``."""
    return model.demand_triplet().variance * model.horizon / params.m**2


def mean_shift(params: MarketParams, model: LevyModel) -> float:
    """Contribution ``b_2 T / m`` of the demand drift to ``E[P_T]``."""
    return model.demand_triplet().drift * model.horizon / params.m


def d_constants(
    params: MarketParams, variance_bm: float, forward: float, shift: float = 0.0
) -> QuadCoefficients:
    """Coefficients of the producer's quadratic objective.

    :param params: market parameters, legacy hedge included
    :param variance_bm: Gaussian part of ``Var[P_T]``
    :param forward: forward price ``F``
    :param shift: drift contribution ``b_2 T / m`` to ``E[P_T]``
    :return: ``d1 .. d6``

    Examples:
        >>> params = MarketParams(mu=100.0, m=1.0, pi0=50.0, pi_t=40.0, gamma_p=1e-12)
        >>> d = d_constants(params, 1.0, 60.0)
        >>> abs(d.d5) < 1e-9
        True
    """
    mu, m, gamma = params.mu, params.m, params.gamma_p
    keep, growth = 1.0 - params.eps, 1.0 + params.rate
    legacy = params.legacy_position
    exposure = params.pi_t + legacy
    var = variance_bm
    phi_t = inverse_demand(params, params.pi_t)
    phi_0 = inverse_demand(params, params.pi0)

    d1 = -((growth + keep**2) / m + 0.5 * gamma * keep**2 * var)
    d2 = (
        (2.0 * growth * params.pi0 - keep * (2.0 * params.pi_t + legacy) - (params.rate + params.eps) * mu)
        / m
        - gamma * keep * exposure * var
        + keep * shift
    )
    d3 = -keep / m - gamma * keep * var
    d4 = -0.5 * gamma * var
    d5 = -(forward - (mu - params.pi_t) / m) - gamma * exposure * var + shift
    d6 = (
        params.pi_t * phi_t
        + params.pi0 * phi_0 * growth
        + legacy * (phi_t - params.legacy_strike)
        - 0.5 * gamma * var * exposure**2
        + exposure * shift
    )
    return QuadCoefficients(d1, d2, d3, d4, d5, d6)


def producer_utility(
    params: MarketParams, model: LevyModel, alpha: float, hp: float, forward: float
) -> float:
    """Certainty equivalent of the producer's terminal wealth.

    :raises AlphaOutOfRange: storage outside ``[0, pi0]``
    """
    check_alpha(params, alpha)
    gamma = params.gamma_p
    risk = cumulant_demand(model, -gamma * hedge_ratio(params, alpha, hp))
    return quad_revenue(params, alpha, hp, forward) - model.horizon * risk / gamma


class _Objective:
    """First and second derivatives of the producer utility."""

    def __init__(self, params: MarketParams, model: LevyModel, forward: float) -> None:
        self.params = params
        self.keep = 1.0 - params.eps
        self.factor = model.horizon / params.m
        self.jumps: UniTriplet = model.demand_triplet().jump_part()
        self.d = d_constants(
            params, brownian_variance(params, model), forward, mean_shift(params, model)
        )

    def _arg(self, alpha: float, hp: float) -> float:
        return -self.params.gamma_p * hedge_ratio(self.params, alpha, hp)

    def jump_slope(self, alpha: float, hp: float) -> float:
        with np.errstate(over="ignore"):
            return self.factor * self.jumps.cumulant_derivative(self._arg(alpha, hp))

    def f_alpha(self, alpha: float, hp: float) -> float:
        d = self.d
        return 2.0 * d.d1 * alpha + d.d2 + d.d3 * hp + self.keep * self.jump_slope(alpha, hp)

    def f_hedge(self, alpha: float, hp: float) -> float:
        d = self.d
        return d.d3 * alpha + 2.0 * d.d4 * hp + d.d5 + self.jump_slope(alpha, hp)

    def hessian(self, alpha: float, hp: float) -> np.ndarray:
        d = self.d
        with np.errstate(over="ignore"):
            curv = self.jumps.cumulant_second(self._arg(alpha, hp))
        weight = self.params.gamma_p * self.factor * curv / self.params.m
        k = self.keep
        return np.array(
            [
                [2.0 * d.d1 - weight * k * k, d.d3 - weight * k],
                [d.d3 - weight * k, 2.0 * d.d4 - weight],
            ]
        )


def first_order_conditions(
    params: MarketParams, model: LevyModel, alpha: float, hp: float, forward: float
) -> Tuple[float, float]:
    """Partial derivatives of :func:`producer_utility` in ``alpha`` and ``hp``."""
    obj = _Objective(params, model, forward)
    return obj.f_alpha(alpha, hp), obj.f_hedge(alpha, hp)


def _check_quadratic(d: QuadCoefficients) -> None:
    if not (d.d1 < 0.0 and d.d4 < 0.0 and d.discriminant > 0.0):
        raise NotConcave(
            f"producer objective not concave: d1={d.d1!r}, d4={d.d4!r}, "
            f"discriminant={d.discriminant!r}"
        )


def _has_jump_risk(model: LevyModel) -> bool:
    return not model.demand_triplet().jump_part().is_affine


def best_response_bm(params: MarketParams, model: LevyModel, forward: float) -> ProducerResponse:
    """Closed-form producer optimum when the demand shock is Gaussian.

    :raises NotBrownian: the demand shock has jumps
    :raises NotConcave: ``d1 < 0``, ``d4 < 0`` and ``4 d1 d4 > d3^2`` do not all hold
    """
    if _has_jump_risk(model):
        raise NotBrownian("demand shock has jump atoms, use best_response_jd")
    d = d_constants(params, brownian_variance(params, model), forward, mean_shift(params, model))
    _check_quadratic(d)
    free = (d.d3 * d.d5 - 2.0 * d.d2 * d.d4) / d.discriminant
    alpha = min(max(free, 0.0), params.pi0)
    hp = -(alpha * d.d3 + d.d5) / (2.0 * d.d4)
    return ProducerResponse(
        alpha=alpha,
        hp=hp,
        utility=d.value(alpha, hp),
        clamped=alpha != free,
        coefficients=d,
    )


def _solve_hedge(obj: _Objective, alpha: float, width: float) -> float:
    """Forward position solving the hedge condition at fixed storage."""
    d = obj.d
    guess = -(alpha * d.d3 + d.d5) / (2.0 * d.d4)
    g = saturate(lambda hp: obj.f_hedge(alpha, hp))
    bracket = expand_bracket(g, guess - width, guess + width)
    return bracketed_root(g, bracket, xtol=HEDGE_XTOL)


def best_response_jd(params: MarketParams, model: LevyModel, forward: float) -> ProducerResponse:
    """Producer optimum when the demand shock has jump atoms.

    Both first-order conditions share the jump term, so ``(1 - eps) f_h - f_a``
    is linear and gives ``alpha = slope * hp + intercept``. The remaining
    condition is solved for ``hp`` on that line by bracketing. Models whose
    demand shock has no moving atoms fall back to :func:`best_response_bm`.

    :raises NotConcave: the Hessian at the solution is not negative definite
    :raises NoConvergence: a first-order residual exceeds ``1e-9 * scale``
    """
    if not _has_jump_risk(model):
        return best_response_bm(params, model, forward)
    obj = _Objective(params, model, forward)
    d, keep = obj.d, obj.keep
    if not (d.d1 < 0.0 and d.d4 < 0.0):
        raise NotConcave(f"producer objective not concave: d1={d.d1!r}, d4={d.d4!r}")
    denom = 2.0 * d.d1 - keep * d.d3
    slope = (2.0 * keep * d.d4 - d.d3) / denom
    intercept = (keep * d.d5 - d.d2) / denom
    width = params.pi_t + params.pi0 or 1.0

    g = saturate(lambda hp: obj.f_hedge(slope * hp + intercept, hp))
    bracket = expand_bracket(g, -width, width)
    hp = bracketed_root(g, bracket, xtol=HEDGE_XTOL)
    free = slope * hp + intercept
    alpha = min(max(free, 0.0), params.pi0)
    clamped = alpha != free
    if clamped:
        _logger.debug("producer storage %r clamped to %r", free, alpha)
        hp = _solve_hedge(obj, alpha, width)

    hess = obj.hessian(alpha, hp)
    if not (hess[0, 0] < 0.0 and np.linalg.det(hess) > 0.0):
        raise NotConcave(f"producer Hessian not negative definite at optimum: {hess.tolist()!r}")
    f_a, f_h = obj.f_alpha(alpha, hp), obj.f_hedge(alpha, hp)
    residual = abs(f_h) if clamped else max(abs(f_a), abs(f_h))
    if residual > FOC_RTOL * d.scale:
        raise NoConvergence("producer first-order conditions not met", residual)
    return ProducerResponse(
        alpha=alpha,
        hp=hp,
        utility=producer_utility(params, model, alpha, hp, forward),
        clamped=clamped,
        coefficients=d,
        residual=residual,
    )


def best_response(params: MarketParams, model: LevyModel, forward: float) -> ProducerResponse:
    """Dispatch on the demand shock: closed form without jumps, bracketing with."""
    if _has_jump_risk(model):
        return best_response_jd(params, model, forward)
    return best_response_bm(params, model, forward)


def no_forward(params: MarketParams, model: LevyModel) -> NoForwardResponse:
    """Optimal storage when the producer cannot trade forwards.

    :raises NotConcave: the objective is not concave in storage
    """
    obj = _Objective(params, model, forward=0.0)
    d = obj.d
    if not d.d1 < 0.0:
        raise NotConcave(f"producer objective not concave in storage: d1={d.d1!r}")
    if not _has_jump_risk(model):
        free = -d.d2 / (2.0 * d.d1)
        alpha = min(max(free, 0.0), params.pi0)
        return NoForwardResponse(alpha, d.value(alpha, 0.0), alpha != free)

    f = saturate(lambda a: obj.f_alpha(a, 0.0))
    if f(0.0) <= 0.0:
        alpha, clamped = 0.0, True
    elif f(params.pi0) >= 0.0:
        alpha, clamped = params.pi0, True
    else:
        alpha = bracketed_root(f, (0.0, params.pi0, f(0.0), f(params.pi0)), xtol=HEDGE_XTOL)
        clamped = False
        if not obj.hessian(alpha, 0.0)[0, 0] < 0.0:
            raise NotConcave("producer objective not concave in storage at optimum")
    utility = producer_utility(params, model, alpha, 0.0, 0.0)
    return NoForwardResponse(alpha, utility, clamped)
