"""
Brute-Force Oracle

Independent checks of the analytic solvers. Terminal values of the factor
process are sampled exactly (a Gaussian vector plus Poisson counts of each
jump atom), so certainty equivalents of any position can be estimated by
Monte Carlo; best responses and equilibria can be recomputed by exhaustive
search on grids.

Sampling is reproducible: the seed feeds a :class:`numpy.random.SeedSequence`
that is spawned once per batch, and every batch draws from its own counter
based ``Philox`` generator. Batches are independent, so their certainty
equivalents also give the standard error of the estimate.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from .errors import InvalidParams, McOverflow, NoBracket
from .investor import stock_value
from .levy_models import LevyModel
from .market_core import (
    MarketParams,
    hedge_ratio,
    producer_position,
    quad_revenue,
    terminal_moments,
    terminal_price,
)
from .rootfind import walk_bracket

__all__ = [
    "McConfig",
    "McEstimate",
    "GridConfig",
    "OracleEquilibrium",
    "sample_terminal",
    "mc_certainty_equivalent",
    "producer_mc_utility",
    "investor_mc_utility",
    "grid_best_response",
    "producer_grid_response",
    "investor_grid_response",
    "oracle_equilibrium",
]

_logger = logging.getLogger(__name__)

Samples = Tuple[np.ndarray, np.ndarray]
PositionFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class McConfig:
    """Monte-Carlo settings.

    :param n_samples: total number of terminal draws, at least 2
    :param seed: nonnegative integer seed
    :param antithetic: pair every Gaussian draw with its negative
    :param n_batches: independent batches used for the standard error
    """

    n_samples: int = 100_000
    seed: int = 0
    antithetic: bool = False
    n_batches: int = 10

    def __post_init__(self) -> None:
        if self.n_samples < 2:
            raise InvalidParams(f"n_samples must be at least 2, got {self.n_samples!r}")
        if not 1 <= self.n_batches <= self.n_samples:
            raise InvalidParams(f"n_batches must lie in [1, n_samples], got {self.n_batches!r}")
        if not 0 <= self.seed < 2**64:
            raise InvalidParams(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo estimate with its batch-means standard error."""

    value: float
    std_error: float


@dataclass(frozen=True)
class GridConfig:
    """Search grids for :func:`oracle_equilibrium`.

    Ranges left as ``None`` are derived from the market: forward prices
    around the sign change of the grid imbalance and positions within a few
    multiples of total production.
    """

    alpha_steps: int = 201
    hedge_range: Optional[Tuple[float, float]] = None
    hedge_steps: int = 401
    investor_range: Optional[Tuple[float, float]] = None
    investor_steps: int = 401
    forward_range: Optional[Tuple[float, float]] = None
    forward_steps: int = 101


@dataclass(frozen=True)
class OracleEquilibrium:
    """Grid equilibrium and the imbalance ``|hp + hs|`` left at it."""

    alpha: float
    h: float
    forward_price: float
    imbalance: float
    forward_step: float = 0.0


def _batch_sizes(cfg: McConfig) -> Sequence[int]:
    return [len(chunk) for chunk in np.array_split(np.arange(cfg.n_samples), cfg.n_batches)]


def _sample_batch(model: LevyModel, rng: np.random.Generator, size: int, antithetic: bool) -> Samples:
    horizon = model.horizon
    eigval, eigvec = np.linalg.eigh(model.c * horizon)
    root = eigvec * np.sqrt(np.clip(eigval, 0.0, None))
    draws = (size + 1) // 2 if antithetic else size
    normals = rng.standard_normal((draws, 2))
    counts = rng.poisson(model.intensities * horizon, size=(draws, len(model.intensities)))
    if antithetic:
        normals = np.concatenate([normals, -normals])[:size]
        counts = np.concatenate([counts, counts])[:size]
    compensator = (model.intensities * horizon) @ model.points
    z = model.b * horizon + normals @ root.T + counts @ model.points - compensator
    return z @ np.asarray(model.u_demand), z @ np.asarray(model.u_stock)


def _batches(model: LevyModel, cfg: McConfig) -> Iterator[Samples]:
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.n_batches)
    for child, size in zip(children, _batch_sizes(cfg)):
        rng = np.random.Generator(np.random.Philox(child))
        yield _sample_batch(model, rng, size, cfg.antithetic)


def sample_terminal(model: LevyModel, cfg: McConfig) -> Samples:
    """Exact draws of ``(X_T, Y_T)``.

    :return: arrays ``x`` (demand shock) and ``y`` (stock log-return), each of
        length ``cfg.n_samples``
    """
    xs, ys = zip(*_batches(model, cfg))
    return np.concatenate(xs), np.concatenate(ys)


def _certainty_equivalent(values: np.ndarray, gamma: float) -> float:
    return float(-(logsumexp(-gamma * values) - np.log(values.size)) / gamma)


def mc_certainty_equivalent(
    position: PositionFn, gamma: float, model: LevyModel, cfg: McConfig
) -> McEstimate:
    """Certainty equivalent ``-(1/gamma) log E[exp(-gamma V)]`` by Monte Carlo.

    :param position: terminal wealth as a function of the samples ``(x, y)``
    :param gamma: risk aversion, positive
    :param model: factor dynamics to sample from
    :param cfg: sample size, seed and batching
    :raises McOverflow: the estimate is not finite
    """
    if gamma <= 0.0:
        raise InvalidParams(f"risk aversion must be positive, got {gamma!r}")
    values, per_batch = [], []
    for x, y in _batches(model, cfg):
        batch = np.asarray(position(x, y), dtype=float) * np.ones_like(x)
        values.append(batch)
        per_batch.append(_certainty_equivalent(batch, gamma))
    estimate = _certainty_equivalent(np.concatenate(values), gamma)
    if not np.isfinite(estimate):
        raise McOverflow(f"certainty equivalent overflowed for gamma={gamma!r}")
    if cfg.n_batches > 1:
        std_error = float(np.std(per_batch, ddof=1) / np.sqrt(cfg.n_batches))
    else:
        std_error = float("nan")
    _logger.debug("MC certainty equivalent %r +- %r", estimate, std_error)
    return McEstimate(estimate, std_error)


def producer_mc_utility(
    params: MarketParams,
    model: LevyModel,
    alpha: float,
    hp: float,
    forward: float,
    cfg: McConfig,
) -> McEstimate:
    """Monte-Carlo certainty equivalent of the producer's terminal wealth."""

    def position(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return producer_position(params, alpha, hp, forward, x)

    return mc_certainty_equivalent(position, params.gamma_p, model, cfg)


def investor_mc_utility(
    params: MarketParams,
    model: LevyModel,
    alpha: float,
    hs: float,
    forward: float,
    cfg: McConfig,
) -> McEstimate:
    """Monte-Carlo certainty equivalent of the investor's forward leg plus the
    closed-form value of optimal stock trading."""

    def position(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return hs * (terminal_price(params, alpha, x) - forward)

    estimate = mc_certainty_equivalent(position, params.gamma_s, model, cfg)
    _, entropy = stock_value(params, model, hs)
    return McEstimate(estimate.value + entropy / params.gamma_s, estimate.std_error)


def grid_best_response(
    objective: Callable[..., np.ndarray],
    bounds: Sequence[Tuple[float, float]],
    steps: Union[int, Sequence[int]],
) -> Tuple[float, ...]:
    """Exhaustive maximiser of a vectorised objective on a regular grid.

    :param objective: function of one array per dimension, broadcast over an
        ``ij``-indexed mesh
    :param bounds: ``(lo, hi)`` per dimension
    :param steps: number of grid points per dimension (or one for all)
    :return: the grid point with the largest value; ties go to the
        lexicographically smallest point

    Examples:
        >>> grid_best_response(lambda a: -(a - 3.0) ** 2, [(0.0, 10.0)], 11)
        (3.0,)
    """
    if isinstance(steps, int):
        steps = [steps] * len(bounds)
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(bounds, steps)]
    mesh = np.meshgrid(*axes, indexing="ij")
    values = np.broadcast_to(objective(*mesh), mesh[0].shape)
    values = np.where(np.isnan(values), -np.inf, values)
    index = np.unravel_index(np.argmax(values), values.shape)
    return tuple(float(axis[i]) for axis, i in zip(axes, index))


def _producer_base(params: MarketParams, model: LevyModel) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """Producer utility at ``F = 0``; subtract ``hp * F`` for other prices."""
    shock = model.demand_triplet()
    gamma, horizon = params.gamma_p, model.horizon

    def base(alpha: np.ndarray, hp: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            risk = shock.cumulant(-gamma * hedge_ratio(params, alpha, hp))
        return quad_revenue(params, alpha, hp, 0.0) - horizon * risk / gamma

    return base


def _investor_base(params: MarketParams, model: LevyModel, hs: np.ndarray) -> np.ndarray:
    """Investor utility at ``P_T(x=0) - F = 0``; add ``hs (P_T(x=0) - F)`` otherwise."""
    shock = model.demand_triplet()
    gamma, horizon = params.gamma_s, model.horizon
    entropy = np.array([stock_value(params, model, h)[1] for h in hs])
    with np.errstate(over="ignore"):
        risk = shock.cumulant(-gamma * hs / params.m)
    return (entropy - horizon * risk) / gamma


def producer_grid_response(
    params: MarketParams,
    model: LevyModel,
    forward: float,
    hedge_range: Tuple[float, float],
    alpha_steps: int = 201,
    hedge_steps: int = 401,
) -> Tuple[float, float]:
    """Grid maximiser ``(alpha, hp)`` of the producer utility at ``forward``."""
    base = _producer_base(params, model)
    return grid_best_response(
        lambda a, h: base(a, h) - h * forward,
        [(0.0, params.pi0), hedge_range],
        [alpha_steps, hedge_steps],
    )


def investor_grid_response(
    params: MarketParams,
    model: LevyModel,
    alpha: float,
    forward: float,
    hs_range: Tuple[float, float],
    steps: int = 401,
) -> float:
    """Grid maximiser ``hs`` of the investor utility at ``(alpha, forward)``."""
    grid = np.linspace(hs_range[0], hs_range[1], steps)
    values = _investor_base(params, model, grid) + grid * (terminal_price(params, alpha) - forward)
    return float(grid[np.argmax(values)])


def oracle_equilibrium(
    params: MarketParams, model: LevyModel, grid: Optional[GridConfig] = None
) -> OracleEquilibrium:
    """Nested grid equilibrium.

    For every forward price on the grid both agents respond by grid search
    (the investor at the producer's grid storage); the forward price with the
    smallest ``|hp + hs|`` wins. Without an explicit ``forward_range`` the
    grid spans the sign change of the grid imbalance ``hp + hs``, found by
    walking from ``E[P_T]`` in steps of its standard deviation and padded by
    a tenth of its width on both sides.

    :raises NoBracket: the grid imbalance keeps its sign over the forward grid
    """
    grid = grid or GridConfig()
    scale = params.pi_t + params.pi0 + abs(params.legacy_position) or 1.0
    hedge_range = grid.hedge_range or (-2.0 * scale, scale)
    investor_range = grid.investor_range or (-scale, 2.0 * scale)

    alphas = np.linspace(0.0, params.pi0, grid.alpha_steps)
    hedges = np.linspace(hedge_range[0], hedge_range[1], grid.hedge_steps)
    holdings = np.linspace(investor_range[0], investor_range[1], grid.investor_steps)
    mesh_a, mesh_h = np.meshgrid(alphas, hedges, indexing="ij")
    producer_base = _producer_base(params, model)(mesh_a, mesh_h)
    producer_base = np.where(np.isnan(producer_base), -np.inf, producer_base)
    investor_base = _investor_base(params, model, holdings)

    def respond(forward: float) -> Tuple[float, float, float]:
        i, j = np.unravel_index(np.argmax(producer_base - mesh_h * forward), producer_base.shape)
        alpha, hp = float(alphas[i]), float(hedges[j])
        price = terminal_price(params, alpha)
        hs = float(holdings[np.argmax(investor_base + holdings * (price - forward))])
        return alpha, hp, hs

    forward_range = grid.forward_range or _forward_bracket(params, model, respond)
    forwards = np.linspace(forward_range[0], forward_range[1], grid.forward_steps)
    step = float(forwards[1] - forwards[0]) if len(forwards) > 1 else 0.0
    candidates, signs = [], set()
    for forward in forwards:
        alpha, hp, hs = respond(float(forward))
        signs.add(float(np.sign(hp + hs)))
        candidates.append(OracleEquilibrium(alpha, hp, float(forward), abs(hp + hs), step))
    if not (0.0 in signs or {1.0, -1.0} <= signs):
        raise NoBracket(
            f"grid imbalance keeps its sign on [{forward_range[0]!r}, {forward_range[1]!r}]",
            (float(forward_range[0]), float(forward_range[1])),
        )
    best = min(candidates, key=lambda c: c.imbalance)
    _logger.debug("grid equilibrium F=%r, imbalance %r", best.forward_price, best.imbalance)
    return best


def _forward_bracket(
    params: MarketParams, model: LevyModel, respond: Callable[[float], Tuple[float, float, float]]
) -> Tuple[float, float]:
    def imbalance(forward: float) -> float:
        _, hp, hs = respond(forward)
        return hp + hs

    moments = terminal_moments(params, model, 0.0)
    width = moments.std or 1.0
    lo, hi, _, _ = walk_bracket(imbalance, moments.mean, width)
    pad = 0.1 * (hi - lo) or width
    return lo - pad, hi + pad
