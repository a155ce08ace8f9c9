"""
Lévy Factor Models

This module represents the bivariate Lévy process ``Z`` that drives both the
stock traded by the investor (``Y = <u_stock, Z>``) and the random shift of
terminal demand (``X = <u_demand, Z_T>``). A process is described by its
characteristic triplet: a drift vector ``b``, a covariance matrix ``c`` and a
Lévy measure which, in this package, is a finite set of atoms (jump sizes with
positive intensities). Restricting the jump measure to atoms keeps every
exponential moment finite, so cumulants can be evaluated exactly everywhere
without quadrature.

The drift is stored in the compensated convention,

    kappa(u) = <u, b> + <u, c u> / 2 + sum_j lambda_j (exp(<u, x_j>) - 1 - <u, x_j>),

so ``b`` is the mean of ``Z_1``. Two constructors build the models used in
practice: :meth:`LevyModel.brownian` (correlated Brownian motions, the stock
leg parametrised by its market price of risk) and
:meth:`LevyModel.jump_diffusion` (Brownian motions plus one common Poisson
jump).

The operations needed by the agents' closed-form solutions are module level
functions: :func:`cumulant`, :func:`cumulant_demand`, :func:`esscher_tilt`,
:func:`project`, :func:`exp_transform` and :func:`esscher_root`. Every value
is immutable, so models can be shared freely between threads and processes.
"""

import logging
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from .errors import Degenerate, InvalidModel, NoBracket, NoRoot
from .rootfind import bracketed_root, expand_bracket, saturate

__all__ = [
    "UniTriplet",
    "LevyModel",
    "cumulant",
    "cumulant_demand",
    "esscher_tilt",
    "project",
    "exp_transform",
    "esscher_root",
]

_logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
EIGEN_TOL = 1e-12
ROOT_XTOL = 1e-13
ROOT_POLISH_STEPS = 3

Vector = Tuple[float, float]
Atom2 = Tuple[Vector, float]
Atom1 = Tuple[float, float]
Real = Union[float, np.ndarray]


def _unwrap(value: np.ndarray) -> Real:
    return float(value) if np.ndim(value) == 0 else value


def _finite(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise InvalidModel(f"{name} must be finite, got {value!r}")
    return value


def _vector(values: Sequence[float], name: str) -> Vector:
    arr = np.asarray(values, dtype=float)
    if arr.shape != (2,):
        raise InvalidModel(f"{name} must have two entries, got shape {arr.shape}")
    return (_finite(arr[0], name), _finite(arr[1], name))


@dataclass(frozen=True)
class UniTriplet:
    """Characteristic triplet of a one-dimensional Lévy process.

    :param drift: compensated drift (mean per unit time)
    :param variance: Gaussian variance per unit time, nonnegative
    :param jump_atoms: ``(point, intensity)`` pairs with positive intensities

    Examples:
        >>> t = UniTriplet(0.0, 1.0)
        >>> t.cumulant(2.0)
        2.0
        >>> UniTriplet(0.0, 0.0, [(1.0, 2.0)]).jump_atoms
        ((1.0, 2.0),)
    """

    drift: float
    variance: float
    jump_atoms: Tuple[Atom1, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "drift", _finite(self.drift, "drift"))
        variance = _finite(self.variance, "variance")
        if variance < 0.0:
            raise InvalidModel(f"variance must be nonnegative, got {variance!r}")
        object.__setattr__(self, "variance", variance)
        atoms = []
        for point, intensity in self.jump_atoms:
            intensity = _finite(intensity, "jump intensity")
            if intensity <= 0.0:
                raise InvalidModel(f"jump intensities must be positive, got {intensity!r}")
            atoms.append((_finite(point, "jump point"), intensity))
        object.__setattr__(self, "jump_atoms", tuple(atoms))

    @cached_property
    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.jump_atoms], dtype=float)

    @cached_property
    def intensities(self) -> np.ndarray:
        return np.array([lam for _, lam in self.jump_atoms], dtype=float)

    @property
    def is_affine(self) -> bool:
        """True when the cumulant is a straight line (no variance, no moving jumps)."""
        return self.variance == 0.0 and not np.any(self.points != 0.0)

    @property
    def is_zero(self) -> bool:
        """True when the cumulant vanishes identically."""
        return self.drift == 0.0 and self.is_affine

    def cumulant(self, v: Real) -> Real:
        """Cumulant ``kappa(v)`` of the triplet; ``v`` may be an array."""
        v = np.asarray(v, dtype=float)
        vx = np.multiply.outer(v, self.points)
        jumps = np.sum(self.intensities * (np.expm1(vx) - vx), axis=-1)
        return _unwrap(self.drift * v + 0.5 * self.variance * v * v + jumps)

    def cumulant_derivative(self, v: Real) -> Real:
        """First derivative ``kappa'(v)``."""
        v = np.asarray(v, dtype=float)
        jumps = np.sum(self.intensities * self.points * np.expm1(np.multiply.outer(v, self.points)), axis=-1)
        return _unwrap(self.drift + self.variance * v + jumps)

    def cumulant_second(self, v: Real) -> Real:
        """Second derivative ``kappa''(v)``, nonnegative."""
        v = np.asarray(v, dtype=float)
        jumps = np.sum(self.intensities * self.points**2 * np.exp(np.multiply.outer(v, self.points)), axis=-1)
        return _unwrap(self.variance + jumps)

    def jump_part(self) -> "UniTriplet":
        """The triplet with drift and Gaussian variance removed."""
        return UniTriplet(0.0, 0.0, self.jump_atoms)


@dataclass(frozen=True)
class LevyModel:
    """Bivariate Lévy process with finitely many jump atoms.

    :param drift: compensated drift vector ``b``
    :param covariance: symmetric nonnegative definite 2x2 matrix ``c``
    :param jump_atoms: ``((x1, x2), intensity)`` pairs
    :param u_stock: projection selecting the stock log-price driver
    :param u_demand: projection selecting the demand shock
    :param horizon: time to maturity ``T`` in years
    """

    drift: Vector
    covariance: Tuple[Vector, Vector]
    jump_atoms: Tuple[Atom2, ...] = ()
    u_stock: Vector = (1.0, 0.0)
    u_demand: Vector = (0.0, 1.0)
    horizon: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "drift", _vector(self.drift, "drift"))
        cov = np.asarray(self.covariance, dtype=float)
        if cov.shape != (2, 2):
            raise InvalidModel(f"covariance must be 2x2, got shape {cov.shape}")
        if not np.all(np.isfinite(cov)):
            raise InvalidModel("covariance must be finite")
        if abs(cov[0, 1] - cov[1, 0]) > SYMMETRY_TOL:
            raise InvalidModel(f"covariance is not symmetric: {cov[0, 1]!r} != {cov[1, 0]!r}")
        smallest = float(np.linalg.eigvalsh(cov)[0])
        if smallest < -EIGEN_TOL:
            raise InvalidModel(f"covariance is not nonnegative definite (eigenvalue {smallest!r})")
        object.__setattr__(
            self, "covariance", (tuple(map(float, cov[0])), tuple(map(float, cov[1])))
        )
        atoms = []
        for point, intensity in self.jump_atoms:
            intensity = _finite(intensity, "jump intensity")
            if intensity <= 0.0:
                raise InvalidModel(f"jump intensities must be positive, got {intensity!r}")
            atoms.append((_vector(point, "jump point"), intensity))
        object.__setattr__(self, "jump_atoms", tuple(atoms))
        object.__setattr__(self, "u_stock", _vector(self.u_stock, "u_stock"))
        object.__setattr__(self, "u_demand", _vector(self.u_demand, "u_demand"))
        horizon = _finite(self.horizon, "horizon")
        if horizon <= 0.0:
            raise InvalidModel(f"horizon must be positive, got {horizon!r}")
        object.__setattr__(self, "horizon", horizon)

    @classmethod
    def brownian(
        cls,
        sigma1: float,
        sigma2: float,
        rho: float,
        lambda_mpr: float = 0.0,
        horizon: float = 1.0,
    ) -> "LevyModel":
        """Correlated Brownian motions driving the stock and the demand shock.

        The stock log-price drift is ``sigma1 * lambda_mpr - sigma1**2 / 2`` and
        the demand shock has zero mean.

        :param sigma1: stock volatility
        :param sigma2: demand shock volatility
        :param rho: correlation in ``[-1, 1]``
        :param lambda_mpr: market price of risk of the stock
        :param horizon: maturity ``T``

        Examples:
            >>> model = LevyModel.brownian(0.2, 10.0, 0.5, 0.3, 0.25)
            >>> model.drift[1]
            0.0
            >>> model.covariance[0][1]
            1.0
        """
        if not -1.0 <= rho <= 1.0:
            raise InvalidModel(f"correlation must lie in [-1, 1], got {rho!r}")
        cross = rho * sigma1 * sigma2
        return cls(
            drift=(sigma1 * lambda_mpr - 0.5 * sigma1 * sigma1, 0.0),
            covariance=((sigma1 * sigma1, cross), (cross, sigma2 * sigma2)),
            horizon=horizon,
        )

    @classmethod
    def jump_diffusion(
        cls,
        sigma1: float,
        sigma2: float,
        rho: float,
        drift1: float,
        drift2: float = 0.0,
        eta1: float = 0.0,
        eta2: float = 0.0,
        intensity: float = 0.0,
        horizon: float = 1.0,
    ) -> "LevyModel":
        """Brownian motions plus a common Poisson jump of size ``(eta1, eta2)``.

        ``drift1`` and ``drift2`` are the mean drifts, jumps included; a zero
        ``intensity`` gives a model without atoms.
        """
        if not -1.0 <= rho <= 1.0:
            raise InvalidModel(f"correlation must lie in [-1, 1], got {rho!r}")
        if intensity < 0.0:
            raise InvalidModel(f"jump intensity must be nonnegative, got {intensity!r}")
        cross = rho * sigma1 * sigma2
        atoms = (((eta1, eta2), intensity),) if intensity > 0.0 else ()
        return cls(
            drift=(drift1, drift2),
            covariance=((sigma1 * sigma1, cross), (cross, sigma2 * sigma2)),
            jump_atoms=atoms,
            horizon=horizon,
        )

    @cached_property
    def b(self) -> np.ndarray:
        return np.array(self.drift, dtype=float)

    @cached_property
    def c(self) -> np.ndarray:
        return np.array(self.covariance, dtype=float)

    @cached_property
    def points(self) -> np.ndarray:
        """Atom locations as a ``(k, 2)`` array."""
        return np.array([p for p, _ in self.jump_atoms], dtype=float).reshape(-1, 2)

    @cached_property
    def intensities(self) -> np.ndarray:
        return np.array([lam for _, lam in self.jump_atoms], dtype=float)

    @property
    def has_jumps(self) -> bool:
        return bool(self.jump_atoms)

    @property
    def has_active_jumps(self) -> bool:
        """True when some atom sits away from the origin."""
        return bool(np.any(self.points != 0.0))

    def demand_triplet(self) -> UniTriplet:
        return project(self, self.u_demand)

    def stock_triplet(self) -> UniTriplet:
        return project(self, self.u_stock)


def cumulant(model: LevyModel, u: Iterable[float]) -> float:
    """Cumulant generating function of ``Z_1`` at ``u``.

    :param model: the factor model
    :param u: point in the plane
    :return: ``kappa(u)``, finite everywhere

    Examples:
        >>> model = LevyModel(drift=(0.0, 0.0), covariance=((1.0, 0.0), (0.0, 1.0)))
        >>> cumulant(model, (1.0, 0.0))
        0.5
        >>> cumulant(model, (0.0, 0.0))
        0.0
    """
    u = np.asarray(u, dtype=float)
    inner = model.points @ u
    jumps = np.sum(model.intensities * (np.expm1(inner) - inner))
    return float(u @ model.b + 0.5 * u @ model.c @ u + jumps)


def cumulant_demand(model: LevyModel, v: float) -> float:
    """``kappa_2(v) = kappa(v * u_demand)``; multiply by ``T`` for the cumulant of ``X``."""
    return cumulant(model, v * np.asarray(model.u_demand))


def esscher_tilt(model: LevyModel, xi: Iterable[float]) -> LevyModel:
    """Triplet of ``Z`` under the Esscher measure with parameter ``xi``.

    The tilted cumulant satisfies ``kappa_xi(v) = kappa(v + xi) - kappa(xi)``.

    Examples:
        >>> model = LevyModel(drift=(0.0, 0.0), covariance=((1.0, 0.0), (0.0, 1.0)))
        >>> esscher_tilt(model, (1.0, 0.0)).drift
        (1.0, 0.0)
    """
    xi = np.asarray(xi, dtype=float)
    if not np.any(xi):
        return model
    weights = np.exp(model.points @ xi)
    shift = model.c @ xi
    if model.has_jumps:
        shift = shift + (model.intensities * (weights - 1.0)) @ model.points
    atoms = tuple(
        (tuple(point), lam * w) for point, lam, w in zip(model.points, model.intensities, weights)
    )
    return replace(model, drift=tuple(model.b + shift), jump_atoms=atoms)


def project(model: LevyModel, u: Iterable[float]) -> UniTriplet:
    """Triplet of the one-dimensional process ``<u, Z>``.

    Atoms that project onto zero are kept with their intensities.

    Examples:
        >>> model = LevyModel.jump_diffusion(1.0, 2.0, 0.0, 0.0, 0.0, 0.3, 0.5, 2.0)
        >>> project(model, (1.0, 0.0))
        UniTriplet(drift=0.0, variance=1.0, jump_atoms=((0.3, 2.0),))
    """
    u = np.asarray(u, dtype=float)
    atoms = tuple(
        (float(point @ u), float(lam)) for point, lam in zip(model.points, model.intensities)
    )
    return UniTriplet(float(u @ model.b), float(u @ model.c @ u), atoms)


def exp_transform(t: UniTriplet) -> UniTriplet:
    """Triplet of the stochastic logarithm of ``exp(L)`` for ``L`` with triplet ``t``.

    Drift becomes ``kappa_t(1)``, the variance is unchanged and every atom
    ``x`` moves to ``exp(x) - 1``.

    Examples:
        >>> round(exp_transform(UniTriplet(0.1, 0.04)).drift, 12)
        0.12
    """
    atoms = tuple((float(np.expm1(x)), lam) for x, lam in t.jump_atoms)
    return UniTriplet(t.cumulant(1.0), t.variance, atoms)


def esscher_root(t_exp: UniTriplet) -> float:
    """Minimiser ``eta*`` of the strictly convex cumulant of ``t_exp``.

    :param t_exp: triplet with positive variance or at least one nonzero atom
    :raises Degenerate: the cumulant is affine
    :raises NoRoot: the derivative keeps its sign on every bracket tried
    :return: the unique zero of ``kappa'``

    Examples:
        >>> esscher_root(UniTriplet(0.5, 2.0))
        -0.25
        >>> esscher_root(UniTriplet(0.0, 1.0))
        0.0
    """
    if t_exp.is_affine:
        raise Degenerate(f"cumulant is affine (drift {t_exp.drift!r}), no minimiser")
    if not np.any(t_exp.points != 0.0):
        return -t_exp.drift / t_exp.variance + 0.0

    slope = saturate(t_exp.cumulant_derivative)
    curvature = saturate(t_exp.cumulant_second)

    try:
        bracket = expand_bracket(slope, -1.0, 1.0, max_doublings=60)
    except NoBracket as exc:
        raise NoRoot("cumulant derivative keeps its sign", exc.bracket) from exc
    root = bracketed_root(
        slope, bracket, xtol=ROOT_XTOL, dfdx=curvature, polish=ROOT_POLISH_STEPS
    )
    _logger.debug("esscher root %r (derivative %r)", root, slope(root))
    return root
