"""
Scalar root finding shared by the solvers.

All first-order conditions in this package reduce to a monotone function of a
single real variable: the derivative of a strictly convex cumulant, the
reduced producer condition, the investor's marginal utility and the market
clearing map. The routines here grow a bracket, or walk from a starting
point, until the function changes sign, hand the bracket to
:func:`scipy.optimize.brentq` and optionally polish the result with a few
Newton steps that are only accepted when they stay inside the bracket and
shrink the residual.
"""

import logging
from typing import Callable, Optional, Tuple, Type

import numpy as np
from scipy.optimize import brentq

from .errors import NoBracket

__all__ = [
    "Bracket",
    "expand_bracket",
    "walk_bracket",
    "bracketed_root",
    "newton_polish",
    "central_difference",
    "second_difference",
    "saturate",
]

_logger = logging.getLogger(__name__)

Bracket = Tuple[float, float, float, float]
"""``(lo, hi, f(lo), f(hi))`` with ``f(lo) * f(hi) <= 0``."""

ScalarFn = Callable[[float], float]

HUGE = 1e300


def expand_bracket(f: ScalarFn, lo: float, hi: float, *, max_doublings: int = 60) -> Bracket:
    """Grow ``[lo, hi]`` symmetrically about its centre until ``f`` changes sign.

    :param f: continuous scalar function
    :param lo: initial left end
    :param hi: initial right end, ``hi > lo``
    :param max_doublings: number of times the half-width may be doubled
    :raises NoBracket: no sign change up to the widest interval
    :return: the bracket together with the function values at its ends

    Examples:
        >>> lo, hi, flo, fhi = expand_bracket(lambda x: x - 5.0, -1.0, 1.0)
        >>> (lo, hi)
        (-8.0, 8.0)
        >>> flo < 0.0 < fhi
        True
    """
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    for count in range(max_doublings + 1):
        a, b = centre - half, centre + half
        fa, fb = f(a), f(b)
        if np.isnan(fa) or np.isnan(fb):
            raise NoBracket(f"undefined value f({a!r})={fa!r}, f({b!r})={fb!r}", (a, b))
        if fa == 0.0 or fb == 0.0 or (fa < 0.0) != (fb < 0.0):
            if count:
                _logger.debug("bracket [%r, %r] found after %d doublings", a, b, count)
            return a, b, fa, fb
        half *= 2.0
    raise NoBracket(f"no sign change after {max_doublings} doublings", (a, b))


def walk_bracket(
    f: ScalarFn,
    x0: float,
    step: float,
    *,
    decreasing: bool = True,
    max_steps: int = 120,
    tolerate: Tuple[Type[BaseException], ...] = (),
) -> Bracket:
    """Walk from ``x0`` towards the sign change of a monotone ``f``.

    Steps double while the sign holds. A step whose evaluation raises one of
    ``tolerate`` is treated as lying outside the domain: the walk retreats to
    half that step and never again goes further than the failed point.

    :param f: monotone scalar function
    :param x0: starting point; ``f(x0)`` is not guarded
    :param step: first step length, ``step > 0``
    :param decreasing: orientation of ``f``
    :param max_steps: number of trial points after ``x0``
    :param tolerate: exceptions that mark a trial point as unusable
    :raises NoBracket: no sign change within ``max_steps`` trial points
    :return: the ordered bracket together with the function values at its ends

    Examples:
        >>> walk_bracket(lambda x: 5.0 - x, 0.0, 1.0)
        (3.0, 7.0, 2.0, -2.0)
    """
    fa = f(x0)
    if np.isnan(fa):
        raise NoBracket(f"undefined value f({x0!r})={fa!r}", (x0, x0))
    if fa == 0.0:
        return x0, x0, fa, fa
    direction = 1.0 if (fa > 0.0) == decreasing else -1.0
    a, width = x0, step
    blocked: Optional[float] = None
    for _ in range(max_steps):
        b = a + direction * width
        try:
            fb = f(b)
        except tolerate as exc:
            _logger.debug("trial point %r rejected: %s", b, exc)
            blocked = width
            width *= 0.5
            continue
        if np.isnan(fb):
            raise NoBracket(f"undefined value f({b!r})={fb!r}", (a, b))
        if fb == 0.0 or (fa < 0.0) != (fb < 0.0):
            if b < a:
                return b, a, fb, fa
            return a, b, fa, fb
        a, fa = b, fb
        if blocked is None:
            width *= 2.0
        else:
            blocked -= width
            width = 0.5 * blocked
    raise NoBracket(f"no sign change within {max_steps} steps from {x0!r}", (x0, a))


def bracketed_root(
    f: ScalarFn,
    bracket: Bracket,
    *,
    xtol: float = 1e-13,
    rtol: float = 4.0 * np.finfo(float).eps,
    dfdx: Optional[ScalarFn] = None,
    polish: int = 0,
) -> float:
    """Root of ``f`` inside a sign-changing bracket.

    :param f: continuous scalar function
    :param bracket: result of :func:`expand_bracket` (or an equivalent tuple)
    :param xtol: absolute tolerance handed to ``brentq``
    :param rtol: relative tolerance handed to ``brentq``
    :param dfdx: derivative used for Newton polishing
    :param polish: maximal number of Newton polish steps
    :return: the root

    Examples:
        >>> root = bracketed_root(lambda x: x * x - 2.0, (0.0, 2.0, -2.0, 2.0))
        >>> abs(root - 2.0 ** 0.5) < 1e-12
        True
    """
    lo, hi, flo, fhi = bracket
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    root = float(brentq(f, lo, hi, xtol=xtol, rtol=rtol, maxiter=500))
    if dfdx is None or polish <= 0:
        return root
    return newton_polish(f, root, dfdx, (lo, hi), steps=polish)


def newton_polish(
    f: ScalarFn, x: float, dfdx: ScalarFn, interval: Tuple[float, float], *, steps: int = 1
) -> float:
    """Refine ``x`` by Newton steps that stay in ``interval`` and shrink ``|f|``.

    A step that fails either condition ends the refinement.

    Examples:
        >>> newton_polish(lambda x: x - 1.0, 0.5, lambda x: 1.0, (0.0, 2.0))
        1.0
    """
    lo, hi = interval
    fx = f(x)
    for _ in range(steps):
        slope = dfdx(x)
        if fx == 0.0 or slope == 0.0 or not np.isfinite(slope):
            break
        candidate = x - fx / slope
        if not lo <= candidate <= hi:
            break
        fcand = f(candidate)
        if not abs(fcand) < abs(fx):
            break
        x, fx = candidate, fcand
    return x


def central_difference(f: ScalarFn, x: float, step: float) -> float:
    """Symmetric first difference ``(f(x+h) - f(x-h)) / 2h``."""
    return (f(x + step) - f(x - step)) / (2.0 * step)


def second_difference(f: ScalarFn, x: float, step: float) -> float:
    """Symmetric second difference ``(f(x+h) - 2f(x) + f(x-h)) / h**2``."""
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step)


def saturate(f: ScalarFn) -> ScalarFn:
    """Wrap ``f`` so that overflowing exponentials come back as ``+-1e300``.

    The sign of a monotone derivative is all a bracketing method needs, and
    finite values keep ``brentq``'s interpolation steps well defined.

    Examples:
        >>> import math
        >>> saturate(lambda x: math.inf)(0.0)
        1e+300
    """

    def wrapped(x: float) -> float:
        with np.errstate(over="ignore", invalid="ignore"):
            value = f(x)
        return float(np.clip(value, -HUGE, HUGE))

    return wrapped
