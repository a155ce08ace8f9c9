"""
Exceptions raised by commodeq.

Every error derives from :class:`CommodeqError`. Errors that reject an
argument also derive from :class:`ValueError`, so callers that only care
about bad input can keep catching the builtin.
"""

from typing import Optional, Tuple

__all__ = [
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


class CommodeqError(Exception):
    """Base class of all commodeq errors."""


class InvalidModel(CommodeqError, ValueError):
    """A Lévy triplet violates its invariants."""


class InvalidParams(CommodeqError, ValueError):
    """Market parameters violate their invariants."""


class AlphaOutOfRange(CommodeqError, ValueError):
    """Storage outside ``[0, pi0]``."""

    def __init__(self, alpha: float, pi0: float) -> None:
        super().__init__(f"storage alpha={alpha!r} outside [0, {pi0!r}]")
        self.alpha = alpha
        self.pi0 = pi0


class NoBracket(CommodeqError):
    """A monotone function showed no sign change on the widest bracket tried.

    :param message: human readable description
    :param bracket: the last interval that was evaluated
    """

    def __init__(self, message: str, bracket: Optional[Tuple[float, float]] = None) -> None:
        if bracket is not None:
            message = f"{message} (last bracket [{bracket[0]!r}, {bracket[1]!r}])"
        super().__init__(message)
        self.bracket = bracket


class NoRoot(NoBracket):
    """The derivative of an exponential-transform cumulant keeps its sign."""


class Degenerate(CommodeqError):
    """The cumulant is affine, so no unique minimiser exists."""


class NotConcave(CommodeqError):
    """Second-order conditions fail at a candidate optimum."""


class NoConvergence(CommodeqError):
    """A solver finished without meeting its residual tolerance."""

    def __init__(self, message: str, residual: float = float("nan")) -> None:
        super().__init__(f"{message} (residual {residual!r})")
        self.residual = residual


class NotBrownian(CommodeqError, ValueError):
    """A Brownian closed form was requested for a model with jumps."""


class DegenerateCorrelation(CommodeqError):
    """``|rho| = 1`` makes the effective risk aversion vanish."""


class ZeroVariance(CommodeqError):
    """The terminal spot price is deterministic."""


class ZeroSpot(CommodeqError, ZeroDivisionError):
    """A ratio needs a nonzero initial spot price."""


class ZeroForward(CommodeqError, ZeroDivisionError):
    """The forward premium needs a nonzero forward price."""


class DegenerateStorageCost(CommodeqError, ValueError):
    """The convenience yield divides by ``1 - eps``."""


class McOverflow(CommodeqError, OverflowError):
    """A Monte-Carlo certainty equivalent left the floating point range."""


class ConfigError(CommodeqError, ValueError):
    """A scenario file failed validation.

    :param field: dotted path of the offending entry, e.g. ``sweep[1].steps``
    :param message: what is wrong with it
    """

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field
