"""
Scenario Files

A scenario is a JSON document that fixes a market, a factor model and up to
two sweep axes::

    {
      "name": "producer risk aversion",
      "market": {"mu": 200, "m": 1, "pi0": 100, "pi_t": 100, "eps": 0.05,
                 "rate": 0.01, "gamma_p": 0.04, "gamma_s": 0.004},
      "model": {"kind": "brownian", "horizon": 0.25, "sigma1": 0.2,
                "sigma2": 10, "rho": 0.0, "lambda_mpr": 0.3},
      "sweep": [{"parameter": "rho", "from": -0.9, "to": 0.9, "steps": 7},
                {"parameter": "gamma_p", "values": [0.02, 0.04, 0.08]}],
      "include_no_forward": false
    }

Unknown keys are rejected with a :class:`~commodeq.errors.ConfigError`
naming the dotted path of the offending entry. Any scalar market or model
field may be swept; a name is looked up among the market fields first.
The legacy hedge is swept through ``legacy_position`` and ``legacy_strike``;
the one not swept keeps its value from ``market.legacy_hedge`` (zero when the
market has none).
"""

import json
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .equilibrium import ModelKind
from .errors import ConfigError, InvalidModel, InvalidParams
from .levy_models import LevyModel
from .market_core import LegacyHedge, MarketParams

__all__ = [
    "MARKET_FIELDS",
    "LEGACY_FIELDS",
    "MODEL_FIELDS",
    "OUTPUT_COLUMNS",
    "DEFAULT_OUTPUTS",
    "SweepAxis",
    "Scenario",
    "parse_scenario",
    "load_scenario",
    "build_model",
]

MARKET_FIELDS = ("mu", "m", "pi0", "pi_t", "eps", "rate", "gamma_p", "gamma_s")
MARKET_REQUIRED = ("mu", "m", "pi0", "pi_t")
LEGACY_FIELDS = ("legacy_position", "legacy_strike")

MODEL_FIELDS: Dict[ModelKind, Tuple[str, ...]] = {
    ModelKind.BROWNIAN: ("horizon", "sigma1", "sigma2", "rho", "lambda_mpr"),
    ModelKind.JUMP_DIFFUSION: (
        "horizon",
        "sigma1",
        "sigma2",
        "rho",
        "drift1",
        "drift2",
        "eta1",
        "eta2",
        "intensity",
    ),
}
MODEL_REQUIRED: Dict[ModelKind, Tuple[str, ...]] = {
    ModelKind.BROWNIAN: ("sigma1", "sigma2", "rho"),
    ModelKind.JUMP_DIFFUSION: ("sigma1", "sigma2", "rho", "drift1"),
}

OUTPUT_COLUMNS = (
    "alpha",
    "h",
    "F",
    "P0",
    "E_PT",
    "premium",
    "yield",
    "price_change",
    "alpha_nf",
    "price_change_nf",
    "hedge_fraction",
)
DEFAULT_OUTPUTS = (
    "alpha",
    "h",
    "F",
    "P0",
    "E_PT",
    "premium",
    "yield",
    "price_change",
    "alpha_nf",
)

Point = Tuple[float, Optional[float]]


@dataclass(frozen=True)
class SweepAxis:
    """A swept parameter and the values it takes, in order."""

    parameter: str
    values: Tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    """Validated content of a scenario file."""

    market: MarketParams
    model_kind: ModelKind
    model_params: Mapping[str, float] = field(hash=False)
    sweep: Tuple[SweepAxis, ...] = ()
    outputs: Tuple[str, ...] = DEFAULT_OUTPUTS
    include_no_forward: bool = False
    svg: bool = False
    name: str = ""

    def model(self, **overrides: float) -> LevyModel:
        """Factor model with some model fields replaced."""
        return build_model(self.model_kind, {**self.model_params, **overrides})

    def point(self, overrides: Mapping[str, float]) -> Tuple[MarketParams, LevyModel]:
        """Market and model at one sweep point.

        :raises InvalidParams: the overridden market is invalid
        :raises InvalidModel: the overridden model is invalid
        """
        market_changes: Dict[str, Any] = {k: v for k, v in overrides.items() if k in MARKET_FIELDS}
        if any(k in overrides for k in LEGACY_FIELDS):
            market_changes["legacy_hedge"] = LegacyHedge(
                overrides.get("legacy_position", self.market.legacy_position),
                overrides.get("legacy_strike", self.market.legacy_strike),
            )
        market_fields = MARKET_FIELDS + LEGACY_FIELDS
        model_changes = {k: v for k, v in overrides.items() if k not in market_fields}
        return self.market.replace(**market_changes), self.model(**model_changes)

    def grid(self) -> List[Point]:
        """Sweep points ``(axis1, axis2)`` with axis 1 varying slowest.

        A scenario without sweep has the single point ``(nan, None)``.
        """
        if not self.sweep:
            return [(float("nan"), None)]
        if len(self.sweep) == 1:
            return [(v, None) for v in self.sweep[0].values]
        return list(product(self.sweep[0].values, self.sweep[1].values))

    def overrides(self, point: Point) -> Dict[str, float]:
        """Parameter changes of a grid point."""
        changes: Dict[str, float] = {}
        for axis, value in zip(self.sweep, point):
            if value is not None:
                changes[axis.parameter] = value
        return changes


def build_model(kind: Union[ModelKind, str], values: Mapping[str, float]) -> LevyModel:
    """Factor model of the given kind from scenario fields.

    :raises InvalidModel: values violate the model invariants
    """
    kind = ModelKind(kind)
    horizon = values.get("horizon", 1.0)
    if kind is ModelKind.BROWNIAN:
        return LevyModel.brownian(
            values["sigma1"],
            values["sigma2"],
            values["rho"],
            values.get("lambda_mpr", 0.0),
            horizon,
        )
    return LevyModel.jump_diffusion(
        values["sigma1"],
        values["sigma2"],
        values["rho"],
        values["drift1"],
        values.get("drift2", 0.0),
        values.get("eta1", 0.0),
        values.get("eta2", 0.0),
        values.get("intensity", 0.0),
        horizon,
    )


def _object(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ConfigError(path, f"expected a finite number, got {value!r}")
    return value


def _keys(data: Mapping[str, Any], allowed: Sequence[str], required: Sequence[str], path: str) -> None:
    prefix = f"{path}." if path else ""
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{prefix}{key}", "unknown key")
    for key in required:
        if key not in data:
            raise ConfigError(f"{prefix}{key}", "missing required key")


def _parse_market(data: Any) -> MarketParams:
    data = _object(data, "market")
    _keys(data, MARKET_FIELDS + ("legacy_hedge",), MARKET_REQUIRED, "market")
    values = {k: _number(v, f"market.{k}") for k, v in data.items() if k != "legacy_hedge"}
    hedge = None
    if data.get("legacy_hedge") is not None:
        raw = _object(data["legacy_hedge"], "market.legacy_hedge")
        _keys(raw, ("position", "strike"), ("position", "strike"), "market.legacy_hedge")
        hedge = LegacyHedge(
            _number(raw["position"], "market.legacy_hedge.position"),
            _number(raw["strike"], "market.legacy_hedge.strike"),
        )
    try:
        return MarketParams(legacy_hedge=hedge, **values)
    except InvalidParams as exc:
        raise ConfigError("market", str(exc)) from exc


def _parse_model(data: Any) -> Tuple[ModelKind, Dict[str, float]]:
    data = _object(data, "model")
    if "kind" not in data:
        raise ConfigError("model.kind", "missing required key")
    try:
        kind = ModelKind(data["kind"])
    except ValueError as exc:
        kinds = ", ".join(k.value for k in ModelKind)
        raise ConfigError("model.kind", f"expected one of {kinds}, got {data['kind']!r}") from exc
    _keys(data, ("kind",) + MODEL_FIELDS[kind], MODEL_REQUIRED[kind], "model")
    values = {k: _number(v, f"model.{k}") for k, v in data.items() if k != "kind"}
    try:
        build_model(kind, values)
    except InvalidModel as exc:
        raise ConfigError("model", str(exc)) from exc
    return kind, values


def _parse_axis(data: Any, path: str, sweepable: Sequence[str]) -> SweepAxis:
    data = _object(data, path)
    _keys(data, ("parameter", "from", "to", "steps", "values"), ("parameter",), path)
    name = data["parameter"]
    if name not in sweepable:
        raise ConfigError(f"{path}.parameter", f"cannot sweep {name!r}")
    if "values" in data:
        if any(k in data for k in ("from", "to", "steps")):
            raise ConfigError(path, "give either values or from/to/steps")
        raw = data["values"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError(f"{path}.values", "expected a nonempty list")
        values = tuple(_number(v, f"{path}.values[{i}]") for i, v in enumerate(raw))
        return SweepAxis(name, values)
    for key in ("from", "to", "steps"):
        if key not in data:
            raise ConfigError(f"{path}.{key}", "missing required key")
    steps = data["steps"]
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise ConfigError(f"{path}.steps", f"expected an integer of at least 2, got {steps!r}")
    start, stop = _number(data["from"], f"{path}.from"), _number(data["to"], f"{path}.to")
    return SweepAxis(name, tuple(float(v) for v in np.linspace(start, stop, steps)))


def parse_scenario(data: Any) -> Scenario:
    """Validate a decoded scenario document.

    :raises ConfigError: with the dotted path of the first offending entry
    """
    data = _object(data, "")
    allowed = ("name", "market", "model", "sweep", "outputs", "include_no_forward", "svg")
    _keys(data, allowed, ("market", "model"), "")
    market = _parse_market(data["market"])
    kind, model_values = _parse_model(data["model"])

    sweepable = MARKET_FIELDS + LEGACY_FIELDS + MODEL_FIELDS[kind]
    raw_sweep = data.get("sweep", [])
    if not isinstance(raw_sweep, list):
        raise ConfigError("sweep", "expected a list of axes")
    if len(raw_sweep) > 2:
        raise ConfigError("sweep", f"at most two axes, got {len(raw_sweep)}")
    sweep = tuple(_parse_axis(a, f"sweep[{i}]", sweepable) for i, a in enumerate(raw_sweep))
    if len(sweep) == 2 and sweep[0].parameter == sweep[1].parameter:
        raise ConfigError("sweep[1].parameter", "both axes sweep the same parameter")

    outputs = data.get("outputs", list(DEFAULT_OUTPUTS))
    if not isinstance(outputs, list) or not outputs:
        raise ConfigError("outputs", "expected a nonempty list of column names")
    for i, name in enumerate(outputs):
        if name not in OUTPUT_COLUMNS:
            raise ConfigError(f"outputs[{i}]", f"unknown column {name!r}")

    flags = {}
    for key in ("include_no_forward", "svg"):
        value = data.get(key, False)
        if not isinstance(value, bool):
            raise ConfigError(key, f"expected true or false, got {value!r}")
        flags[key] = value
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ConfigError("name", f"expected a string, got {name!r}")

    return Scenario(
        market=market,
        model_kind=kind,
        model_params=model_values,
        sweep=sweep,
        outputs=tuple(c for c in OUTPUT_COLUMNS if c in outputs),
        name=name,
        **flags,
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Read and validate a UTF-8 JSON scenario file.

    :raises ConfigError: the file is not valid JSON or fails validation
    :raises OSError: the file cannot be read
    """
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return parse_scenario(data)
