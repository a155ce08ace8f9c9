"""
Sweep Plots

Static SVG line charts of sweep results: one panel per output quantity
against the first sweep axis, one line per value of the second axis.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_sweep"]

_logger = logging.getLogger(__name__)

LABELS = {
    "alpha": "storage",
    "h": "producer forward position",
    "F": "forward price",
    "P0": "spot price at 0",
    "E_PT": "expected spot price at T",
    "premium": "forward premium",
    "yield": "convenience yield",
    "price_change": "expected price change",
    "alpha_nf": "storage without forward",
    "price_change_nf": "expected price change without forward",
    "hedge_fraction": "hedge fraction",
}


def _as_float(value: Any) -> float:
    if value is None or value == "":
        return math.nan
    return float(value)


def _series(
    rows: Sequence[Mapping[str, Any]], column: str
) -> Dict[Optional[float], Tuple[List[float], List[float]]]:
    lines: Dict[Optional[float], Tuple[List[float], List[float]]] = {}
    for row in rows:
        key = row.get("axis2")
        xs, ys = lines.setdefault(None if key is None else _as_float(key), ([], []))
        xs.append(_as_float(row["axis1"]))
        ys.append(_as_float(row.get(column)))
    return lines


def plot_sweep(
    rows: Sequence[Mapping[str, Any]],
    axis_names: Sequence[str],
    outputs: Sequence[str],
    path: Union[str, Path],
) -> Path:
    """Write the sweep ``rows`` as an SVG figure.

    :param rows: mappings with keys ``axis1``, ``axis2`` and the output columns;
        failed points carry ``nan`` or an empty value and leave a gap
    :param axis_names: names of the swept parameters
    :param outputs: columns to draw, one panel each
    :param path: target file; the suffix is forced to ``.svg``
    :return: the written path
    """
    path = Path(path).with_suffix(".svg")
    columns = [c for c in outputs if c != "error"]
    ncols = min(len(columns), 3) or 1
    nrows = max(math.ceil(len(columns) / ncols), 1)
    fig, axes = plt.subplots(nrows, ncols, figsize=(4.5 * ncols, 3.5 * nrows), squeeze=False)
    xlabel = axis_names[0] if axis_names else "point"
    legend_name = axis_names[1] if len(axis_names) > 1 else None

    for ax, column in zip(axes.flat, columns):
        for key, (xs, ys) in _series(rows, column).items():
            label = None if key is None else f"{legend_name} = {key:g}"
            ax.plot(xs, ys, marker="o", markersize=3, label=label)
        ax.set_xlabel(xlabel)
        ax.set_title(LABELS.get(column, column))
        ax.grid(True, alpha=0.3)
        if legend_name is not None:
            ax.legend(fontsize="small")
    for ax in list(axes.flat)[len(columns):]:
        ax.set_visible(False)

    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg")
    plt.close(fig)
    _logger.info("wrote %s", path)
    return path
