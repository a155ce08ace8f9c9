"""
Command Line Interface

``commodeq`` reads a scenario file (see :mod:`commodeq.scenario`) and runs
one of three commands::

    commodeq solve scenario.json [--format csv|json]
    commodeq sweep scenario.json --out results/ [--svg] [--jobs N]
    commodeq oracle-check scenario.json --samples 1000000 --seed 7

``solve`` clears the market at the scenario's base point, ``sweep`` walks
the sweep grid and writes one row per point, ``oracle-check`` compares the
analytic equilibrium with Monte-Carlo utilities and the grid oracle.
Numerical failures are logged and turn into exit status 1 (``solve``,
``oracle-check``) or into the ``error`` column of a sweep row.
"""

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from . import __version__
from .equilibrium import solve, solve_no_forward
from .errors import CommodeqError
from .oracle import (
    GridConfig,
    McConfig,
    investor_mc_utility,
    oracle_equilibrium,
    producer_mc_utility,
)
from .plotting import plot_sweep
from .scenario import Point, Scenario, load_scenario

__author__ = "commodeq developers"
__license__ = "MIT"

_logger = logging.getLogger(__name__)

LOG_FORMAT = "[%(asctime)s] %(levelname)s:%(name)s:%(message)s"
MC_SIGMAS = 3.0

Row = Dict[str, Any]


# ---- Rows ----


def _axis_value(value: Optional[float]) -> Optional[float]:
    if value is None or math.isnan(value):
        return None
    return float(value)


def solve_row(scenario: Scenario, point: Point) -> Row:
    """Equilibrium quantities at one grid point.

    Package errors and the ``RuntimeError`` or ``ValueError`` that scipy
    raises on convergence trouble are caught and stored as
    ``"ExceptionName: message"`` in the ``error`` entry; quantities computed
    before the failure are kept.
    """
    row: Row = {"axis1": _axis_value(point[0]), "axis2": _axis_value(point[1])}
    row.update({column: None for column in scenario.outputs})
    row["error"] = ""
    try:
        params, model = scenario.point(scenario.overrides(point))
        eq = solve(params, model, scenario.model_kind)
        values = {
            "alpha": eq.alpha,
            "h": eq.h,
            "F": eq.forward_price,
            "P0": eq.spot_price,
            "E_PT": eq.expected_spot,
            "premium": eq.forward_premium,
            "yield": eq.convenience_yield,
            "price_change": eq.expected_price_change,
            "hedge_fraction": eq.hedge_fraction,
        }
        row.update({k: v for k, v in values.items() if k in scenario.outputs})
        if scenario.include_no_forward:
            bench = solve_no_forward(params, model)
            values = {"alpha_nf": bench.alpha, "price_change_nf": bench.expected_price_change}
            row.update({k: v for k, v in values.items() if k in scenario.outputs})
    except (CommodeqError, RuntimeError, ValueError) as exc:
        _logger.warning("point %r failed: %s", point, exc)
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def sweep_rows(scenario: Scenario, jobs: int = 1) -> List[Row]:
    """Solve every grid point, in grid order."""
    points = scenario.grid()
    _logger.info("solving %d grid points with %d job(s)", len(points), jobs)
    if jobs <= 1:
        return [solve_row(scenario, p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(partial(solve_row, scenario), points))


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    value = float(value)
    return "" if math.isnan(value) else repr(value)


def format_csv(rows: Sequence[Row], outputs: Sequence[str]) -> str:
    """CSV text with header ``axis1,axis2,<outputs>,error`` and LF line ends.

    Floats are written with ``repr`` so they read back bit for bit.

    Examples:
        >>> print(format_csv([{"axis1": 0.5, "axis2": None, "F": 1.25, "error": ""}], ["F"]), end="")
        axis1,axis2,F,error
        0.5,,1.25,
    """
    header = ["axis1", "axis2", *outputs, "error"]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in header])
    return buffer.getvalue()


def _json_value(value: Any) -> Any:
    if isinstance(value, str) or value is None:
        return value
    value = float(value)
    return value if math.isfinite(value) else None


def format_json(rows: Sequence[Row], outputs: Sequence[str]) -> str:
    """JSON list of row objects; non-finite numbers become ``null``."""
    header = ["axis1", "axis2", *outputs, "error"]
    data = [{column: _json_value(row.get(column)) for column in header} for row in rows]
    return json.dumps(data, indent=2) + "\n"


def _render(rows: Sequence[Row], outputs: Sequence[str], fmt: str) -> str:
    return format_json(rows, outputs) if fmt == "json" else format_csv(rows, outputs)


# ---- Commands ----


def cmd_solve(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    row = solve_row(scenario, (math.nan, None))
    sys.stdout.write(_render([row], scenario.outputs, args.format))
    if row["error"]:
        _logger.error("%s", row["error"])
        return 1
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    rows = sweep_rows(scenario, args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = Path(args.scenario).stem
    target = out / f"{stem}.{args.format}"
    with target.open("w", encoding="utf-8", newline="\n") as stream:
        stream.write(_render(rows, scenario.outputs, args.format))
    _logger.info("wrote %s", target)
    if args.svg or scenario.svg:
        names = [axis.parameter for axis in scenario.sweep]
        plot_sweep(rows, names, scenario.outputs, out / f"{stem}.svg")
    failed = sum(1 for row in rows if row["error"])
    if failed:
        _logger.warning("%d of %d grid points failed", failed, len(rows))
    print(target)
    return 0


def _report(name: str, analytic: float, estimate: float, tolerance: float) -> bool:
    ok = abs(analytic - estimate) <= tolerance
    status = "ok" if ok else "FAIL"
    print(f"{name:<24} analytic={analytic!r} oracle={estimate!r} tol={tolerance!r} {status}")
    return ok


def cmd_oracle_check(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    params, model = scenario.point({})
    eq = solve(params, model, scenario.model_kind)
    cfg = McConfig(n_samples=args.samples, seed=args.seed, antithetic=args.antithetic)

    prod = producer_mc_utility(params, model, eq.alpha, eq.h, eq.forward_price, cfg)
    inv = investor_mc_utility(params, model, eq.alpha, -eq.h, eq.forward_price, cfg)
    grid = oracle_equilibrium(params, model, GridConfig(forward_steps=args.forward_steps))

    checks = [
        _report(
            "producer utility", eq.producer_utility, prod.value, MC_SIGMAS * prod.std_error
        ),
        _report(
            "investor utility", eq.investor_utility, inv.value, MC_SIGMAS * inv.std_error
        ),
        _report("forward price", eq.forward_price, grid.forward_price, grid.forward_step),
    ]
    if not all(checks):
        _logger.error("oracle check failed")
        return 1
    return 0


# ---- CLI ----


def parse_args(args: Sequence[str]) -> argparse.Namespace:
    """Parse command line parameters

    Args:
      args (List[str]): command line parameters as list of strings
          (for example  ``["--help"]``).

    Returns:
      :obj:`argparse.Namespace`: command line parameters namespace
    """
    parser = argparse.ArgumentParser(
        prog="commodeq", description="Commodity forward market equilibrium solver"
    )
    parser.add_argument("--version", action="version", version=f"commodeq {__version__}")
    parser.add_argument(
        "-v",
        "--verbose",
        dest="loglevel",
        help="set loglevel to INFO",
        action="store_const",
        const=logging.INFO,
        default=logging.WARNING,
    )
    parser.add_argument(
        "-vv",
        "--very-verbose",
        dest="loglevel",
        help="set loglevel to DEBUG",
        action="store_const",
        const=logging.DEBUG,
    )
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, func: Any, summary: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=summary)
        sub.add_argument("scenario", help="scenario JSON file")
        sub.add_argument("--format", choices=("csv", "json"), default="csv")
        sub.set_defaults(func=func)
        return sub

    command("solve", cmd_solve, "clear the market at the scenario's base point")

    sweep = command("sweep", cmd_sweep, "solve every point of the scenario's sweep")
    sweep.add_argument("--out", required=True, help="output directory")
    sweep.add_argument("--svg", action="store_true", help="also draw an SVG chart")
    sweep.add_argument("--jobs", type=int, default=1, help="worker processes")

    check = command("oracle-check", cmd_oracle_check, "compare with brute-force oracles")
    check.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo draws")
    check.add_argument("--seed", type=int, default=0, help="Monte-Carlo seed")
    check.add_argument("--antithetic", action="store_true", help="antithetic Gaussian draws")
    check.add_argument("--forward-steps", type=int, default=101, help="forward price grid points")
    return parser.parse_args(args)


def setup_logging(loglevel: int) -> None:
    """Setup basic logging

    Args:
      loglevel (int): minimum loglevel for emitting messages
    """
    logging.basicConfig(
        level=loglevel, stream=sys.stderr, format=LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"
    )


def main(args: Sequence[str]) -> int:
    """Run the command given on the command line and return the exit status.

    Args:
      args (List[str]): command line parameters as list of strings
    """
    parsed = parse_args(args)
    setup_logging(parsed.loglevel)
    try:
        return parsed.func(parsed)
    except (CommodeqError, OSError) as exc:
        _logger.error("%s: %s", type(exc).__name__, exc)
        return 1


def run() -> None:
    """Calls :func:`main` passing the CLI arguments extracted from :obj:`sys.argv`

    This function can be used as entry point to create console scripts with setuptools.
    """
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    run()
