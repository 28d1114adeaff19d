"""JSON and CSV wire formats.

One parsing/serialization path shared by the CLI and the HTTP service, so
identical inputs produce bit-identical numbers on both surfaces. Schema
errors raise ConfigError; numerical-precondition failures bubble up as
EngineError with their stable codes.

Formats:
  grid   {"lo": 0.2, "hi": 5.0, "n": 1001, "spacing": "log"}
  market {"family": "lognormal", "params": {"mu": 0.0, "sigma": 0.2}}
         {"family": "mixture", "components": [{"family": ..., "params": ..., "weight": ...}, ...]}
  views  [{"type": "vol", "target_sigma": 0.15},
          {"type": "ratio", "believed": {market spec}},
          {"type": "window", "a": 0.8, "b": 1.25, "of": {view spec}},
          {"type": "table", "x": [...], "values": [...]}]
  risk   2.0 | {"kind": "constant", "R": 2.0}
         | {"kind": "affine", "intercept": 1.0, "slope": 1.0}   (R(F) = intercept + slope*F)
  payoff CSV with header; columns x and F (extra columns ignored), 17
         significant digits so files round-trip losslessly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analytics import kl_divergence
from .errors import ConfigError, EngineError
from .grids import Density, Grid, density_from_params, make_grid, moments
from .structuring import Payoff, design, implied_views
from .utility import RiskProfile, Utility, crra_utility
from .views import Likelihood, view_table, view_vol, view_windowed, likelihood_between

DEFAULT_GRID_SPEC = {"lo": 0.2, "hi": 5.0, "n": 1001, "spacing": "log"}
DEFAULT_RISK_SPEC = 1.0
_FMT = "%.17g"


def _require_mapping(obj, what: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{what} must be a JSON object, got {type(obj).__name__}")
    return obj


def _number(obj, what: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigError(f"{what} must be a number, got {obj!r}")
    return float(obj)


def parse_grid_spec(spec) -> Grid:
    spec = _require_mapping(spec, "grid spec")
    try:
        lo = _number(spec["lo"], "grid.lo")
        hi = _number(spec["hi"], "grid.hi")
        n = spec["n"]
    except KeyError as missing:
        raise ConfigError(f"grid spec is missing {missing}") from None
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"grid.n must be an integer, got {n!r}")
    spacing = spec.get("spacing", "linear")
    if spacing not in ("linear", "lin", "log", "logarithmic"):
        raise ConfigError(f"grid.spacing must be linear or log, got {spacing!r}")
    return make_grid(lo, hi, n, spacing)


def parse_density_spec(spec, grid: Grid) -> Density:
    spec = _require_mapping(spec, "density spec")
    family = spec.get("family")
    if family in ("normal", "lognormal"):
        params = _require_mapping(spec.get("params"), f"{family} params")
        return density_from_params(family, params, grid)
    if family == "mixture":
        comps = spec.get("components")
        if not isinstance(comps, list):
            raise ConfigError("mixture spec needs a components list")
        for comp in comps:
            _require_mapping(comp, "mixture component")
        return density_from_params("mixture", {"components": comps}, grid)
    raise ConfigError(f"unknown density family {family!r}")


def parse_view_spec(spec, market: Density, grid: Grid) -> Likelihood:
    spec = _require_mapping(spec, "view spec")
    kind = spec.get("type")
    if kind == "vol":
        return view_vol(market, _number(spec.get("target_sigma"), "vol view target_sigma"), grid)
    if kind == "ratio":
        believed = parse_density_spec(spec.get("believed"), grid)
        return likelihood_between(believed, market)
    if kind == "window":
        inner = parse_view_spec(spec.get("of"), market, grid)
        return view_windowed(inner, _number(spec.get("a"), "window a"), _number(spec.get("b"), "window b"))
    if kind == "table":
        xs, vs = spec.get("x"), spec.get("values")
        if not isinstance(xs, list) or not isinstance(vs, list):
            raise ConfigError("table view needs x and values lists")
        return view_table(xs, vs, grid)
    raise ConfigError(f"unknown view type {kind!r}")


def parse_views_spec(spec, market: Density, grid: Grid) -> list[Likelihood]:
    if spec is None:
        return []
    if not isinstance(spec, list):
        raise ConfigError(f"views spec must be a JSON list, got {type(spec).__name__}")
    return [parse_view_spec(item, market, grid) for item in spec]


def parse_risk_spec(spec) -> RiskProfile:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return RiskProfile.constant(float(spec))
    spec = _require_mapping(spec, "risk spec")
    kind = spec.get("kind")
    if kind == "constant":
        return RiskProfile.constant(_number(spec.get("R"), "risk R"))
    if kind == "affine":
        a = _number(spec.get("intercept"), "risk intercept")
        b = _number(spec.get("slope"), "risk slope")
        if a < 0 or b < 0 or a + b <= 0:
            raise ConfigError("affine risk needs intercept >= 0, slope >= 0, not both zero")
        return RiskProfile.wealth_dependent(
            lambda F: a + b * F, label=f"affine R(F)={a:g}+{b:g}*F"
        )
    raise ConfigError(f"unknown risk kind {kind!r}")


def parse_utility_spec(spec) -> Utility:
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return crra_utility(float(spec))
    spec = _require_mapping(spec, "utility spec")
    kind = spec.get("kind")
    if kind == "crra":
        return crra_utility(_number(spec.get("R"), "utility R"))
    if kind == "log":
        return crra_utility(1.0)
    raise ConfigError(f"unknown utility kind {kind!r}")


def run_design(config: dict) -> dict:
    """Execute a design request; returns wire-ready arrays and diagnostics."""
    config = _require_mapping(config, "design config")
    grid = parse_grid_spec(config.get("grid", DEFAULT_GRID_SPEC))
    if "market" not in config:
        raise ConfigError("design config needs a market spec")
    market = parse_density_spec(config["market"], grid)
    views = parse_views_spec(config.get("views", []), market, grid)
    risk = parse_risk_spec(config.get("risk", DEFAULT_RISK_SPEC))
    result = design(market, views, risk)
    return {
        "x": grid.points.tolist(),
        "f": result.growth.values.tolist(),
        "F": result.final.values.tolist(),
        "b": result.believed.values.tolist(),
        "m": market.values.tolist(),
        "diagnostics": result.diagnostics,
    }


def run_implied(config: dict) -> dict:
    """Execute a reverse (implied views) request from payoff samples."""
    config = _require_mapping(config, "implied config")
    grid = parse_grid_spec(config.get("grid", DEFAULT_GRID_SPEC))
    if "market" not in config:
        raise ConfigError("implied config needs a market spec")
    market = parse_density_spec(config["market"], grid)
    risk = parse_risk_spec(config.get("risk", DEFAULT_RISK_SPEC))
    payoff_spec = _require_mapping(config.get("payoff"), "payoff spec")
    xs = payoff_spec.get("x")
    Fs = payoff_spec.get("F")
    if not isinstance(xs, list) or not isinstance(Fs, list) or len(xs) != len(Fs) or not xs:
        raise ConfigError("payoff spec needs matching x and F lists")
    payoff = payoff_on_grid(np.asarray(xs, dtype=float), np.asarray(Fs, dtype=float), grid)
    believed = implied_views(payoff, risk, market)
    mean, variance, skewness = moments(believed)
    return {
        "x": grid.points.tolist(),
        "b": believed.values.tolist(),
        "summary": {
            "moments": {"mean": mean, "variance": variance, "skewness": skewness},
            "kl_from_market": kl_divergence(believed, market),
        },
    }


def payoff_on_grid(xs: np.ndarray, values: np.ndarray, grid: Grid) -> Payoff:
    """Payoff samples aligned onto the grid (linear interpolation if needed)."""
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(values))):
        raise ConfigError("payoff samples must be finite")
    if xs.size == grid.n and np.allclose(xs, grid.points, rtol=1e-12, atol=0):
        return Payoff(grid, values)
    if np.any(np.diff(xs) <= 0):
        raise ConfigError("payoff x samples must be strictly increasing")
    return Payoff(grid, np.interp(grid.points, xs, values))


# ---------------------------------------------------------------------------
# CSV files


def write_columns_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in zip(*columns):
            writer.writerow([_FMT % cell for cell in row])


def read_columns_csv(path: Path, required: list[str]) -> dict[str, np.ndarray]:
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            try:
                header = next(reader)
            except StopIteration:
                raise ConfigError(f"{path}: empty CSV") from None
            rows = list(reader)
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from None
    missing = [name for name in required if name not in header]
    if missing:
        raise ConfigError(f"{path}: missing CSV columns {missing}, header is {header}")
    if not rows:
        raise ConfigError(f"{path}: no data rows")
    try:
        data = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as err:
        raise ConfigError(f"{path}: non-numeric CSV cell ({err})") from None
    if data.shape[1] != len(header):
        raise ConfigError(f"{path}: ragged CSV rows")
    return {name: data[:, header.index(name)] for name in required}


def read_payoff_csv(path: Path) -> tuple[np.ndarray, np.ndarray]:
    cols = read_columns_csv(path, ["x", "F"])
    return cols["x"], cols["F"]


def dump_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
