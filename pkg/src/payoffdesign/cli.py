"""Command-line entry points.

Subcommands: design, implied, compare, serve. Option precedence is
flags > config file > defaults; the config file format is identical to the
workbench's exported workspace and to the /api/design request body.

Exit codes: 0 success, 2 config/parse failure, 3 numerical failure (the
engine's error code is printed to stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .analytics import compare as compare_products
from .analytics import format_report
from .errors import ConfigError, EngineError
from .specs import (
    DEFAULT_GRID_SPEC,
    DEFAULT_RISK_SPEC,
    dump_json,
    parse_density_spec,
    parse_grid_spec,
    parse_utility_spec,
    parse_views_spec,
    payoff_on_grid,
    read_payoff_csv,
    run_design,
    run_implied,
    write_columns_csv,
)
from .views import bayes_update, compose

log = logging.getLogger(__name__)

_DESIGN_DEFAULTS = {
    "grid": DEFAULT_GRID_SPEC,
    "views": [],
    "risk": DEFAULT_RISK_SPEC,
}


def _json_flag(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"--{what} is not valid JSON: {err}")


def _views_flag(text: str):
    """A views flag holds either inline JSON (starts with '[') or a file path."""
    stripped = text.strip()
    if stripped.startswith("["):
        return _json_flag(stripped, "views")
    path = Path(text)
    try:
        return json.loads(path.read_text())
    except OSError as err:
        raise ConfigError(f"cannot read views file {text}: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"views file {text} is not valid JSON: {err}")


def _risk_flag(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        raise ConfigError(f"--risk must be a number or JSON object, got {text!r}")


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        loaded = json.loads(Path(path).read_text())
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config {path} is not valid JSON: {err}")
    if not isinstance(loaded, dict):
        raise ConfigError("config file must hold a JSON object")
    return loaded


def _merged_config(args, defaults: dict) -> dict:
    config = dict(defaults)
    config.update(_load_config(args.config))
    if args.grid is not None:
        config["grid"] = _json_flag(args.grid, "grid")
    if args.market is not None:
        config["market"] = _json_flag(args.market, "market")
    if getattr(args, "views", None) is not None:
        config["views"] = _views_flag(args.views)
    if getattr(args, "risk", None) is not None:
        config["risk"] = _risk_flag(args.risk)
    return config


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_design(args) -> int:
    config = _merged_config(args, _DESIGN_DEFAULTS)
    result = run_design(config)
    out = _out_dir(args)
    x = np.asarray(result["x"])
    write_columns_csv(
        out / "payoff.csv", ["x", "f", "F"], [x, np.asarray(result["f"]), np.asarray(result["F"])]
    )
    write_columns_csv(out / "believed.csv", ["x", "b"], [x, np.asarray(result["b"])])
    dump_json(out / "diagnostics.json", result["diagnostics"])
    log.info("design written to %s", out)
    return 0


def cmd_implied(args) -> int:
    config = _merged_config(args, _DESIGN_DEFAULTS)
    xs, Fs = read_payoff_csv(Path(args.payoff))
    config["payoff"] = {"x": xs.tolist(), "F": Fs.tolist()}
    result = run_implied(config)
    out = _out_dir(args)
    write_columns_csv(
        out / "implied_density.csv", ["x", "b"], [np.asarray(result["x"]), np.asarray(result["b"])]
    )
    dump_json(out / "implied_summary.json", result["summary"])
    return 0


def cmd_compare(args) -> int:
    config = _merged_config(args, _DESIGN_DEFAULTS)
    if "market" not in config:
        raise ConfigError("compare needs a market spec")
    grid = parse_grid_spec(config.get("grid", DEFAULT_GRID_SPEC))
    market = parse_density_spec(config["market"], grid)
    views = parse_views_spec(config.get("views", []), market, grid)
    utility = parse_utility_spec(
        _json_flag(args.utility, "utility") if args.utility is not None else config.get("utility", 1.0)
    )
    believed = bayes_update(market, compose(views)) if views else market

    products = []
    for item in args.payoff:
        name, _, path = item.rpartition("=")
        if not name:
            name = Path(path).stem
        xs, Fs = read_payoff_csv(Path(path))
        products.append((name, payoff_on_grid(xs, Fs, grid)))
    if not products:
        raise ConfigError("compare needs at least one --payoff NAME=FILE")

    rows = compare_products(products, believed, market, utility)
    print(format_report(rows))
    if args.json is not None:
        dump_json(Path(args.json), {"products": rows})
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(cors_origins=[args.cors_origin])
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as err:
        if isinstance(err, SystemExit) and not err.code:
            return 0
        print(f"port-in-use: cannot bind {args.host}:{args.port} ({err})", file=sys.stderr)
        return 3
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="payoffdesign",
        description="Design optimal payoffs from a market density and investor views, "
        "or reverse-engineer the views behind an existing payoff.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (same schema as the workbench export)")
    common.add_argument("--grid", help=f"grid spec JSON (default {json.dumps(DEFAULT_GRID_SPEC)})")
    common.add_argument("--market", help='market density spec JSON, e.g. \'{"family":"lognormal","params":{"mu":0,"sigma":0.2}}\'')

    p_design = sub.add_parser("design", parents=[common], help="design a payoff from views")
    p_design.add_argument("--views", help="views JSON file or inline JSON list (default: none)")
    p_design.add_argument("--risk", help="risk aversion: number or JSON (default 1 = growth-optimal)")
    p_design.add_argument("--out", required=True, help="output directory (payoff.csv, believed.csv, diagnostics.json)")
    p_design.set_defaults(func=cmd_design)

    p_implied = sub.add_parser("implied", parents=[common], help="views implied by a payoff file")
    p_implied.add_argument("--risk", help="risk aversion used by the payoff's holder (default 1)")
    p_implied.add_argument("--payoff", required=True, help="payoff CSV (columns x,F)")
    p_implied.add_argument("--out", required=True, help="output directory (implied_density.csv, implied_summary.json)")
    p_implied.set_defaults(func=cmd_implied)

    p_compare = sub.add_parser("compare", parents=[common], help="score payoff files against the same views")
    p_compare.add_argument("--views", help="views JSON file or inline JSON list (default: none)")
    p_compare.add_argument("--utility", help="utility spec: number or JSON (default log utility)")
    p_compare.add_argument("--payoff", action="append", default=[], metavar="NAME=FILE", help="payoff CSV to score (repeatable)")
    p_compare.add_argument("--json", help="also write the report to this JSON file")
    p_compare.set_defaults(func=cmd_compare)

    p_serve = sub.add_parser("serve", help="run the workbench HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8700)
    p_serve.add_argument("--cors-origin", default="*", help="allowed CORS origin for the workbench")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("QS_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"config-parse: {err}", file=sys.stderr)
        return 2
    except EngineError as err:
        print(str(err), file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())
