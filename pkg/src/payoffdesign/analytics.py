"""Product diagnostics: expected utility, growth rate, divergence, certainty
equivalents, and side-by-side product comparison.

All integrals use the shared grid quadrature; entropy-like integrands follow
the 0 * ln 0 = 0 convention.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from .errors import EngineError
from .grids import Density, quadrature, require_same_grid
from .structuring import Payoff, implied_views
from .utility import Utility, arrow_pratt_R


def _weighted(density: Density) -> np.ndarray:
    return density.grid.weights * density.values


def expected_utility(payoff: Payoff, believed: Density, utility: Utility) -> float:
    """Expected utility of the payoff under the believed density."""
    require_same_grid(payoff.grid, believed.grid)
    live = believed.values > 0
    F = payoff.values
    unbounded_below = utility.kind != "crra" or utility.crra_R >= 1.0
    if unbounded_below and np.any(F[live] <= 0):
        raise EngineError(
            "domain-violation",
            "payoff hits 0 where the believed density has mass; utility is unbounded below there",
        )
    out = np.zeros_like(F)
    out[live] = utility.u(F[live])
    if not np.all(np.isfinite(out[live])):
        raise EngineError("domain-violation", "utility not finite on the payoff's range")
    return float(_weighted(believed) @ out)


def growth_rate(payoff: Payoff, believed: Density) -> float:
    """Expected log return per unit invested, under the believed density."""
    require_same_grid(payoff.grid, believed.grid)
    live = believed.values > 0
    F = payoff.values
    if np.any(F[live] <= 0):
        raise EngineError("domain-violation", "growth rate needs F > 0 wherever the believed density has mass")
    out = np.zeros_like(F)
    out[live] = np.log(F[live])
    return float(_weighted(believed) @ out)


def kl_divergence(believed: Density, market: Density) -> float:
    """Relative entropy of believed vs market; the value of the growth optimum."""
    require_same_grid(believed.grid, market.grid)
    live = believed.values > 0
    if np.any(market.values[live] <= 0):
        raise EngineError(
            "absolute-continuity-violation",
            "believed density has mass where the market density vanishes",
        )
    out = np.zeros_like(believed.values)
    out[live] = np.log(believed.values[live] / market.values[live])
    return float(_weighted(believed) @ out)


def certainty_equivalent(payoff: Payoff, believed: Density, utility: Utility) -> float:
    """Riskless payout with the same expected utility."""
    eu = expected_utility(payoff, believed, utility)
    if utility.kind == "crra":
        R = utility.crra_R
        if R == 1.0:
            return float(np.exp(eu))
        base = (1.0 - R) * eu
        if base <= 0:
            raise EngineError("domain-violation", f"expected utility {eu!r} is outside the crra range")
        return float(base ** (1.0 / (1.0 - R)))
    return _invert_utility(utility, eu)


def _invert_utility(utility: Utility, target: float) -> float:
    lo, hi = 1e-8, 1e8
    for _ in range(10):
        if float(utility.u(lo)) <= target <= float(utility.u(hi)):
            return float(brentq(lambda F: float(utility.u(F)) - target, lo, hi, rtol=8.9e-16))
        lo *= 1e-2
        hi *= 1e2
    raise EngineError("domain-violation", f"cannot invert utility at value {target!r}")


def compare(
    products: list[tuple[str, Payoff]],
    believed: Density,
    market: Density,
    utility: Utility,
) -> list[dict]:
    """Score each product under the same beliefs and utility.

    Per product: budget residual under the market, expected utility, growth
    rate, certainty equivalent, and the divergence of the views the product
    implicitly expresses (its implied believed density) from the market.
    Rows are sorted by expected utility, best first.
    """
    risk = arrow_pratt_R(utility)
    rows = []
    for name, payoff in products:
        require_same_grid(payoff.grid, market.grid)
        implied = implied_views(payoff, risk, market)
        rows.append(
            {
                "name": name,
                "budget_residual": quadrature(payoff.values * market.values, market.grid) - 1.0,
                "expected_utility": expected_utility(payoff, believed, utility),
                "growth_rate": growth_rate(payoff, believed),
                "certainty_equivalent": certainty_equivalent(payoff, believed, utility),
                "kl_implied_views": kl_divergence(implied, market),
            }
        )
    rows.sort(key=lambda r: r["expected_utility"], reverse=True)
    return rows


def format_report(rows: list[dict]) -> str:
    """Aligned plain-text table for terminal output."""
    headers = ["product", "budget_resid", "exp_utility", "growth_rate", "cert_equiv", "kl_implied"]
    keys = ["name", "budget_residual", "expected_utility", "growth_rate", "certainty_equivalent", "kl_implied_views"]
    table = [headers]
    for row in rows:
        table.append([row["name"]] + [f"{row[k]: .6e}" for k in keys[1:]])
    widths = [max(len(line[i]) for line in table) for i in range(len(headers))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(line, widths)).rstrip() for line in table]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)
