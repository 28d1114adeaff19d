"""The payoff design equations.

The designed product is assembled in two steps that factor cleanly:

1. Growth-optimal payoff: the pointwise ratio of believed to market density,
   f = b / m. It costs exactly one unit (the budget integral of f against m
   is the believed mass, 1) and maximizes the expected log return; it is also
   the likelihood that updates the market density into the believed one.

2. Risk-aversion adjustment: the final payoff F follows the elasticity rule
   d(ln F) / d(ln f) = 1 / R(F), so a constant R yields the power transform
   F = c * f^(1/R) (with c fixing the budget), R = 1 leaves f untouched, and
   a wealth-dependent R requires integrating the elasticity ODE in f-space
   with the level at f = 1 pinned down by the budget constraint.

Both steps invert cleanly, which is what ``implied_views`` exploits to read
the believed density off any existing positive payoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import EngineError
from .grids import Density, Grid, normalize, quadrature, require_same_grid
from .utility import RiskProfile
from .views import Likelihood, bayes_update, compose

# Constructors must land the budget integral within this of 1.
BUDGET_TOL = 1e-8

_BRACKET_LO = 1e-6
_BRACKET_HI = 1e6
_BRACKET_EXPANSIONS = 10


@dataclass(frozen=True)
class Payoff:
    """Nonnegative payout per unit invested, sampled on a grid.

    ``budget_residual`` is the construction-time diagnostic
    quadrature(values * market) - 1; None for payoffs loaded from outside
    (legacy products are not budget-normalized by fiat).
    """

    grid: Grid
    values: np.ndarray
    budget_residual: float | None = field(default=None, compare=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != self.grid.points.shape:
            raise EngineError("length-mismatch", "payoff values do not match grid size")
        if not np.all(np.isfinite(v)):
            raise EngineError("nonfinite-input", "payoff values must be finite")
        if np.any(v < 0):
            raise EngineError("nonpositive-payoff", "payoff values must be nonnegative")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def bond(grid: Grid) -> Payoff:
    """The unit payoff: pays 1 everywhere, costs 1 by construction."""
    return Payoff(grid, np.ones(grid.n), budget_residual=0.0)


def _with_budget(values: np.ndarray, market: Density) -> Payoff:
    residual = quadrature(values * market.values, market.grid) - 1.0
    if abs(residual) > BUDGET_TOL:
        raise EngineError(
            "budget-bracket-failure",
            f"constructed payoff misses the unit budget by {residual:.3e}",
        )
    return Payoff(market.grid, values, budget_residual=residual)


def growth_optimal_payoff(believed: Density, market: Density) -> Payoff:
    """Payoff of the expected-log-return maximizer: believed / market."""
    require_same_grid(believed.grid, market.grid)
    if np.any(market.values <= 0):
        raise EngineError("zero-market-density", "market density must be strictly positive on the grid")
    return _with_budget(believed.values / market.values, market)


def risk_adjusted_payoff(growth: Payoff, risk: RiskProfile, market: Density) -> Payoff:
    """Transform the growth-optimal payoff through the elasticity rule.

    Constant R uses the closed form c * f^(1/R); a wealth-dependent profile
    integrates d(ln F)/d(ln f) = 1/R(F) from the reference point f = 1, with
    the starting level found by a bracketing root-finder on the budget.
    """
    require_same_grid(growth.grid, market.grid)
    if np.any(market.values <= 0):
        raise EngineError("zero-market-density", "market density must be strictly positive on the grid")
    f = growth.values

    if risk.kind == "constant":
        shaped = f ** (1.0 / risk.r_const)
        scale = quadrature(shaped * market.values, market.grid)
        if not np.isfinite(scale) or scale <= 0:
            raise EngineError("budget-bracket-failure", "cannot budget-normalize the shaped payoff")
        return _with_budget(shaped / scale, market)

    if np.any(f <= 0):
        raise EngineError(
            "nonpositive-payoff",
            "wealth-dependent risk adjustment needs f > 0 everywhere (ln f must exist)",
        )
    s = np.log(f)
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    mw = market.grid.weights * market.values

    def budget(lnF0: float) -> float:
        lnF_sorted = _kernels.elasticity_profile(s_sorted, lnF0, risk)
        F = np.empty_like(s)
        F[order] = np.exp(lnF_sorted)
        return float(mw @ F) - 1.0

    lnF0 = _bracketed_root(budget, np.log(_BRACKET_LO), np.log(_BRACKET_HI))
    lnF_sorted = _kernels.elasticity_profile(s_sorted, lnF0, risk)
    F = np.empty_like(s)
    F[order] = np.exp(lnF_sorted)
    return _with_budget(F, market)


def _bracketed_root(fn, lo: float, hi: float) -> float:
    """Root of a monotone-increasing objective, expanding the bracket as needed."""
    f_lo, f_hi = fn(lo), fn(hi)
    for _ in range(_BRACKET_EXPANSIONS):
        if f_lo <= 0.0 <= f_hi:
            break
        if f_lo > 0.0:
            lo -= (hi - lo)
            f_lo = fn(lo)
        elif f_hi < 0.0:
            hi += (hi - lo)
            f_hi = fn(hi)
    if not (f_lo <= 0.0 <= f_hi):
        raise EngineError(
            "budget-bracket-failure",
            f"could not bracket the budget root in [{lo:g}, {hi:g}]",
        )
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    return float(brentq(fn, lo, hi, xtol=1e-13, rtol=8.9e-16))


@dataclass(frozen=True)
class DesignResult:
    """Everything a design run produces, ready for files or wire."""

    growth: Payoff  # f: growth-optimal payoff
    final: Payoff  # F: risk-adjusted payoff
    believed: Density  # b: market updated by the composed views
    diagnostics: dict


def design(market: Density, views: list[Likelihood], risk: RiskProfile) -> DesignResult:
    """Full pipeline: compose views, update the market, shape the payoff."""
    from .analytics import growth_rate, kl_divergence  # deferred: analytics imports this module

    believed = bayes_update(market, compose(views)) if views else market
    growth = growth_optimal_payoff(believed, market)
    final = risk_adjusted_payoff(growth, risk, market)
    diagnostics = {
        "budget_residual": final.budget_residual,
        "growth_rate": growth_rate(final, believed),
        "kl_b_m": kl_divergence(believed, market),
        "r_profile": risk.label,
    }
    return DesignResult(growth=growth, final=final, believed=believed, diagnostics=diagnostics)


def implied_views(final: Payoff, risk: RiskProfile, market: Density) -> Density:
    """Run the design backwards: the believed density a payoff expresses.

    Inverts the elasticity rule to recover ln f (up to the budget constant),
    then reads the believed density off b = f * m.
    """
    require_same_grid(final.grid, market.grid)
    if np.any(market.values <= 0):
        raise EngineError("zero-market-density", "market density must be strictly positive on the grid")
    F = final.values
    if np.any(F <= 0):
        raise EngineError("nonpositive-payoff", "implied views need a strictly positive payoff")

    if risk.kind == "constant":
        f = F**risk.r_const
    else:
        # ln f accumulated pairwise along the grid from the midpoint:
        # delta(ln f) = integral of R(F) d(ln F), Simpson per interval.
        lnF = np.log(F)
        mid = final.grid.n // 2
        deltas = np.zeros(final.grid.n)
        for i in range(final.grid.n - 1):
            a, b = lnF[i], lnF[i + 1]
            h = b - a
            if h == 0.0:
                deltas[i + 1] = 0.0
                continue
            r_a = risk(float(np.exp(a)))
            r_m = risk(float(np.exp(0.5 * (a + b))))
            r_b = risk(float(np.exp(b)))
            deltas[i + 1] = h * (r_a + 4.0 * r_m + r_b) / 6.0
        lnf = np.cumsum(deltas)
        lnf -= lnf[mid]
        f = np.exp(lnf)

    scale = quadrature(f * market.values, market.grid)
    if not np.isfinite(scale) or scale <= 0:
        raise EngineError("nonpositive-payoff", "implied growth payoff has no usable budget scale")
    f = f / scale
    return normalize(f * market.values, market.grid)
