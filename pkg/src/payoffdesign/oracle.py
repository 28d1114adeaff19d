"""Independent verification oracle.

Solves the discretized problem

    maximize   sum_i w_i b_i U(F_i)
    subject to sum_i w_i m_i F_i = 1,  F_i >= 0

by two routes that never touch the payoff-design equations:

- ``kkt_solve``: the stationarity condition U'(F_i) = lambda * m_i / b_i,
  inverted per point (analytically for CRRA, by bracketing root-find for
  custom utilities), with the multiplier lambda pinned by an outer
  bracketing root-find on the budget.
- ``brute_force_maximize``: projected-gradient ascent on the discretized
  objective, for small grids.

Only the grid/quadrature layer and the passive Utility/Payoff carriers are
shared with the rest of the package; agreement between this module and the
design pipeline is therefore a real cross-check, not a tautology.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import _kernels
from .errors import EngineError
from .grids import Density, require_same_grid
from .structuring import Payoff
from .utility import Utility

_LAMBDA_LO = 1e-6
_LAMBDA_HI = 1e6
_BRACKET_EXPANSIONS = 10

# First-order (stationarity) tolerances backing the converged flag.
KKT_RESIDUAL_TOL = 1e-8
ASCENT_RESIDUAL_TOL = 1e-2


@dataclass(frozen=True)
class OracleReport:
    payoff: Payoff
    lam: float  # budget multiplier
    objective: float
    iterations: int
    converged: bool
    residual: float  # sup-norm relative stationarity residual


def _inverse_marginal(utility: Utility, y: np.ndarray) -> np.ndarray:
    """Solve U'(F) = y per point; U' is strictly decreasing on (0, inf)."""
    if utility.kind == "crra":
        return y ** (-1.0 / utility.crra_R)
    out = np.empty_like(y)
    for i, target in enumerate(y):
        lo, hi = 1e-12, 1e12
        for _ in range(_BRACKET_EXPANSIONS):
            if float(utility.du(hi)) <= target <= float(utility.du(lo)):
                break
            lo *= 1e-3
            hi *= 1e3
        else:
            raise EngineError(
                "inverse-marginal-failure", f"U' never reaches {target!r} on the search range"
            )
        out[i] = brentq(lambda F: float(utility.du(F)) - target, lo, hi, rtol=8.9e-16)
    return out


def _stationarity_residual(F, bw, mw, utility, lam, floor: float = 0.0) -> float:
    """Sup-norm relative first-order residual, on points carrying real mass.

    Points pinned at the positivity floor satisfy a complementarity
    inequality rather than the stationarity equation, so they are excluded,
    as are points whose believed mass is negligible (the objective cannot
    see them at double precision).
    """
    live = (bw > 1e-12 * np.max(bw)) & (F > 100.0 * floor)
    if not np.any(live):
        return 0.0
    lhs = bw[live] * utility.du(F[live])
    rhs = lam * mw[live]
    return float(np.max(np.abs(lhs / rhs - 1.0)))


def kkt_solve(believed: Density, market: Density, utility: Utility) -> OracleReport:
    """First-order-condition solver: invert U' pointwise, root-find lambda."""
    require_same_grid(believed.grid, market.grid)
    if np.any(believed.values <= 0) or np.any(market.values <= 0):
        raise EngineError("zero-market-density", "oracle needs strictly positive densities")
    grid = market.grid
    w = grid.weights
    ratio = market.values / believed.values
    mw = w * market.values
    evals = 0

    def budget(lam: float) -> float:
        nonlocal evals
        evals += 1
        return float(mw @ _inverse_marginal(utility, lam * ratio)) - 1.0

    def budget_or_none(lam: float) -> float | None:
        # Used only while establishing the bracket: a bounded marginal
        # utility (e.g. exponential) cannot be inverted at large lambda.
        try:
            return budget(lam)
        except EngineError as err:
            if err.code == "inverse-marginal-failure":
                return None
            raise

    lo, hi = _LAMBDA_LO, _LAMBDA_HI
    f_lo = budget(lo)
    f_hi = budget_or_none(hi)
    for _ in range(60):
        if f_hi is not None or hi <= 4.0 * lo:
            break
        hi = np.sqrt(lo * hi)  # log-bisect toward an evaluable multiplier
        f_hi = budget_or_none(hi)
    if f_hi is None:
        raise EngineError("bracket-failure", "no evaluable upper bracket for the budget multiplier")
    for _ in range(_BRACKET_EXPANSIONS):
        if f_lo >= 0.0 >= f_hi:
            break
        if f_lo < 0.0:
            lo *= 1e-2
            f_lo = budget(lo)
        elif f_hi > 0.0:
            hi *= 1e2
            f_hi = budget_or_none(hi)
            if f_hi is None:
                break
    if f_hi is None or not (f_lo >= 0.0 >= f_hi):
        raise EngineError("bracket-failure", "cannot bracket the budget multiplier")
    lam = float(brentq(budget, lo, hi, rtol=8.9e-16))

    F = _inverse_marginal(utility, lam * ratio)
    bw = w * believed.values
    objective = float(bw @ utility.u(F))
    residual = _stationarity_residual(F, bw, mw, utility, lam)
    budget_residual = float(mw @ F) - 1.0
    converged = abs(budget_residual) <= 1e-8 and residual <= KKT_RESIDUAL_TOL
    return OracleReport(
        payoff=Payoff(grid, F, budget_residual=budget_residual),
        lam=lam,
        objective=objective,
        iterations=evals,
        converged=converged,
        residual=residual,
    )


def brute_force_maximize(
    believed: Density, market: Density, utility: Utility, start: Payoff
) -> OracleReport:
    """Projected-gradient ascent on the discretized objective.

    Small grids only (n <= 512): this is the iterative, inversion-free route.
    Steps follow the curvature-rescaled gradient projected onto the budget
    plane, clip at a tiny positive floor, renormalize back onto the budget,
    and stop once the objective improves by less than 1e-12 over a patience
    window (or after 200000 steps). Non-convergence is reported, not raised.
    """
    require_same_grid(believed.grid, market.grid)
    require_same_grid(start.grid, market.grid)
    if market.grid.n > 512:
        raise EngineError("invalid-count", "brute force is restricted to grids with n <= 512")
    if np.any(believed.values <= 0) or np.any(market.values <= 0):
        raise EngineError("zero-market-density", "oracle needs strictly positive densities")
    grid = market.grid
    bw = grid.weights * believed.values
    mw = grid.weights * market.values

    if utility.kind == "crra":
        F, objective, steps, converged = _kernels.ascent_crra(start.values, bw, mw, utility.crra_R)
    else:
        F, objective, steps, converged = _kernels.ascent_generic(
            start.values,
            bw,
            mw,
            utility.u,
            utility.du,
            lambda F: np.abs(utility.d2u(F)),
        )

    # lambda estimate: exact at the optimum, where U'(F) b = lambda m pointwise.
    lam = float((bw * utility.du(F)) @ F) / float(mw @ F)
    residual = _stationarity_residual(F, bw, mw, utility, lam, floor=1e-12)
    budget_residual = float(mw @ F) - 1.0
    converged = bool(converged) and abs(budget_residual) <= 1e-8 and residual <= ASCENT_RESIDUAL_TOL
    return OracleReport(
        payoff=Payoff(grid, F, budget_residual=budget_residual),
        lam=lam,
        objective=objective,
        iterations=steps,
        converged=converged,
        residual=residual,
    )
