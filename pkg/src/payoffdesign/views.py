"""Investor views as likelihood functions on a grid.

A view is a strictly positive multiplicative update factor: the believed
density is the renormalized pointwise product of the market density and all
active views. Likelihoods are scale-free (only the product with the prior
matters), so comparisons rescale both sides to value 1 at the grid midpoint.

A view may carry a window [a, b]: outside it the factor is exactly 1, which
confines the expressed opinion to the region the research actually covered
and leaves the posterior proportional to the prior everywhere else.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EngineError
from .grids import Density, Grid, density_from_params, log_moments, normalize, quadrature, require_same_grid

# Posterior mass below this is treated as an annihilated (degenerate) update
# rather than something to renormalize: far outside any legitimate scale and
# close enough to the subnormal range that shapes are no longer trustworthy.
_MIN_POSTERIOR_MASS = 1e-280


@dataclass(frozen=True)
class Likelihood:
    """Positive multiplicative view factor sampled on a grid."""

    grid: Grid
    values: np.ndarray
    window: tuple[float, float] | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).copy()
        if v.shape != self.grid.points.shape:
            raise EngineError("length-mismatch", "likelihood values do not match grid size")
        if not np.all(np.isfinite(v)):
            raise EngineError("nonfinite-input", "likelihood values must be finite")
        if np.any(v <= 0):
            raise EngineError(
                "invalid-params",
                "likelihood values must be strictly positive; encode impossible "
                "scenarios with a tiny positive floor, not zeros",
            )
        if self.window is not None:
            a, b = self.window
            outside = (self.grid.points < a) | (self.grid.points > b)
            if np.any(v[outside] != 1.0):
                raise EngineError("invalid-params", "windowed likelihood must be exactly 1 outside its window")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


def unit_likelihood(grid: Grid) -> Likelihood:
    """The no-view factor: identically 1."""
    return Likelihood(grid, np.ones(grid.n))


def bayes_update(prior: Density, lik: Likelihood) -> Density:
    """Posterior density: renormalized pointwise product prior * likelihood."""
    require_same_grid(prior.grid, lik.grid)
    raw = prior.values * lik.values
    mass = quadrature(raw, prior.grid)
    if mass < _MIN_POSTERIOR_MASS:
        raise EngineError(
            "zero-posterior-mass",
            f"likelihood annihilates the prior (raw posterior mass {mass:.3e})",
        )
    return Density(prior.grid, raw / mass)


def compose(liks: list[Likelihood]) -> Likelihood:
    """Pointwise product of views; order is immaterial.

    The window of the result is the hull of the members' windows, or absent
    as soon as one member applies everywhere.
    """
    if not liks:
        raise EngineError("empty-list", "compose needs at least one likelihood")
    grid = liks[0].grid
    values = np.ones(grid.n)
    window: tuple[float, float] | None = None
    windowed = True
    for lik in liks:
        require_same_grid(grid, lik.grid)
        values = values * lik.values
        if lik.window is None:
            windowed = False
        elif windowed:
            window = lik.window if window is None else (
                min(window[0], lik.window[0]),
                max(window[1], lik.window[1]),
            )
    return Likelihood(grid, values, window=window if windowed else None)


def likelihood_between(believed: Density, prior: Density) -> Likelihood:
    """The view that updates ``prior`` into ``believed``: pointwise ratio."""
    require_same_grid(believed.grid, prior.grid)
    if np.any(prior.values <= 0):
        raise EngineError("zero-prior-point", "prior density must be strictly positive on the grid")
    return Likelihood(believed.grid, believed.values / prior.values)


def view_vol(market: Density, target_sigma: float, grid: Grid) -> Likelihood:
    """View that realized log-volatility will be ``target_sigma``.

    Requires a market density built from a lognormal spec (its mu/sigma are
    read from the recorded parameters); the believed density keeps the
    market's log-location and swaps in the target sigma.
    """
    require_same_grid(market.grid, grid)
    if not (isinstance(target_sigma, (int, float)) and np.isfinite(target_sigma) and target_sigma > 0):
        raise EngineError("invalid-sigma", f"target_sigma must be > 0, got {target_sigma!r}")
    if market.family != "lognormal" or not market.params:
        raise EngineError(
            "invalid-params",
            "vol view needs a market density constructed from a lognormal spec",
        )
    mu = market.params["mu"]
    believed = density_from_params("lognormal", {"mu": mu, "sigma": float(target_sigma)}, grid)
    return likelihood_between(believed, market)


def view_windowed(lik: Likelihood, a: float, b: float) -> Likelihood:
    """Confine a view to [a, b]: values kept inside, exactly 1 outside."""
    lo, hi = lik.grid.span
    if not (a < b):
        raise EngineError("window-outside-grid", f"need a < b, got [{a}, {b}]")
    if a < lo or b > hi:
        raise EngineError(
            "window-outside-grid", f"window [{a}, {b}] exceeds the grid span [{lo:g}, {hi:g}]"
        )
    values = np.where((lik.grid.points >= a) & (lik.grid.points <= b), lik.values, 1.0)
    return Likelihood(lik.grid, values, window=(float(a), float(b)))


def view_table(x, values, grid: Grid) -> Likelihood:
    """Raw likelihood samples interpolated linearly onto the grid.

    Outside the tabulated x-range the nearest tabulated value is held, so a
    table that ends at 1 behaves like a windowed view.
    """
    xs = np.asarray(x, dtype=float)
    vs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
        raise EngineError("invalid-params", "table view needs matching x/values arrays of length >= 2")
    if np.any(np.diff(xs) <= 0):
        raise EngineError("invalid-params", "table view x values must be strictly increasing")
    if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
        raise EngineError("nonfinite-input", "table view entries must be finite")
    if np.any(vs <= 0):
        raise EngineError("invalid-params", "table view values must be strictly positive")
    return Likelihood(grid, np.interp(grid.points, xs, vs))


def rescaled_to_midpoint(lik: Likelihood) -> Likelihood:
    """Canonical representative of the likelihood's scale class (midpoint value 1)."""
    mid = lik.values[lik.grid.n // 2]
    return Likelihood(lik.grid, lik.values / mid, window=None)
