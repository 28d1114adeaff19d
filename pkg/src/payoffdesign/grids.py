"""Grids, trapezoid quadrature, and probability densities.

Everything downstream (views, payoffs, the oracle) lives on a shared
discretization: a strictly increasing 1-D grid of the underlying variable x.
One quadrature rule (composite trapezoid, via per-point weights) is used for
every integral in the package so that budget constraints, normalizations and
the verification oracle are all consistent with each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import EngineError

# Fraction of analytic probability mass that may fall outside the grid span
# before a density construction is rejected as under-covered.
COVERAGE_TOL = 1e-6

# Unit-mass tolerance enforced on every Density.
DENSITY_MASS_TOL = 1e-10


def _readonly(values) -> np.ndarray:
    out = np.asarray(values, dtype=float).copy()
    out.flags.writeable = False
    return out


class Grid:
    """Strictly increasing abscissae plus cached trapezoid weights.

    ``spacing`` ("linear" or "logarithmic") is metadata only; the weights are
    computed from the actual point positions either way.
    """

    __slots__ = ("points", "spacing", "weights")

    def __init__(self, points, spacing: str = "linear"):
        pts = _readonly(points)
        if pts.ndim != 1 or pts.size < 3:
            raise EngineError("invalid-count", "grid needs at least 3 points")
        if not np.all(np.isfinite(pts)):
            raise EngineError("invalid-range", "grid points must be finite")
        if np.any(np.diff(pts) <= 0):
            raise EngineError("invalid-range", "grid points must be strictly increasing")
        if spacing not in ("linear", "logarithmic"):
            raise EngineError("invalid-range", f"unknown spacing {spacing!r}")
        if spacing == "logarithmic" and pts[0] <= 0:
            raise EngineError("invalid-range", "logarithmic grid requires positive points")
        self.points = pts
        self.spacing = spacing
        w = np.empty_like(pts)
        w[0] = 0.5 * (pts[1] - pts[0])
        w[-1] = 0.5 * (pts[-1] - pts[-2])
        w[1:-1] = 0.5 * (pts[2:] - pts[:-2])
        self.weights = _readonly(w)

    @property
    def n(self) -> int:
        return self.points.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return self is other or np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.points[0], self.points[-1], self.points.size))

    def __repr__(self) -> str:
        lo, hi = self.span
        return f"Grid(n={self.n}, span=[{lo:g}, {hi:g}], spacing={self.spacing})"


def make_grid(lo: float, hi: float, n: int, spacing: str = "linear") -> Grid:
    """Build an n-point grid spanning [lo, hi] with exact endpoints."""
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise EngineError("invalid-range", f"need lo < hi, got [{lo}, {hi}]")
    if int(n) != n or n < 3:
        raise EngineError("invalid-count", f"need n >= 3 points, got {n}")
    n = int(n)
    if spacing in ("linear", "lin"):
        return Grid(np.linspace(lo, hi, n), "linear")
    if spacing in ("logarithmic", "log"):
        if lo <= 0:
            raise EngineError("invalid-range", "logarithmic spacing requires lo > 0")
        return Grid(np.geomspace(lo, hi, n), "logarithmic")
    raise EngineError("invalid-range", f"unknown spacing {spacing!r}")


def quadrature(values, grid: Grid) -> float:
    """Trapezoid-rule integral of sampled values over the grid span."""
    v = np.asarray(values, dtype=float)
    if v.shape != grid.points.shape:
        raise EngineError(
            "length-mismatch", f"{v.shape[0] if v.ndim else 0} values on a {grid.n}-point grid"
        )
    if not np.all(np.isfinite(v)):
        raise EngineError("nonfinite-input", "values must be finite")
    return float(grid.weights @ v)


def require_same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise EngineError("grid-mismatch", "operands live on different grids")


@dataclass(frozen=True)
class Density:
    """Probability density sampled on a grid, unit mass under its quadrature.

    ``family``/``params`` record the parametric origin when the density was
    built by :func:`density_from_params`; view builders that need to know the
    market's distributional family read them from here.
    """

    grid: Grid
    values: np.ndarray
    family: str | None = None
    params: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        v = _readonly(self.values)
        if v.shape != self.grid.points.shape:
            raise EngineError("length-mismatch", "density values do not match grid size")
        if not np.all(np.isfinite(v)):
            raise EngineError("nonfinite-input", "density values must be finite")
        if np.any(v < 0):
            raise EngineError("negative-input", "density values must be nonnegative")
        mass = quadrature(v, self.grid)
        if abs(mass - 1.0) > DENSITY_MASS_TOL:
            raise EngineError(
                "invalid-params", f"density mass {mass!r} is not 1 within {DENSITY_MASS_TOL}"
            )
        object.__setattr__(self, "values", v)


def normalize(values, grid: Grid, family: str | None = None, params: dict | None = None) -> Density:
    """Rescale nonnegative samples to a unit-mass Density."""
    v = np.asarray(values, dtype=float)
    if v.shape != grid.points.shape:
        raise EngineError("length-mismatch", "values do not match grid size")
    if not np.all(np.isfinite(v)):
        raise EngineError("nonfinite-input", "values must be finite")
    if np.any(v < 0):
        raise EngineError("negative-input", "values must be nonnegative")
    mass = float(grid.weights @ v)
    if mass <= 0.0:
        raise EngineError("all-zero-input", "cannot normalize identically zero values")
    return Density(grid, v / mass, family=family, params=params)


def _component_dists(family: str, params: dict) -> list[tuple[float, object]]:
    """Resolve a family spec into weighted scipy frozen distributions."""
    if family == "normal":
        mu, sigma = params.get("mu"), params.get("sigma")
        _check_loc_scale(mu, sigma)
        return [(1.0, stats.norm(loc=mu, scale=sigma))]
    if family == "lognormal":
        mu, sigma = params.get("mu"), params.get("sigma")
        _check_loc_scale(mu, sigma)
        # mu/sigma parameterize the log of the variable
        return [(1.0, stats.lognorm(s=sigma, scale=np.exp(mu)))]
    if family == "mixture":
        comps = params.get("components")
        if not isinstance(comps, list) or not comps:
            raise EngineError("invalid-params", "mixture needs a nonempty components list")
        out: list[tuple[float, object]] = []
        total = 0.0
        for comp in comps:
            w = comp.get("weight")
            if not isinstance(w, (int, float)) or not np.isfinite(w) or w < 0:
                raise EngineError("invalid-params", f"bad mixture weight {w!r}")
            sub = _component_dists(comp.get("family"), comp.get("params", {}))
            out.extend((w * sw, d) for sw, d in sub)
            total += w
        if abs(total - 1.0) > 1e-9:
            raise EngineError("invalid-params", f"mixture weights sum to {total}, expected 1")
        return out
    raise EngineError("invalid-params", f"unknown density family {family!r}")


def _check_loc_scale(mu, sigma) -> None:
    ok = (
        isinstance(mu, (int, float))
        and isinstance(sigma, (int, float))
        and np.isfinite(mu)
        and np.isfinite(sigma)
        and sigma > 0
    )
    if not ok:
        raise EngineError("invalid-params", f"need finite mu and sigma > 0, got mu={mu!r} sigma={sigma!r}")


def density_from_params(family: str, params: dict, grid: Grid) -> Density:
    """Sample a parametric density on the grid and renormalize to unit mass.

    Rejects grids that truncate more than COVERAGE_TOL of the analytic mass,
    so silent fat-tail clipping cannot sneak into downstream budgets.
    """
    comps = _component_dists(family, params)
    lo, hi = grid.span
    covered = sum(w * (d.cdf(hi) - d.cdf(lo)) for w, d in comps)
    if 1.0 - covered > COVERAGE_TOL:
        raise EngineError(
            "insufficient-grid-coverage",
            f"grid [{lo:g}, {hi:g}] leaves {1.0 - covered:.3e} of the mass outside "
            f"(threshold {COVERAGE_TOL:g})",
        )
    values = np.zeros(grid.n)
    for w, d in comps:
        values = values + w * d.pdf(grid.points)
    return normalize(values, grid, family=family, params=params)


def moments(density: Density) -> tuple[float, float, float]:
    """Quadrature-based (mean, variance, skewness) of a density."""
    x = density.grid.points
    w = density.grid.weights * density.values
    mean = float(w @ x)
    centered = x - mean
    variance = float(w @ centered**2)
    third = float(w @ centered**3)
    skewness = third / variance**1.5 if variance > 0 else 0.0
    return mean, variance, skewness


def log_moments(density: Density) -> tuple[float, float]:
    """Quadrature-based mean and variance of ln(x) under the density."""
    if density.grid.points[0] <= 0:
        raise EngineError("invalid-range", "log moments need a positive grid span")
    lx = np.log(density.grid.points)
    w = density.grid.weights * density.values
    mean = float(w @ lx)
    variance = float(w @ (lx - mean) ** 2)
    return mean, variance
