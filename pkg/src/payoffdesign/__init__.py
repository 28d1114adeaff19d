"""Payoff design engine.

Turns a market-implied density and a stack of investor views (likelihood
functions) into the optimal payoff for a given risk-aversion profile, checks
the result against an independent expected-utility oracle, and runs the same
equations in reverse to expose the views implied by any existing payoff.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .analytics import certainty_equivalent, compare, expected_utility, growth_rate, kl_divergence
from .errors import ConfigError, EngineError
from .grids import Density, Grid, density_from_params, make_grid, moments, normalize, quadrature
from .oracle import OracleReport, brute_force_maximize, kkt_solve
from .structuring import (
    DesignResult,
    Payoff,
    bond,
    design,
    growth_optimal_payoff,
    implied_views,
    risk_adjusted_payoff,
)
from .utility import RiskProfile, Utility, arrow_pratt_R, crra_utility, custom_utility
from .views import (
    Likelihood,
    bayes_update,
    compose,
    likelihood_between,
    rescaled_to_midpoint,
    unit_likelihood,
    view_table,
    view_vol,
    view_windowed,
)

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "ConfigError",
    "Density",
    "DesignResult",
    "EngineError",
    "Grid",
    "Likelihood",
    "OracleReport",
    "Payoff",
    "RiskProfile",
    "Utility",
    "arrow_pratt_R",
    "bayes_update",
    "bond",
    "brute_force_maximize",
    "certainty_equivalent",
    "compare",
    "compose",
    "crra_utility",
    "custom_utility",
    "density_from_params",
    "design",
    "expected_utility",
    "growth_optimal_payoff",
    "growth_rate",
    "implied_views",
    "kkt_solve",
    "kl_divergence",
    "likelihood_between",
    "make_grid",
    "moments",
    "normalize",
    "quadrature",
    "rescaled_to_midpoint",
    "risk_adjusted_payoff",
    "unit_likelihood",
    "view_table",
    "view_vol",
    "view_windowed",
]
