import numpy as np
import pytest

import payoffdesign as pd

# Standard desk-scale fixtures: lognormal market on a log grid wide enough
# that truncation is far below every tolerance in the suite.


@pytest.fixture(scope="session")
def log_grid():
    return pd.make_grid(0.2, 5.0, 1001, "log")


@pytest.fixture(scope="session")
def market(log_grid):
    return pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, log_grid)


@pytest.fixture(scope="session")
def believed_shift(log_grid):
    # lower believed vol plus a positive drift view, in one parametric density
    return pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.15}, log_grid)


@pytest.fixture(scope="session")
def lin_grid():
    return pd.make_grid(-8.0, 8.0, 1001, "linear")


@pytest.fixture(scope="session")
def std_normal(lin_grid):
    return pd.density_from_params("normal", {"mu": 0.0, "sigma": 1.0}, lin_grid)


@pytest.fixture(scope="session")
def vol_view_15(market, log_grid):
    return pd.view_vol(market, 0.15, log_grid)


def random_positive_likelihood(grid, rng):
    """Smooth strictly positive likelihood: exp of a random quadratic in ln x."""
    t = np.log(grid.points)
    a, b, c = rng.uniform(-0.4, 0.4, size=3)
    return pd.Likelihood(grid, np.exp(a * t**2 + b * t + c))
