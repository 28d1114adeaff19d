import numpy as np
import pytest

import payoffdesign as pd
from payoffdesign.errors import EngineError
from payoffdesign.grids import quadrature
from payoffdesign.oracle import _inverse_marginal


@pytest.fixture(scope="module")
def small_grid():
    return pd.make_grid(0.2, 5.0, 257, "log")


@pytest.fixture(scope="module")
def small_market(small_grid):
    return pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, small_grid)


@pytest.fixture(scope="module")
def small_believed(small_grid):
    return pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.15}, small_grid)


def exponential_utility(a: float) -> pd.Utility:
    return pd.custom_utility(
        lambda F: -np.exp(-a * F),
        lambda F: a * np.exp(-a * F),
        lambda F: -a * a * np.exp(-a * F),
    )


# --- kkt_solve ---------------------------------------------------------------


def test_log_utility_recovers_density_ratio(small_believed, small_market):
    report = pd.kkt_solve(small_believed, small_market, pd.crra_utility(1.0))
    ratio = small_believed.values / small_market.values
    assert np.max(np.abs(report.payoff.values - ratio)) < 1e-10
    assert report.lam == pytest.approx(1.0, abs=1e-10)
    assert report.converged


def test_kkt_matches_crra_closed_form(small_believed, small_market):
    report = pd.kkt_solve(small_believed, small_market, pd.crra_utility(2.0))
    shaped = np.sqrt(small_believed.values / small_market.values)
    c = 1.0 / quadrature(shaped * small_market.values, small_market.grid)
    assert np.max(np.abs(report.payoff.values - c * shaped)) < 1e-10
    assert report.converged and report.residual <= 1e-8


def test_no_view_forces_the_bond(small_market):
    for utility in (pd.crra_utility(3.0), exponential_utility(4.0)):
        report = pd.kkt_solve(small_market, small_market, utility)
        assert np.max(np.abs(report.payoff.values - 1.0)) < 1e-10
        assert report.lam == pytest.approx(float(utility.du(1.0)), rel=1e-9)


def test_kkt_custom_utility_matches_analytic_inverse(small_grid):
    # mild fixture keeps lambda*m/b inside the exponential marginal's range
    m = pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, small_grid)
    b = pd.density_from_params("lognormal", {"mu": 0.02, "sigma": 0.22}, small_grid)
    a = 4.0
    report = pd.kkt_solve(b, m, exponential_utility(a))
    analytic = -np.log(report.lam * m.values / (a * b.values)) / a
    assert np.max(np.abs(report.payoff.values - analytic)) < 1e-10
    assert report.converged


def test_budget_is_decreasing_in_lambda(small_believed, small_market):
    u = pd.crra_utility(2.0)
    ratio = small_market.values / small_believed.values
    mw = small_market.grid.weights * small_market.values
    budgets = [float(mw @ _inverse_marginal(u, lam * ratio)) for lam in (0.5, 1.0, 2.0)]
    assert budgets[0] > budgets[1] > budgets[2]


def test_kkt_rejects_grid_mismatch(small_believed, market):
    with pytest.raises(EngineError) as err:
        pd.kkt_solve(small_believed, market, pd.crra_utility(1.0))
    assert err.value.code == "grid-mismatch"


# --- brute_force_maximize ------------------------------------------------------


def test_bond_is_stationary_without_views(small_market, small_grid):
    report = pd.brute_force_maximize(
        small_market, small_market, pd.crra_utility(2.0), pd.bond(small_grid)
    )
    assert np.max(np.abs(report.payoff.values - 1.0)) < 1e-12
    assert report.converged


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 5.0])
def test_ascent_agrees_with_kkt(small_believed, small_market, small_grid, R):
    u = pd.crra_utility(R)
    kkt = pd.kkt_solve(small_believed, small_market, u)
    ascent = pd.brute_force_maximize(small_believed, small_market, u, pd.bond(small_grid))
    assert ascent.converged
    assert np.max(np.abs(ascent.payoff.values - kkt.payoff.values)) < 1e-4


def test_ascent_custom_utility_agrees_with_kkt(small_grid):
    m = pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.20}, small_grid)
    b = pd.density_from_params("lognormal", {"mu": 0.02, "sigma": 0.22}, small_grid)
    u = exponential_utility(4.0)
    kkt = pd.kkt_solve(b, m, u)
    ascent = pd.brute_force_maximize(b, m, u, pd.bond(small_grid))
    assert ascent.converged
    assert np.max(np.abs(ascent.payoff.values - kkt.payoff.values)) < 1e-4


def test_designed_payoff_beats_random_feasible_perturbations(
    small_believed, small_market, small_grid
):
    u = pd.crra_utility(2.0)
    lik = pd.likelihood_between(small_believed, small_market)
    designed = pd.design(small_market, [lik], pd.RiskProfile.constant(2.0)).final
    w = small_grid.weights
    bw = w * small_believed.values
    mw = w * small_market.values
    best = float(bw @ u.u(designed.values))
    rng = np.random.default_rng(20240811)
    for _ in range(100):
        perturbed = np.maximum(designed.values * (1.0 + 0.05 * rng.standard_normal(small_grid.n)), 1e-12)
        perturbed /= float(mw @ perturbed)
        assert float(bw @ u.u(perturbed)) <= best


def test_brute_force_rejects_large_grids(market, log_grid):
    with pytest.raises(EngineError) as err:
        pd.brute_force_maximize(market, market, pd.crra_utility(2.0), pd.bond(log_grid))
    assert err.value.code == "invalid-count"
