import math

import numpy as np
import pytest

import payoffdesign as pd
from payoffdesign.errors import EngineError
from payoffdesign.grids import quadrature


# --- growth-optimal payoff -------------------------------------------------


def test_no_view_gives_the_bond(market):
    f = pd.growth_optimal_payoff(market, market)
    np.testing.assert_array_equal(f.values, np.ones(market.grid.n))
    assert f.budget_residual == pytest.approx(0.0, abs=1e-10)


def test_growth_payoff_matches_lognormal_ratio_closed_form():
    # equal sigmas, shifted location: the density ratio is exp(1.25 ln x - 0.03125)
    grid = pd.make_grid(0.2, 5.0, 2001, "log")
    m = pd.density_from_params("lognormal", {"mu": 0.0, "sigma": 0.2}, grid)
    b = pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.2}, grid)
    f = pd.growth_optimal_payoff(b, m)
    closed_form = np.exp(1.25 * np.log(grid.points) - 0.03125)
    np.testing.assert_allclose(f.values, closed_form, atol=1e-10, rtol=1e-10)
    at_one = f.values[np.argmin(np.abs(grid.points - 1.0))]
    assert abs(at_one - math.exp(-0.03125)) < 1e-6


def test_vol_view_growth_payoff_sign_pattern(market, vol_view_15):
    believed = pd.bayes_update(market, vol_view_15)
    f = pd.growth_optimal_payoff(believed, market)
    x = market.grid.points
    center = (x > 0.95) & (x < 1.05)
    assert np.all(f.values[center] > 1.0)
    assert np.all(f.values[x < 0.5] < 1.0)
    assert np.all(f.values[x > 2.0] < 1.0)


def test_growth_payoff_rejects_zero_market():
    grid = pd.make_grid(0, 2, 3)
    triangle = pd.normalize([0.0, 1.0, 0.0], grid)
    flat = pd.normalize([1.0, 1.0, 1.0], grid)
    with pytest.raises(EngineError) as err:
        pd.growth_optimal_payoff(flat, triangle)
    assert err.value.code == "zero-market-density"


# --- risk adjustment ---------------------------------------------------------


@pytest.fixture(scope="module")
def drift_growth(market, log_grid):
    b = pd.density_from_params("lognormal", {"mu": 0.05, "sigma": 0.2}, log_grid)
    return pd.growth_optimal_payoff(b, market)


def test_log_investor_keeps_growth_payoff(drift_growth, market):
    F = pd.risk_adjusted_payoff(drift_growth, pd.RiskProfile.constant(1.0), market)
    assert np.max(np.abs(F.values - drift_growth.values)) <= 1e-12


def test_constant_r2_closed_form(drift_growth, market):
    F = pd.risk_adjusted_payoff(drift_growth, pd.RiskProfile.constant(2.0), market)
    shaped = np.sqrt(drift_growth.values)
    c = 1.0 / quadrature(shaped * market.values, market.grid)
    np.testing.assert_allclose(F.values, c * shaped, rtol=1e-12)
    assert abs(F.budget_residual) <= 1e-10


def test_extreme_risk_aversion_returns_the_bond(drift_growth, market):
    F = pd.risk_adjusted_payoff(drift_growth, pd.RiskProfile.constant(1e6), market)
    assert np.max(np.abs(F.values - 1.0)) < 1e-4


def test_nonpositive_r_rejected():
    with pytest.raises(EngineError) as err:
        pd.RiskProfile.constant(0.0)
    assert err.value.code == "nonpositive-R"


def test_monotone_coupling_wealth_dependent(drift_growth, market):
    risk = pd.RiskProfile.wealth_dependent(lambda F: 1.0 + F)
    F = pd.risk_adjusted_payoff(drift_growth, risk, market)
    order = np.argsort(drift_growth.values)
    f_sorted = drift_growth.values[order]
    F_sorted = F.values[order]
    strictly_up = np.diff(f_sorted) > 0
    assert np.all(np.diff(F_sorted)[strictly_up] > 0)
    assert abs(F.budget_residual) <= 1e-8


def test_wealth_dependent_matches_constant_limit(drift_growth, market):
    # R(F) that never varies must agree with the constant-R closed form.
    flat = pd.RiskProfile.wealth_dependent(lambda F: 2.0)
    closed = pd.risk_adjusted_payoff(drift_growth, pd.RiskProfile.constant(2.0), market)
    integrated = pd.risk_adjusted_payoff(drift_growth, flat, market)
    np.testing.assert_allclose(integrated.values, closed.values, atol=1e-9)


def test_equal_f_values_get_equal_payoffs(market, vol_view_15, log_grid):
    windowed = pd.view_windowed(vol_view_15, 0.8, 1.25)
    risk = pd.RiskProfile.wealth_dependent(lambda F: 1.0 + F)
    result = pd.design(market, [windowed], risk)
    outside = (log_grid.points < 0.8) | (log_grid.points > 1.25)
    f_out = result.growth.values[outside]
    F_out = result.final.values[outside]
    assert np.max(np.abs(f_out / f_out[0] - 1.0)) < 1e-12
    assert np.max(np.abs(F_out / F_out[0] - 1.0)) < 1e-12


def test_zero_f_rejected_under_wealth_dependent_risk(market, log_grid):
    values = np.ones(log_grid.n)
    values[0] = 0.0
    f = pd.Payoff(log_grid, values)
    risk = pd.RiskProfile.wealth_dependent(lambda F: 1.0 + F)
    with pytest.raises(EngineError) as err:
        pd.risk_adjusted_payoff(f, risk, market)
    assert err.value.code == "nonpositive-payoff"


def test_zero_f_allowed_under_constant_risk(market, log_grid):
    values = np.ones(log_grid.n)
    values[0] = 0.0
    f = pd.Payoff(log_grid, values)
    F = pd.risk_adjusted_payoff(f, pd.RiskProfile.constant(2.0), market)
    assert F.values[0] == 0.0
    assert abs(F.budget_residual) <= 1e-8


# --- design pipeline ---------------------------------------------------------


def test_design_with_no_views_holds_the_bond(market):
    result = pd.design(market, [], pd.RiskProfile.constant(3.0))
    np.testing.assert_array_equal(result.growth.values, np.ones(market.grid.n))
    np.testing.assert_allclose(result.final.values, np.ones(market.grid.n), rtol=1e-12)
    np.testing.assert_array_equal(result.believed.values, market.values)
    assert result.diagnostics["kl_b_m"] == pytest.approx(0.0, abs=1e-12)


def test_design_vol_view_log_investor(market, vol_view_15, log_grid):
    result = pd.design(market, [vol_view_15], pd.RiskProfile.constant(1.0))
    assert np.max(np.abs(result.final.values - result.growth.values)) <= 1e-12
    x = log_grid.points
    peak_region = (x > 0.9) & (x < 1.1)
    assert result.final.values[peak_region].max() == result.final.values.max()
    assert np.all(result.final.values[(x < 0.4) | (x > 2.5)] < 1.0)


def test_design_windowed_view_is_flat_outside(market, vol_view_15, log_grid):
    windowed = pd.view_windowed(vol_view_15, 0.8, 1.25)
    result = pd.design(market, [windowed], pd.RiskProfile.constant(1.0))
    outside = (log_grid.points < 0.8) | (log_grid.points > 1.25)
    F_out = result.final.values[outside]
    assert np.max(np.abs(F_out / F_out[0] - 1.0)) < 1e-8


# --- implied views -----------------------------------------------------------


def test_bond_expresses_no_view(market, log_grid):
    implied = pd.implied_views(pd.bond(log_grid), pd.RiskProfile.constant(3.0), market)
    assert np.max(np.abs(implied.values - market.values)) < 1e-12


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 5.0])
def test_design_then_implied_recovers_believed(market, vol_view_15, R):
    result = pd.design(market, [vol_view_15], pd.RiskProfile.constant(R))
    implied = pd.implied_views(result.final, pd.RiskProfile.constant(R), market)
    assert np.max(np.abs(implied.values - result.believed.values)) < 1e-6


def test_design_then_implied_wealth_dependent(market, vol_view_15):
    risk = pd.RiskProfile.wealth_dependent(lambda F: 1.0 + F)
    result = pd.design(market, [vol_view_15], risk)
    implied = pd.implied_views(result.final, risk, market)
    assert np.max(np.abs(implied.values - result.believed.values)) < 1e-6


def test_capped_linear_payoff_implies_bullish_views(market, log_grid):
    capped = pd.Payoff(log_grid, np.clip(log_grid.points, 0.8, 1.2))
    implied = pd.implied_views(capped, pd.RiskProfile.constant(1.0), market)
    expected = pd.normalize(capped.values * market.values, log_grid)
    np.testing.assert_allclose(implied.values, expected.values, rtol=1e-12)
    assert pd.moments(implied)[0] > pd.moments(market)[0]


def test_implied_views_rejects_zero_payoff(market, log_grid):
    values = np.ones(log_grid.n)
    values[5] = 0.0
    with pytest.raises(EngineError) as err:
        pd.implied_views(pd.Payoff(log_grid, values), pd.RiskProfile.constant(1.0), market)
    assert err.value.code == "nonpositive-payoff"


# --- utilities and risk profiles ---------------------------------------------


def test_arrow_pratt_of_crra_is_constant():
    profile = pd.arrow_pratt_R(pd.crra_utility(3.0))
    assert profile.kind == "constant"
    assert profile(0.5) == 3.0 and profile(2.0) == 3.0


def test_arrow_pratt_of_log_utility_is_one():
    u = pd.custom_utility(np.log, lambda F: 1.0 / F, lambda F: -1.0 / F**2)
    profile = pd.arrow_pratt_R(u)
    for F in (0.25, 1.0, 4.0):
        assert profile(F) == pytest.approx(1.0, rel=1e-12)


def test_arrow_pratt_of_exponential_utility():
    a = 2.0
    u = pd.custom_utility(
        lambda F: -np.exp(-a * F),
        lambda F: a * np.exp(-a * F),
        lambda F: -a * a * np.exp(-a * F),
    )
    profile = pd.arrow_pratt_R(u)
    assert profile(0.5) == pytest.approx(1.0, rel=1e-12)
    assert profile(2.0) == pytest.approx(4.0, rel=1e-12)


def test_arrow_pratt_rejects_convex_utility():
    u = pd.custom_utility(lambda F: F**2, lambda F: 2 * F, lambda F: 2.0)
    profile = pd.arrow_pratt_R(u)
    with pytest.raises(EngineError) as err:
        profile(1.0)
    assert err.value.code == "nonconcave-utility"


def test_crra_utility_values():
    assert pd.crra_utility(1.0).u(math.e) == pytest.approx(1.0, rel=1e-15)
    assert pd.crra_utility(2.0).u(2.0) == pytest.approx(-0.5, rel=1e-15)


@pytest.mark.parametrize("R", [0.5, 1.0, 2.0, 5.0])
def test_crra_round_trip_through_arrow_pratt(R):
    profile = pd.arrow_pratt_R(pd.crra_utility(R))
    assert profile.kind == "constant"
    assert profile(1.7) == pytest.approx(R, rel=1e-12)


def test_crra_rejects_nonpositive_R():
    with pytest.raises(EngineError) as err:
        pd.crra_utility(-1.0)
    assert err.value.code == "nonpositive-R"


# --- budget invariant --------------------------------------------------------


def test_budget_residual_recorded_and_small(market, vol_view_15):
    for risk in (
        pd.RiskProfile.constant(0.7),
        pd.RiskProfile.constant(4.0),
        pd.RiskProfile.wealth_dependent(lambda F: 0.5 + 2.0 * F),
    ):
        result = pd.design(market, [vol_view_15], risk)
        assert abs(result.final.budget_residual) <= 1e-8
        assert abs(quadrature(result.final.values * market.values, market.grid) - 1.0) <= 1e-8
