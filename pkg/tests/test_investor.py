import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commodeq.errors import AlphaOutOfRange, DegenerateCorrelation, NotBrownian, ZeroVariance
from commodeq.investor import (
    best_response,
    best_response_bm,
    best_response_jd,
    brownian_leg,
    entropy_value,
    investor_utility,
    marginal_utility,
    stock_value,
)
from commodeq.levy_models import LevyModel
from commodeq.market_core import MarketParams, terminal_moments
from commodeq.oracle import investor_grid_response
from commodeq.rootfind import central_difference

from .conftest import make_brownian, make_jump, make_market


class TestBrownianLeg:
    @pytest.mark.parametrize("rho", [-0.7, 0.0, 0.4])
    def test_recovers_inputs(self, rho: float) -> None:
        leg = brownian_leg(make_brownian(rho=rho, lambda_mpr=0.5))
        assert (leg.sigma1, leg.sigma2) == pytest.approx((0.2, 10.0))
        assert leg.rho == pytest.approx(rho, abs=1e-12)
        assert leg.lambda_mpr == pytest.approx(0.5)

    def test_riskless_stock(self) -> None:
        leg = brownian_leg(LevyModel.brownian(0.0, 10.0, 0.0))
        assert (leg.rho, leg.lambda_mpr) == (0.0, 0.0)

    def test_rejects_jumps(self, jump_model: LevyModel) -> None:
        with pytest.raises(NotBrownian):
            brownian_leg(jump_model)


class TestEntropy:
    def test_no_position(self, market: MarketParams, brownian: LevyModel) -> None:
        # Half the squared market price of risk per unit of time.
        assert entropy_value(market, brownian, 0.0) == pytest.approx(0.5 * 0.25 * 0.09)

    @given(st.floats(min_value=-0.95, max_value=0.95), st.floats(min_value=-500.0, max_value=500.0))
    def test_brownian_formula(self, rho: float, hs: float) -> None:
        params = make_market()
        model = make_brownian(rho=rho)
        zeta = params.gamma_s * hs / params.m
        sharpe = 0.3 - zeta * rho * 10.0
        assert entropy_value(params, model, hs) == pytest.approx(
            0.5 * 0.25 * sharpe**2, rel=1e-8, abs=1e-12
        )

    def test_riskless_stock_without_drift(self, market: MarketParams) -> None:
        model = LevyModel(drift=(0.0, 0.0), covariance=((0.0, 0.0), (0.0, 100.0)), horizon=0.25)
        assert stock_value(market, model, 50.0) == (0.0, 0.0)

    def test_nonnegative_with_jumps(self, market: MarketParams, jump_model: LevyModel) -> None:
        for hs in (-200.0, 0.0, 150.0):
            eta, entropy = stock_value(market, jump_model, hs)
            assert entropy >= -1e-12
            assert np.isfinite(eta)

    def test_negative_entropy_is_reported(
        self, market: MarketParams, jump_model: LevyModel, monkeypatch, caplog
    ) -> None:
        # A root away from the minimiser gives a tilted cumulant above its minimum.
        monkeypatch.setattr("commodeq.investor.esscher_root", lambda triplet: 5.0)
        with caplog.at_level("WARNING", logger="commodeq.investor"):
            _, entropy = stock_value(market, jump_model, 0.0)
        assert entropy < -1e-12
        assert "negative stock entropy" in caplog.text


class TestUtility:
    def test_storage_checked(self, market: MarketParams, brownian: LevyModel) -> None:
        with pytest.raises(AlphaOutOfRange):
            investor_utility(market, brownian, -1.0, 0.0, 70.0)

    def test_no_position_is_entropy(self, market: MarketParams, brownian: LevyModel) -> None:
        value = investor_utility(market, brownian, 10.0, 0.0, 70.0)
        assert value == pytest.approx(entropy_value(market, brownian, 0.0) / market.gamma_s)

    def test_brownian_quadratic(self, market: MarketParams) -> None:
        model = make_brownian(rho=0.0)
        moments = terminal_moments(market, model, 10.0)
        hs, forward = 40.0, 80.0
        expected = (
            0.5 * 0.25 * 0.09 / market.gamma_s
            - 0.5 * market.gamma_s * moments.variance * hs**2
            + hs * (moments.mean - forward)
        )
        assert investor_utility(market, model, 10.0, hs, forward) == pytest.approx(expected)


class TestBestResponseBm:
    def test_fair_forward_without_stock_premium(self, market: MarketParams) -> None:
        model = make_brownian(rho=0.5, lambda_mpr=0.0)
        mean = terminal_moments(market, model, 20.0).mean
        assert best_response_bm(market, model, 20.0, mean).hs == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("shift", [-5.0, 5.0])
    def test_goes_long_below_expectation(self, market: MarketParams, shift: float) -> None:
        model = make_brownian(rho=0.3, lambda_mpr=0.0)
        mean = terminal_moments(market, model, 20.0).mean
        hs = best_response_bm(market, model, 20.0, mean + shift).hs
        assert np.sign(hs) == -np.sign(shift)

    def test_stock_hedge_term(self, market: MarketParams) -> None:
        model = make_brownian(rho=0.6)
        mean = terminal_moments(market, model, 0.0).mean
        hs = best_response_bm(market, model, 0.0, mean).hs
        effective = market.gamma_s * (1.0 - 0.36)
        assert hs == pytest.approx(-0.3 * 0.6 * 0.5 / (effective * 5.0))

    @given(st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=40.0, max_value=110.0))
    @settings(max_examples=30)
    def test_marginal_utility_vanishes(self, rho: float, forward: float) -> None:
        params = make_market()
        model = make_brownian(rho=rho)
        resp = best_response_bm(params, model, 25.0, forward)
        slope = central_difference(
            lambda h: investor_utility(params, model, 25.0, h, forward), resp.hs, 1e-3
        )
        assert slope == pytest.approx(0.0, abs=1e-6 * (1.0 + forward))
        assert resp.utility >= investor_utility(params, model, 25.0, resp.hs + 1.0, forward)

    def test_degenerate_correlation(self, market: MarketParams) -> None:
        with pytest.raises(DegenerateCorrelation):
            best_response_bm(market, make_brownian(rho=1.0), 0.0, 70.0)

    def test_zero_variance(self, market: MarketParams) -> None:
        with pytest.raises(ZeroVariance):
            best_response_bm(market, make_brownian(sigma2=0.0), 0.0, 70.0)


class TestBestResponseJd:
    def test_falls_back_without_atoms(self, market: MarketParams) -> None:
        model = make_jump(intensity=0.0)
        assert best_response_jd(market, model, 20.0, 70.0) == best_response_bm(
            market, model, 20.0, 70.0
        )

    def test_demand_jumps_only(self, market: MarketParams) -> None:
        # Jumps that leave the stock untouched.
        model = make_jump(eta1=0.0, eta2=-3.0, intensity=1.0)
        resp = best_response_jd(market, model, 20.0, 70.0)
        grid = investor_grid_response(market, model, 20.0, 70.0, (-400.0, 400.0), 1601)
        assert resp.hs == pytest.approx(grid, abs=0.5)

    @pytest.mark.parametrize("eta1, eta2", [(0.05, -8.0), (-0.05, 4.0), (0.1, 0.0)])
    def test_marginal_utility_vanishes(self, market: MarketParams, eta1: float, eta2: float) -> None:
        model = make_jump(eta1=eta1, eta2=eta2)
        resp = best_response_jd(market, model, 20.0, 70.0)
        assert resp.residual <= 1e-8 * (1.0 + 70.0)
        for step in (-1.0, 1.0):
            assert resp.utility >= investor_utility(market, model, 20.0, resp.hs + step, 70.0)

    def test_small_jumps_close_to_brownian(self, market: MarketParams) -> None:
        jd = best_response(market, make_jump(eta1=0.0, eta2=1e-3, intensity=1.0, drift1=0.04), 20.0, 70.0)
        bm = best_response_bm(market, make_brownian(), 20.0, 70.0)
        assert jd.hs == pytest.approx(bm.hs, rel=1e-5)

    def test_stock_and_demand_jumps_match_grid(self, market: MarketParams) -> None:
        model = make_jump(eta1=0.05, eta2=-8.0)
        resp = best_response_jd(market, model, 20.0, 70.0)
        grid = investor_grid_response(
            market, model, 20.0, 70.0, (resp.hs - 20.0, resp.hs + 20.0), 801
        )
        assert resp.hs == pytest.approx(grid, abs=0.2)

    @pytest.mark.parametrize("forward", [40.0, 64.8, 110.0])
    def test_default_jump_market(self, market: MarketParams, jump_model: LevyModel, forward: float) -> None:
        resp = best_response_jd(market, jump_model, 25.0, forward)
        mean = terminal_moments(market, jump_model, 25.0).mean
        assert resp.residual <= 1e-8 * (1.0 + forward + abs(mean - forward))
        assert np.isfinite(resp.utility)


class TestMarginalUtility:
    @pytest.mark.parametrize("hs", [-300.0, -40.0, 0.0, 25.0, 200.0])
    @pytest.mark.parametrize("eta1, eta2", [(0.05, -8.0), (-0.05, 4.0), (0.0, -3.0)])
    def test_matches_utility_slope(
        self, market: MarketParams, hs: float, eta1: float, eta2: float
    ) -> None:
        model = make_jump(eta1=eta1, eta2=eta2, rho=0.3)
        slope = central_difference(
            lambda h: investor_utility(market, model, 20.0, h, 70.0), hs, 1e-3
        )
        assert marginal_utility(market, model, 20.0, hs, 70.0) == pytest.approx(
            slope, rel=1e-5, abs=1e-6
        )

    @given(st.floats(min_value=-0.9, max_value=0.9), st.floats(min_value=-400.0, max_value=400.0))
    @settings(max_examples=30)
    def test_brownian_closed_form(self, rho: float, hs: float) -> None:
        params = make_market()
        model = make_brownian(rho=rho)
        moments = terminal_moments(params, model, 25.0)
        effective = params.gamma_s * (1.0 - rho * rho)
        expected = (
            moments.mean
            - 70.0
            - effective * moments.variance * hs
            - 0.3 * rho * np.sqrt(0.25) * moments.std
        )
        assert marginal_utility(params, model, 25.0, hs, 70.0) == pytest.approx(
            expected, rel=1e-9, abs=1e-9
        )

    def test_decreasing(self, market: MarketParams, jump_model: LevyModel) -> None:
        values = [marginal_utility(market, jump_model, 20.0, h, 70.0) for h in np.linspace(-500, 500, 21)]
        assert all(np.diff(values) < 0.0)
