import numpy as np
import pytest

from commodeq.errors import AlphaOutOfRange, InvalidParams
from commodeq.levy_models import LevyModel
from commodeq.market_core import (
    LegacyHedge,
    MarketParams,
    check_alpha,
    demand,
    hedge_ratio,
    inverse_demand,
    producer_position,
    quad_revenue,
    spot_price_initial,
    terminal_moments,
    terminal_price,
)

from .conftest import make_market


class TestMarketParams:
    @pytest.mark.parametrize(
        "changes",
        [
            {"m": -1.0},
            {"gamma_p": 0.0},
            {"gamma_s": -0.1},
            {"eps": 1.0},
            {"eps": -0.1},
            {"pi0": -1.0},
            {"rate": -1.0},
            {"mu": float("inf")},
        ],
    )
    def test_rejects(self, changes: dict) -> None:
        with pytest.raises(InvalidParams):
            make_market(**changes)

    def test_replace_validates(self, market: MarketParams) -> None:
        assert market.replace(gamma_p=0.01).gamma_p == 0.01
        assert market.gamma_p == 0.04
        with pytest.raises(InvalidParams):
            market.replace(m=0.0)

    def test_legacy_accessors(self, market: MarketParams) -> None:
        assert market.legacy_position == 0.0
        hedged = market.replace(legacy_hedge=LegacyHedge(-20.0, 90.0))
        assert (hedged.legacy_position, hedged.legacy_strike) == (-20.0, 90.0)

    def test_invalid_error_is_value_error(self) -> None:
        with pytest.raises(ValueError):
            make_market(m=0.0)


class TestPrices:
    def test_demand_inverse(self, market: MarketParams) -> None:
        assert inverse_demand(market, demand(market, 37.5)) == pytest.approx(37.5)

    def test_spot_initial(self, market: MarketParams) -> None:
        assert spot_price_initial(market, 0.0) == 100.0
        assert spot_price_initial(market, 13.0) == pytest.approx(113.0)

    def test_alpha_range(self, market: MarketParams) -> None:
        check_alpha(market, 0.0)
        check_alpha(market, 100.0)
        with pytest.raises(AlphaOutOfRange) as info:
            spot_price_initial(market, 100.5)
        assert info.value.pi0 == 100.0
        with pytest.raises(AlphaOutOfRange):
            terminal_price(market, -1.0)

    def test_terminal_price_array(self, market: MarketParams) -> None:
        x = np.array([-10.0, 0.0, 10.0])
        prices = terminal_price(market, 20.0, x)
        assert prices == pytest.approx([71.0, 81.0, 91.0])

    def test_moments(self, market: MarketParams, brownian: LevyModel) -> None:
        moments = terminal_moments(market, brownian, 10.0)
        assert moments.mean == pytest.approx(100.0 - 9.5)
        assert moments.variance == pytest.approx(25.0)
        assert moments.std == pytest.approx(5.0)

    def test_moments_with_jumps_and_drift(self, market: MarketParams) -> None:
        model = LevyModel.jump_diffusion(0.2, 10.0, 0.0, 0.05, 4.0, 0.0, -3.0, 2.0, 0.25)
        moments = terminal_moments(market, model, 0.0)
        assert moments.mean == pytest.approx(100.0 + 1.0)
        assert moments.variance == pytest.approx(0.25 * (100.0 + 2.0 * 9.0))


class TestWealth:
    def test_split_matches_position(self, market: MarketParams) -> None:
        alpha, hp, forward = 12.0, -40.0, 95.0
        x = np.linspace(-20.0, 20.0, 5)
        wealth = producer_position(market, alpha, hp, forward, x)
        split = quad_revenue(market, alpha, hp, forward) + hedge_ratio(market, alpha, hp) * x
        assert wealth == pytest.approx(split)

    def test_split_with_legacy_hedge(self) -> None:
        params = make_market(m=2.0, legacy_hedge=LegacyHedge(-15.0, 48.0))
        alpha, hp, forward = 30.0, -25.0, 47.0
        x = np.array([-3.0, 0.5, 8.0])
        wealth = producer_position(params, alpha, hp, forward, x)
        split = quad_revenue(params, alpha, hp, forward) + hedge_ratio(params, alpha, hp) * x
        assert wealth == pytest.approx(split)

    def test_hedge_ratio_zero_for_full_hedge(self, market: MarketParams) -> None:
        alpha = 10.0
        hp = -(market.pi_t + alpha * (1 - market.eps))
        assert hedge_ratio(market, alpha, hp) == pytest.approx(0.0, abs=1e-12)

    def test_quad_revenue_vectorised(self, market: MarketParams) -> None:
        alphas = np.array([[0.0, 10.0], [20.0, 30.0]])
        hedges = np.array([[-5.0, 0.0], [5.0, 10.0]])
        values = quad_revenue(market, alphas, hedges, 90.0)
        assert values.shape == (2, 2)
        assert values[1, 0] == pytest.approx(quad_revenue(market, 20.0, 5.0, 90.0))

    def test_quad_revenue_example(self) -> None:
        params = MarketParams(mu=100.0, m=1.0, pi0=50.0, pi_t=40.0, eps=0.1, rate=0.02)
        assert quad_revenue(params, 5.0, -3.0, 58.0) == pytest.approx(5001.75)
