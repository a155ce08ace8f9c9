"""
Shared fixtures for the commodeq test suite.

Read more about conftest.py under:
- https://docs.pytest.org/en/stable/fixture.html
- https://docs.pytest.org/en/stable/writing_plugins.html
"""

import os
import sys

# Add src directory to Python path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

import pytest  # noqa: E402

from commodeq.levy_models import LevyModel  # noqa: E402
from commodeq.market_core import MarketParams  # noqa: E402

# Repo default market: mu=200, m=1, pi0=pi_t=100, eps=0.05, R=0.01.
DEFAULT_MARKET = dict(
    mu=200.0,
    m=1.0,
    pi0=100.0,
    pi_t=100.0,
    eps=0.05,
    rate=0.01,
    gamma_p=0.04,
    gamma_s=0.004,
)
DEFAULT_BROWNIAN = dict(sigma1=0.2, sigma2=10.0, rho=0.0, lambda_mpr=0.3, horizon=0.25)


def make_market(**changes: float) -> MarketParams:
    return MarketParams(**{**DEFAULT_MARKET, **changes})


def make_brownian(**changes: float) -> LevyModel:
    return LevyModel.brownian(**{**DEFAULT_BROWNIAN, **changes})


def make_jump(**changes: float) -> LevyModel:
    values = dict(
        sigma1=0.2,
        sigma2=10.0,
        rho=0.0,
        drift1=0.06,
        drift2=0.0,
        eta1=0.05,
        eta2=-8.0,
        intensity=2.0,
        horizon=0.25,
    )
    values.update(changes)
    return LevyModel.jump_diffusion(**values)


@pytest.fixture
def market() -> MarketParams:
    return make_market()


@pytest.fixture
def brownian() -> LevyModel:
    return make_brownian()


@pytest.fixture
def jump_model() -> LevyModel:
    return make_jump()


@pytest.fixture
def scenario_dict() -> dict:
    return {
        "name": "test",
        "market": dict(DEFAULT_MARKET),
        "model": {
            "kind": "brownian",
            "horizon": 0.25,
            "sigma1": 0.2,
            "sigma2": 10.0,
            "rho": 0.0,
            "lambda_mpr": 0.3,
        },
    }
