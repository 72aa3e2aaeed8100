# Copyright 2024 The jumpdiff developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""
Tests for the closed-form call prices.
"""
import math

import numpy as np
import pytest
from scipy import integrate, stats

from jumpdiff.models import GbmParams, MertonParams
from jumpdiff.pricing import CallSpec, bs_call, merton_call

SPEC = CallSpec(s0=100.0, strike=100.0, maturity_years=1.0, discount_rate=0.08)


def _quadrature_call(spec, sigma):
    """Discounted risk-neutral expected payoff, integrated over the normal."""
    maturity = spec.maturity_years
    drift = (spec.discount_rate - sigma ** 2 / 2) * maturity
    spread = sigma * math.sqrt(maturity)
    money = (math.log(spec.strike / spec.s0) - drift) / spread

    def payoff(z):
        return (spec.s0 * math.exp(drift + spread * z) - spec.strike) * stats.norm.pdf(z)

    value, _ = integrate.quad(payoff, money, np.inf)
    return spec.discount_factor * value


@pytest.mark.parametrize('spec, sigma', (
    (SPEC, 0.4),
    (CallSpec(s0=100.0, strike=120.0, maturity_years=2.0, discount_rate=0.03), 0.25),
    (CallSpec(s0=50.0, strike=40.0, maturity_years=0.5), 0.6),
))
def test_bs_matches_quadrature(spec, sigma):
    assert bs_call(spec, sigma) == pytest.approx(_quadrature_call(spec, sigma), rel=1e-7)


def test_bs_known_value():
    spec = CallSpec(s0=100.0, strike=100.0, maturity_years=1.0, discount_rate=0.05)
    assert bs_call(spec, 0.2) == pytest.approx(10.4506, abs=1e-4)


def test_bs_zero_volatility():
    assert bs_call(CallSpec(s0=100.0, strike=100.0, maturity_years=1.0), 0.0) == 0.0
    assert bs_call(SPEC, 0.0) == pytest.approx(100 - 100 * math.exp(-0.08))
    out_of_money = CallSpec(s0=100.0, strike=120.0, maturity_years=1.0, discount_rate=0.08)
    assert bs_call(out_of_money, 0.0) == 0.0


def test_bs_tiny_strike():
    spec = CallSpec(s0=100.0, strike=1e-9, maturity_years=1.0)
    assert bs_call(spec, 0.4) == pytest.approx(100.0)


def test_bs_monotone():
    sigmas = [0.05, 0.1, 0.2, 0.4, 0.8]
    prices = [bs_call(SPEC, sigma) for sigma in sigmas]
    assert prices == sorted(prices)
    strikes = [60, 80, 100, 120, 140]
    prices = [bs_call(CallSpec(100.0, strike, 1.0, 0.08), 0.4) for strike in strikes]
    assert prices == sorted(prices, reverse=True)


@pytest.mark.parametrize('sigma', (-0.1, math.nan))
def test_bs_bad_volatility(sigma):
    with pytest.raises(ValueError):
        bs_call(SPEC, sigma)


@pytest.mark.parametrize('kwargs', (
    {'s0': 0},
    {'strike': -1},
    {'maturity_years': 0},
    {'discount_rate': -0.01},
    {'s0': math.inf},
))
def test_call_spec_errors(kwargs):
    arguments = dict(s0=100.0, strike=100.0, maturity_years=1.0)
    arguments.update(kwargs)
    with pytest.raises(ValueError):
        CallSpec(**arguments)


def test_merton_without_jumps():
    params = MertonParams(GbmParams(mu=0.3, sigma=0.4), lam=0, mu_j=0.1, sigma_j=0.1)
    assert merton_call(SPEC, params) == bs_call(SPEC, 0.4)


def test_merton_zero_size_jumps():
    params = MertonParams(GbmParams(mu=0.3, sigma=0.4), lam=1, mu_j=0.0, sigma_j=0.0)
    assert merton_call(SPEC, params) == pytest.approx(bs_call(SPEC, 0.4), rel=1e-10)


def test_merton_jumps_add_value():
    params = MertonParams(GbmParams(mu=0.08, sigma=0.4), lam=2, mu_j=0.0, sigma_j=0.2)
    assert merton_call(SPEC, params) > bs_call(SPEC, 0.4)


def test_merton_series_converges():
    params = MertonParams(GbmParams(mu=0.1, sigma=0.5), lam=10, mu_j=0.05, sigma_j=0.025)
    assert merton_call(SPEC, params, n_terms=60) == pytest.approx(
        merton_call(SPEC, params, n_terms=120), rel=1e-12)


@pytest.mark.parametrize('n_terms', (0, 2.5))
def test_merton_bad_terms(n_terms):
    params = MertonParams(GbmParams(mu=0.1, sigma=0.5), lam=1, mu_j=0.0, sigma_j=0.1)
    with pytest.raises(ValueError):
        merton_call(SPEC, params, n_terms)


def test_to_dict():
    assert SPEC.to_dict() == {'s0': 100.0, 'strike': 100.0, 'maturity_years': 1.0,
                              'discount_rate': 0.08}
