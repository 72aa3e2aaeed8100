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
European call contracts and their closed-form prices.
"""
import dataclasses
import math

from scipy import stats

DEFAULT_MERTON_TERMS = 60


@dataclasses.dataclass(frozen=True)
class CallSpec:
    """
    A European call.

    Attributes
    ----------
    s0: float
        Spot price.
    strike: float
    maturity_years: float
    discount_rate: float
        Continuously compounded, per year.
    """
    s0: float
    strike: float
    maturity_years: float
    discount_rate: float = 0.0

    def __post_init__(self):
        for name in ('s0', 'strike', 'maturity_years'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError('CallSpec.{} must be > 0, got {}.'.format(name, value))
        if not (math.isfinite(self.discount_rate) and self.discount_rate >= 0):
            raise ValueError('CallSpec.discount_rate must be >= 0, got {}.'
                             .format(self.discount_rate))

    @property
    def discount_factor(self):
        return math.exp(-self.discount_rate * self.maturity_years)

    def to_dict(self):
        return dataclasses.asdict(self)


def _black_scholes(s0, strike, maturity, rate, sigma):
    discounted_strike = strike * math.exp(-rate * maturity)
    if sigma == 0:
        return max(s0 - discounted_strike, 0.0)
    spread = sigma * math.sqrt(maturity)
    d1 = (math.log(s0 / strike) + (rate + 0.5 * sigma ** 2) * maturity) / spread
    d2 = d1 - spread
    return s0 * stats.norm.cdf(d1) - discounted_strike * stats.norm.cdf(d2)


def bs_call(spec, sigma):
    """
    Black-Scholes price of the call `spec` on an asset with volatility
    `sigma`, at rate ``spec.discount_rate``.

    Parameters
    ----------
    spec: CallSpec
    sigma: float

    Returns
    -------
    float
    """
    if not (math.isfinite(sigma) and sigma >= 0):
        raise ValueError('The volatility must be >= 0, got {}.'.format(sigma))
    return float(_black_scholes(spec.s0, spec.strike, spec.maturity_years,
                                spec.discount_rate, sigma))


def merton_call(spec, params, n_terms=DEFAULT_MERTON_TERMS):
    """
    Price of the call `spec` under a compound Poisson jump diffusion, as a
    Poisson-weighted sum of Black-Scholes prices.

    Conditional on ``n`` jumps before maturity the log price is normal, and
    the call is a Black-Scholes call with variance ``sigma**2 + n sigma_j**2 / T``
    and rate ``r - lambda k + n log(1 + k) / T``, where ``k = E[exp(Y)] - 1``.
    The weights are Poisson with mean ``lambda (1 + k) T``. Only the jump law
    of `params` is used; the drift is replaced by the risk-neutral one.

    Parameters
    ----------
    spec: CallSpec
    params: jumpdiff.models.MertonParams
    n_terms: int
        Number of terms of the series.

    Returns
    -------
    float
    """
    if int(n_terms) != n_terms or n_terms < 1:
        raise ValueError('The number of series terms must be >= 1, got {}.'.format(n_terms))
    sigma = params.sigma
    if params.lam == 0:
        return bs_call(spec, sigma)
    maturity = spec.maturity_years
    k = params.mean_jump_factor() - 1
    weight_mean = params.lam * (1 + k) * maturity
    log_growth = math.log1p(k)
    price = 0.0
    for n in range(int(n_terms)):
        weight = stats.poisson.pmf(n, weight_mean)
        variance = sigma ** 2 + n * params.sigma_j ** 2 / maturity
        rate = spec.discount_rate - params.lam * k + n * log_growth / maturity
        price += weight * _black_scholes(spec.s0, spec.strike, maturity, rate, math.sqrt(variance))
    return float(price)
