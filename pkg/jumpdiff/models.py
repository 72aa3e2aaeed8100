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
Parameter sets of the asset models, the simulation grid, and simulated paths.

All rates are annual. A model's log-price over a step of length ``dt`` moves
by ``(mu - sigma**2 / 2) * dt + sigma * sqrt(dt) * Z`` plus the sum of the
jump exponents that arrive during the step.
"""
import dataclasses
import math

import numpy as np

from .random_streams import validate_seed

TRADING_DAYS = 252


def _require_finite(owner, **values):
    for name, value in values.items():
        if not math.isfinite(value):
            raise ValueError('{}.{} must be finite, got {}.'.format(owner, name, value))


def _require_nonnegative(owner, **values):
    for name, value in values.items():
        if value < 0:
            raise ValueError('{}.{} must be >= 0, got {}.'.format(owner, name, value))


@dataclasses.dataclass(frozen=True)
class GbmParams:
    """
    Geometric Brownian motion.

    Attributes
    ----------
    mu: float
        Drift, the expected rate of return per year.
    sigma: float
        Volatility per square-root year.
    """
    mu: float
    sigma: float

    def __post_init__(self):
        _require_finite('GbmParams', mu=self.mu, sigma=self.sigma)
        _require_nonnegative('GbmParams', sigma=self.sigma)

    @property
    def gbm(self):
        return self

    @property
    def tag(self):
        return 'gbm'

    def jump_compensator(self):
        return 0.0

    def with_drift(self, mu):
        return dataclasses.replace(self, mu=mu)


class _JumpModel:
    """
    Shared behaviour of the jump models; subclasses are frozen dataclasses
    with a `gbm` field.
    """
    tag = None

    def jump_compensator(self):
        """
        Expected relative price change per year due to jumps,
        ``sum(lambda * (E[exp(Y)] - 1))`` over the jump streams.
        """
        raise NotImplementedError

    def with_drift(self, mu):
        """
        Copy of the parameters with the diffusion drift replaced by `mu`.
        """
        return dataclasses.replace(self, gbm=self.gbm.with_drift(mu))

    @property
    def mu(self):
        return self.gbm.mu

    @property
    def sigma(self):
        return self.gbm.sigma


@dataclasses.dataclass(frozen=True)
class MertonParams(_JumpModel):
    """
    Compound Poisson jump diffusion with normally distributed jump exponents.

    Attributes
    ----------
    gbm: GbmParams
    lam: float
        Expected number of jumps per year.
    mu_j: float
        Mean of the jump exponent.
    sigma_j: float
        Standard deviation of the jump exponent.
    """
    gbm: GbmParams
    lam: float
    mu_j: float
    sigma_j: float
    tag = 'merton'

    def __post_init__(self):
        _require_finite('MertonParams', lam=self.lam, mu_j=self.mu_j, sigma_j=self.sigma_j)
        _require_nonnegative('MertonParams', lam=self.lam, sigma_j=self.sigma_j)

    def mean_jump_factor(self):
        """E[exp(Y)]"""
        return math.exp(self.mu_j + 0.5 * self.sigma_j ** 2)

    def jump_compensator(self):
        return self.lam * (self.mean_jump_factor() - 1)


@dataclasses.dataclass(frozen=True)
class KouParams(_JumpModel):
    """
    Jump diffusion with double exponential jump exponents: upward with
    probability `p` and rate `eta1`, downward with probability ``q = 1 - p``
    and rate `eta2`.
    """
    gbm: GbmParams
    lam: float
    p: float
    eta1: float
    eta2: float
    tag = 'kou'

    def __post_init__(self):
        _require_finite('KouParams', lam=self.lam, p=self.p, eta1=self.eta1, eta2=self.eta2)
        _require_nonnegative('KouParams', lam=self.lam)
        if not 0 <= self.p <= 1:
            raise ValueError('KouParams.p must be in [0, 1], got {}.'.format(self.p))
        # E[exp(Y)] is infinite for eta1 <= 1.
        if self.eta1 <= 1:
            raise ValueError('KouParams.eta1 must be > 1, got {}.'.format(self.eta1))
        if self.eta2 <= 0:
            raise ValueError('KouParams.eta2 must be > 0, got {}.'.format(self.eta2))

    @property
    def q(self):
        return 1 - self.p

    def mean_jump(self):
        """E[Y] = p / eta1 - q / eta2"""
        return self.p / self.eta1 - self.q / self.eta2

    def mean_jump_factor(self):
        """E[exp(Y)]"""
        return self.p * self.eta1 / (self.eta1 - 1) + self.q * self.eta2 / (self.eta2 + 1)

    def jump_compensator(self):
        return self.lam * (self.mean_jump_factor() - 1)


@dataclasses.dataclass(frozen=True)
class SplitJumpParams(_JumpModel):
    """
    Jump diffusion with independent Poisson streams of upward and downward
    jumps. Upward exponents are Exponential(`eta_up`), downward exponents
    are minus Exponential(`eta_down`), so ``1 / eta`` is the mean jump size
    of each side.
    """
    gbm: GbmParams
    lambda_up: float
    eta_up: float
    lambda_down: float
    eta_down: float
    tag = 'split'

    def __post_init__(self):
        _require_finite('SplitJumpParams', lambda_up=self.lambda_up, eta_up=self.eta_up,
                        lambda_down=self.lambda_down, eta_down=self.eta_down)
        _require_nonnegative('SplitJumpParams', lambda_up=self.lambda_up,
                             lambda_down=self.lambda_down)
        if self.eta_up <= 1:
            raise ValueError('SplitJumpParams.eta_up must be > 1, got {}.'.format(self.eta_up))
        if self.eta_down <= 0:
            raise ValueError('SplitJumpParams.eta_down must be > 0, got {}.'.format(self.eta_down))

    def mean_log_jump(self):
        """Expected sum of jump exponents per year."""
        return self.lambda_up / self.eta_up - self.lambda_down / self.eta_down

    def jump_compensator(self):
        up = self.lambda_up * (self.eta_up / (self.eta_up - 1) - 1)
        down = self.lambda_down * (self.eta_down / (self.eta_down + 1) - 1)
        return up + down


MODEL_TYPES = (GbmParams, MertonParams, KouParams, SplitJumpParams)


def params_to_dict(params):
    """
    Flat, JSON-ready description of a parameter set: the model tag, the
    diffusion parameters and the jump parameters.
    """
    document = {'model': params.tag, 'mu': params.gbm.mu, 'sigma': params.gbm.sigma}
    if not isinstance(params, GbmParams):
        for field in dataclasses.fields(params):
            if field.name != 'gbm':
                document[field.name] = getattr(params, field.name)
    return document


def expected_terminal(params, s0, horizon_years):
    """
    E[S_T] under `params`: ``s0 * exp((mu + compensator) * T)``.
    """
    return s0 * math.exp((params.gbm.mu + params.jump_compensator()) * horizon_years)


def risk_neutral(params, rate):
    """
    Replace the drift of `params` by ``rate - compensator``, which makes the
    discounted price a martingale.
    """
    return params.with_drift(rate - params.jump_compensator())


@dataclasses.dataclass(frozen=True)
class SimGrid:
    """
    Time grid and ensemble size of a simulation.

    Attributes
    ----------
    s0: float
        Initial price.
    horizon_years: float
    n_steps: int
    n_paths: int
    seed: int
    """
    s0: float
    horizon_years: float
    n_steps: int
    n_paths: int
    seed: int

    def __post_init__(self):
        if not (math.isfinite(self.s0) and self.s0 > 0):
            raise ValueError('SimGrid.s0 must be > 0, got {}.'.format(self.s0))
        if not (math.isfinite(self.horizon_years) and self.horizon_years > 0):
            raise ValueError('SimGrid.horizon_years must be > 0, got {}.'.format(self.horizon_years))
        for name in ('n_steps', 'n_paths'):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError('SimGrid.{} must be an integer >= 1, got {}.'.format(name, value))
        validate_seed(self.seed)

    @property
    def dt(self):
        return self.horizon_years / self.n_steps

    @property
    def times(self):
        return np.arange(self.n_steps + 1) * self.dt

    def with_paths(self, n_paths):
        return dataclasses.replace(self, n_paths=n_paths)


@dataclasses.dataclass(frozen=True, eq=False)
class PathSet:
    """
    An ensemble of simulated trajectories.

    Attributes
    ----------
    times: numpy.ndarray
        ``n_steps + 1`` time points in years, starting at 0.
    values: numpy.ndarray
        ``(n_paths, n_steps + 1)`` array of prices (or account values).
    model_tag: str
        Which model generated the paths.
    seed: int
    absorbed: numpy.ndarray or None
        Per path, whether it was absorbed at zero. Only account paths can be
        absorbed; absorbed paths are exempt from the positivity check.
    """
    times: np.ndarray
    values: np.ndarray
    model_tag: str
    seed: int
    absorbed: np.ndarray = None

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.times):
            raise ValueError('PathSet values must have one column per time point.')
        if self.times[0] != 0 or np.any(np.diff(self.times) <= 0):
            raise ValueError('PathSet times must start at 0 and be ascending.')
        alive = self.values if self.absorbed is None else self.values[~self.absorbed]
        if not np.all(alive > 0):
            raise ValueError('PathSet values must be strictly positive.')
        self.times.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def n_paths(self):
        return self.values.shape[0]

    @property
    def n_steps(self):
        return self.values.shape[1] - 1

    @property
    def terminal(self):
        return self.values[:, -1]

    def __eq__(self, other):
        if not isinstance(other, PathSet):
            return NotImplemented
        return (self.model_tag == other.model_tag
                and self.seed == other.seed
                and np.array_equal(self.times, other.times)
                and np.array_equal(self.values, other.values))

    __hash__ = None
