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
Bayesian calibration of the compound Poisson jump diffusion from daily
closes, with a Metropolis-within-Gibbs sampler.

Every day carries a latent jump indicator ``J[k]`` (at most one jump per day,
with probability ``lambda * dt``) and, on jump days, a latent jump exponent
``xi[k]``. Given the latent variables, daily log returns are normal::

    r[k] ~ N((mu - sigma**2 / 2) dt + J[k] xi[k], sigma**2 dt)

One sweep updates, in order, the indicators (with the jump exponents
integrated out), the exponents of the jump days, ``mu``, ``sigma**2``,
``lambda``, ``mu_j`` and ``sigma_j**2``. Most blocks are drawn from their
exact full conditionals. ``sigma**2`` also appears in the mean of the
returns and gets a random-walk Metropolis step on its logarithm. ``lambda``
is proposed from its gamma conditional under a Poisson approximation of the
indicators, and the accept test corrects for the Bernoulli indicators.
"""
import dataclasses
import math

import numpy as np
from scipy import special

from ..file_writer import open_output, write_json
from ..log_helpers import StyleAdapter, get_logger
from ..models import TRADING_DAYS, GbmParams, MertonParams
from ..random_streams import Purpose, substream, validate_seed
from .estimators import log_returns

LOGGER = StyleAdapter(get_logger(__name__))

SIGMA_FLOOR = 1e-8
MIN_OBSERVATIONS = 30
PARAMETER_NAMES = ('mu', 'sigma', 'lambda', 'mu_j', 'sigma_j')
# Largest daily jump probability; keeps log(1 - lambda * dt) finite.
MAX_JUMP_PROBABILITY = 0.999
# Optimal random-walk scale for a one dimensional target.
RW_SCALE = 2.38
# Median absolute deviation of a normal sample, in standard deviations.
MAD_TO_SD = 1.4826
# Returns further than this many robust standard deviations from the median
# start out as jump days.
INITIAL_JUMP_CUTOFF = 2.5


class SamplerError(ArithmeticError):
    """
    Raised when the sampler state or its likelihood stops being finite.
    """


def _positive(owner, **values):
    for name, value in values.items():
        if not (math.isfinite(value) and value > 0):
            raise ValueError('{}.{} must be > 0, got {}.'.format(owner, name, value))


@dataclasses.dataclass(frozen=True)
class PriorSpec:
    """
    Conjugate priors of the jump diffusion parameters, all on annual scales.

    Attributes
    ----------
    drift_mean, drift_var: float
        Normal prior of ``mu``.
    var_shape, var_scale: float
        Inverse-gamma prior of ``sigma**2``.
    lambda_shape, lambda_rate: float
        Gamma prior of ``lambda``.
    jump_mean, jump_mean_var: float
        Normal prior of ``mu_j``.
    jump_var_shape, jump_var_scale: float
        Inverse-gamma prior of ``sigma_j**2``.
    """
    drift_mean: float = 0.0
    drift_var: float = 1.0
    var_shape: float = 2.5
    var_scale: float = 0.1
    lambda_shape: float = 2.0
    lambda_rate: float = 0.2
    jump_mean: float = 0.0
    jump_mean_var: float = 0.25
    jump_var_shape: float = 2.5
    jump_var_scale: float = 0.01

    def __post_init__(self):
        for name in ('drift_mean', 'jump_mean'):
            if not math.isfinite(getattr(self, name)):
                raise ValueError('PriorSpec.{} must be finite.'.format(name))
        _positive('PriorSpec', drift_var=self.drift_var, var_shape=self.var_shape,
                  var_scale=self.var_scale, lambda_shape=self.lambda_shape,
                  lambda_rate=self.lambda_rate, jump_mean_var=self.jump_mean_var,
                  jump_var_shape=self.jump_var_shape, jump_var_scale=self.jump_var_scale)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class GibbsConfig:
    """
    Length, thinning and seed of one sampler run.

    Attributes
    ----------
    iterations: int
        Total number of sweeps, burn-in included.
    burn_in: int
        Number of initial sweeps that are discarded.
    thinning: int
        Keep every `thinning`-th sweep after the burn-in.
    seed: int
    priors: PriorSpec
    """
    iterations: int = 20000
    burn_in: int = 5000
    thinning: int = 5
    seed: int = 0
    priors: PriorSpec = PriorSpec()

    def __post_init__(self):
        for name, minimum in (('iterations', 1), ('burn_in', 0), ('thinning', 1)):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < minimum:
                raise ValueError('GibbsConfig.{} must be an integer >= {}, got {}.'
                                 .format(name, minimum, value))
        if self.burn_in >= self.iterations:
            raise ValueError('The burn-in ({}) must be shorter than the number of '
                             'iterations ({}).'.format(self.burn_in, self.iterations))
        validate_seed(self.seed)

    @property
    def kept_sweeps(self):
        """Indices of the sweeps whose state is stored."""
        return range(self.burn_in, self.iterations, self.thinning)

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True, eq=False)
class PosteriorChain:
    """
    The stored draws of a sampler run.

    Attributes
    ----------
    draws: numpy.ndarray
        Shape ``(n_draws, 5)``; columns follow :data:`PARAMETER_NAMES`.
    accept_count: int
        Accepted Metropolis proposals for ``sigma**2``, over all sweeps.
    config: GibbsConfig
    diagnostics: dict
        Flags raised while sampling, e.g. ``sigma_floor``.
    """
    draws: np.ndarray
    accept_count: int
    config: GibbsConfig
    diagnostics: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self):
        draws = np.array(self.draws, dtype=float).reshape(-1, len(PARAMETER_NAMES))
        object.__setattr__(self, 'draws', draws)
        draws.setflags(write=False)
        if not np.all(np.isfinite(draws)):
            raise SamplerError('The chain contains non-finite draws.')
        if np.any(self.column('sigma') <= 0) or np.any(self.column('sigma_j') <= 0):
            raise ValueError('Posterior draws must have sigma > 0 and sigma_j > 0.')
        if np.any(self.column('lambda') < 0):
            raise ValueError('Posterior draws must have lambda >= 0.')

    def __len__(self):
        return self.draws.shape[0]

    def column(self, name):
        """The draws of parameter `name`, one of :data:`PARAMETER_NAMES`."""
        return self.draws[:, PARAMETER_NAMES.index(name)]

    @property
    def sweeps(self):
        """Sweep index of every stored draw."""
        return np.array(self.config.kept_sweeps)[:len(self)]

    @property
    def acceptance_rate(self):
        return self.accept_count / self.config.iterations

    def posterior_mean_params(self):
        """
        The :class:`~jumpdiff.models.MertonParams` at the posterior mean.
        """
        means = self.draws.mean(axis=0)
        values = dict(zip(PARAMETER_NAMES, means))
        return MertonParams(gbm=GbmParams(mu=values['mu'], sigma=values['sigma']),
                            lam=values['lambda'], mu_j=values['mu_j'],
                            sigma_j=values['sigma_j'])


def _log_normal_density(x, mean, var):
    return -0.5 * (np.log(2 * np.pi * var) + (x - mean) ** 2 / var)


class _SamplerState:
    """
    Mutable state of one chain. Variances are stored, not standard deviations.
    """
    def __init__(self, returns, priors, dt):
        self.returns = returns
        self.priors = priors
        self.dt = dt
        n = returns.size
        # Start from a robust split of the returns into diffusion days and jump days.
        center = float(np.median(returns))
        spread = MAD_TO_SD * float(np.median(np.abs(returns - center)))
        if spread == 0:
            spread = float(np.std(returns))
        flagged = np.abs(returns - center) > INITIAL_JUMP_CUTOFF * spread
        calm = returns[~flagged]
        sig2 = max(float(np.var(calm, ddof=1)) / dt if calm.size > 1 else 0.0,
                   SIGMA_FLOOR ** 2)
        self.sig2 = sig2
        self.mu = float(np.mean(calm)) / dt + 0.5 * sig2 if calm.size else 0.0
        n_flagged = int(flagged.sum())
        if n_flagged:
            self.lam = n_flagged / (n * dt)
            self.mu_j = float(np.mean(returns[flagged] - center))
        else:
            self.lam = priors.lambda_shape / priors.lambda_rate
            self.mu_j = priors.jump_mean
        self.sig2_j = priors.jump_var_scale / (priors.jump_var_shape + 1)
        self.jumps = flagged
        self.xi = np.where(flagged, returns - center, 0.0)
        self.floored = False

    @property
    def diffusion_mean(self):
        return (self.mu - 0.5 * self.sig2) * self.dt

    def as_draw(self):
        return (self.mu, math.sqrt(self.sig2), self.lam, self.mu_j, math.sqrt(self.sig2_j))

    def check(self, sweep):
        if not all(math.isfinite(value) for value in self.as_draw()):
            raise SamplerError('The sampler state became non-finite at sweep {}: {}.'
                               .format(sweep, dict(zip(PARAMETER_NAMES, self.as_draw()))))


def _sample_indicators(state, rng):
    jump_prob = min(max(state.lam * state.dt, np.finfo(float).tiny), MAX_JUMP_PROBABILITY)
    base_var = state.sig2 * state.dt
    log_odds = (math.log(jump_prob) - math.log1p(-jump_prob)
                + _log_normal_density(state.returns, state.diffusion_mean + state.mu_j,
                                      base_var + state.sig2_j)
                - _log_normal_density(state.returns, state.diffusion_mean, base_var))
    if not np.all(np.isfinite(log_odds)):
        raise SamplerError('Non-finite likelihood while sampling jump indicators.')
    with np.errstate(over='ignore'):
        jump_probs = special.expit(log_odds)
    state.jumps = rng.random(state.returns.size) < jump_probs


def _sample_jump_sizes(state, rng):
    state.xi[:] = 0
    idx = np.flatnonzero(state.jumps)
    if not idx.size:
        return
    base_var = state.sig2 * state.dt
    precision = 1 / base_var + 1 / state.sig2_j
    residual = state.returns[idx] - state.diffusion_mean
    mean = (residual / base_var + state.mu_j / state.sig2_j) / precision
    state.xi[idx] = mean + rng.standard_normal(idx.size) / math.sqrt(precision)


def _sample_drift(state, rng):
    priors = state.priors
    excess = state.returns - state.xi + 0.5 * state.sig2 * state.dt
    precision = 1 / priors.drift_var + state.returns.size * state.dt / state.sig2
    mean = (priors.drift_mean / priors.drift_var + excess.sum() / state.sig2) / precision
    state.mu = mean + rng.standard_normal() / math.sqrt(precision)


def _log_variance_target(state, sig2, diffusion):
    """
    Log full conditional of ``log(sigma**2)``, up to a constant.
    """
    priors = state.priors
    dt = state.dt
    mean = (state.mu - 0.5 * sig2) * dt
    likelihood = -0.5 * diffusion.size * math.log(sig2) \
        - float(np.sum((diffusion - mean) ** 2)) / (2 * sig2 * dt)
    prior = -(priors.var_shape + 1) * math.log(sig2) - priors.var_scale / sig2
    # Jacobian of the log transform.
    return likelihood + prior + math.log(sig2)


def _sample_variance(state, rng):
    """
    One random-walk Metropolis step on ``log(sigma**2)``. Returns whether the
    proposal was accepted.
    """
    diffusion = state.returns - state.xi
    step = RW_SCALE * math.sqrt(2 / diffusion.size)
    proposal = state.sig2 * math.exp(step * rng.standard_normal())
    if proposal < SIGMA_FLOOR ** 2:
        proposal = SIGMA_FLOOR ** 2
        state.floored = True
    log_ratio = (_log_variance_target(state, proposal, diffusion)
                 - _log_variance_target(state, state.sig2, diffusion))
    if math.isnan(log_ratio):
        raise SamplerError('Non-finite likelihood while sampling the volatility.')
    if rng.random() < math.exp(min(log_ratio, 0.0)):
        state.sig2 = proposal
        return True
    return False


def _log_rate_weight(state, lam, n_jumps):
    """
    Log ratio of the Bernoulli likelihood of the indicators to its Poisson
    approximation, as a function of ``lambda``.
    """
    jump_prob = lam * state.dt
    if jump_prob >= MAX_JUMP_PROBABILITY:
        return -math.inf
    n_calm = state.returns.size - n_jumps
    return n_calm * math.log1p(-jump_prob) + state.returns.size * jump_prob


def _sample_jump_rate(state, rng):
    """
    Independence Metropolis step on ``lambda``. The proposal is the gamma
    conditional under the Poisson approximation of the indicators; the
    accept test corrects it to the exact Bernoulli conditional. Returns
    whether the proposal was accepted.
    """
    priors = state.priors
    n_jumps = int(state.jumps.sum())
    shape = priors.lambda_shape + n_jumps
    rate = priors.lambda_rate + state.returns.size * state.dt
    proposal = rng.gamma(shape, 1 / rate)
    log_ratio = (_log_rate_weight(state, proposal, n_jumps)
                 - _log_rate_weight(state, state.lam, n_jumps))
    if math.isnan(log_ratio):
        raise SamplerError('Non-finite likelihood while sampling the jump rate.')
    if rng.random() < math.exp(min(log_ratio, 0.0)):
        state.lam = proposal
        return True
    return False


def _sample_jump_law(state, rng):
    priors = state.priors
    xi = state.xi[state.jumps]
    precision = 1 / priors.jump_mean_var + xi.size / state.sig2_j
    mean = (priors.jump_mean / priors.jump_mean_var + xi.sum() / state.sig2_j) / precision
    state.mu_j = mean + rng.standard_normal() / math.sqrt(precision)

    shape = priors.jump_var_shape + 0.5 * xi.size
    scale = priors.jump_var_scale + 0.5 * float(np.sum((xi - state.mu_j) ** 2))
    state.sig2_j = max(scale / rng.gamma(shape), SIGMA_FLOOR ** 2)


def gibbs_fit(series, config=GibbsConfig()):
    """
    Sample the posterior of the jump diffusion parameters given `series`.

    Parameters
    ----------
    series: jumpdiff.series.PriceSeries
        At least :data:`MIN_OBSERVATIONS` daily closes.
    config: GibbsConfig

    Returns
    -------
    PosteriorChain

    Raises
    ------
    ValueError
        If the series is too short.
    SamplerError
        If the likelihood or the sampler state becomes non-finite.
    """
    if len(series) < MIN_OBSERVATIONS:
        raise ValueError('At least {} closes are needed to fit a jump diffusion, got {}.'
                         .format(MIN_OBSERVATIONS, len(series)))
    returns = log_returns(series)
    if not np.all(np.isfinite(returns)):
        raise SamplerError('The log returns of {} are not finite.'.format(series.label or 'the series'))
    dt = 1 / TRADING_DAYS
    state = _SamplerState(returns, config.priors, dt)
    diagnostics = {'sigma_floor': False}
    if float(np.var(returns)) == 0:
        LOGGER.warning('{} has no price variation; the volatility is bounded below by {}.',
                       series.label or 'The series', SIGMA_FLOOR, type='degenerate-data')
        diagnostics['sigma_floor'] = True

    rng = substream(config.seed, 0, Purpose.MCMC)
    kept = set(config.kept_sweeps)
    draws = []
    accepted = 0
    rate_accepted = 0
    report_every = max(1, config.iterations // 10)
    LOGGER.info('Sampling {} sweeps ({} burn-in, thinning {}) on {} returns.',
                config.iterations, config.burn_in, config.thinning, returns.size,
                type='sampler')
    for sweep in range(config.iterations):
        _sample_indicators(state, rng)
        _sample_jump_sizes(state, rng)
        _sample_drift(state, rng)
        accepted += _sample_variance(state, rng)
        rate_accepted += _sample_jump_rate(state, rng)
        _sample_jump_law(state, rng)
        state.check(sweep)
        if sweep in kept:
            draws.append(state.as_draw())
        if (sweep + 1) % report_every == 0:
            LOGGER.debug('Sweep {}: {}', sweep + 1,
                         dict(zip(PARAMETER_NAMES, state.as_draw())), type='sampler')

    if state.floored:
        diagnostics['sigma_floor'] = True
        LOGGER.warning('The volatility hit its floor of {} while sampling.', SIGMA_FLOOR,
                       type='degenerate-data')
    chain = PosteriorChain(draws=draws, accept_count=accepted, config=config,
                           diagnostics=diagnostics)
    LOGGER.info('Kept {} draws; volatility acceptance rate {:.3f}.',
                len(chain), chain.acceptance_rate, type='sampler')
    LOGGER.debug('Jump rate acceptance rate {:.3f}.', rate_accepted / config.iterations,
                 type='sampler')
    return chain


@dataclasses.dataclass(frozen=True)
class ParameterSummary:
    """Posterior mean, standard deviation and 5% and 95% quantiles."""
    mean: float
    sd: float
    q05: float
    q95: float

    def to_dict(self):
        return dataclasses.asdict(self)


def posterior_summary(chain):
    """
    Sample statistics of every parameter of `chain`.

    Parameters
    ----------
    chain: PosteriorChain

    Returns
    -------
    dict[str, ParameterSummary]
        Keyed by parameter name, in :data:`PARAMETER_NAMES` order.
    """
    if not len(chain):
        raise ValueError('Can not summarise an empty chain.')
    ddof = 1 if len(chain) > 1 else 0
    summary = {}
    for name in PARAMETER_NAMES:
        values = chain.column(name)
        q05, q95 = np.quantile(values, [0.05, 0.95])
        summary[name] = ParameterSummary(mean=float(np.mean(values)),
                                         sd=float(np.std(values, ddof=ddof)),
                                         q05=float(q05), q95=float(q95))
    return summary


def split_half_check(chain):
    """
    Per parameter, the difference between the means of the first and second
    half of `chain`, in units of the posterior standard deviation. Parameters
    with a constant chain score 0.

    Returns
    -------
    dict[str, float]
    """
    if len(chain) < 2:
        raise ValueError('The split-half check needs at least 2 draws.')
    half = len(chain) // 2
    scores = {}
    for name in PARAMETER_NAMES:
        values = chain.column(name)
        sd = float(np.std(values, ddof=1))
        gap = abs(float(np.mean(values[:half])) - float(np.mean(values[half:])))
        scores[name] = gap / sd if sd > 0 else 0.0
    return scores


def write_chain_csv(chain, path, defer_writing=True):
    """
    Write the draws of `chain` as CSV with header
    ``iter,mu,sigma,lambda,mu_j,sigma_j``, where ``iter`` is the sweep index.
    """
    with open_output(path, defer_writing) as outfile:
        outfile.write(','.join(('iter',) + PARAMETER_NAMES) + '\n')
        for sweep, draw in zip(chain.sweeps, chain.draws):
            outfile.write(','.join([str(int(sweep))] + [repr(float(value)) for value in draw]) + '\n')


def summary_document(chain):
    """
    The JSON-ready fit summary: posterior statistics per parameter, plus
    sampler diagnostics.
    """
    document = {name: stats.to_dict() for name, stats in posterior_summary(chain).items()}
    diagnostics = dict(chain.diagnostics)
    diagnostics['acceptance_rate'] = chain.acceptance_rate
    diagnostics['n_draws'] = len(chain)
    if len(chain) >= 2:
        diagnostics['split_half'] = split_half_check(chain)
    document['diagnostics'] = diagnostics
    return document


def write_summary_json(chain, path, defer_writing=True):
    """
    Write :func:`summary_document` of `chain` to `path`.
    """
    write_json(summary_document(chain), path, defer_writing)
