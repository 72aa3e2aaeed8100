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
Variable annuity subaccounts invested in a jump-diffusion asset, and the
value of a roll-up guarantee on them.

The subaccount ``A`` grows with the asset, pays a continuous fee at rate
``c`` and receives contributions at rate ``k``. The guarantee ``G`` rolls up
the premium and the contributions at rate ``g``. The guarantee pays
``max(G - A, 0)``.
"""
import dataclasses
import math

import numpy as np

from ..file_writer import write_json
from ..log_helpers import StyleAdapter, get_logger
from ..models import PathSet, params_to_dict
from ..simulation import log_increments
from .monte_carlo import McEstimate

LOGGER = StyleAdapter(get_logger(__name__))

SCHEMES = ('exponential', 'euler')
EVALUATIONS = ('at-maturity', 'max-over-dates')


@dataclasses.dataclass(frozen=True)
class AnnuitySpec:
    """
    A variable annuity with a roll-up guarantee.

    Attributes
    ----------
    a0: float
        Initial subaccount value, which is also the initial guarantee.
    fee_c: float
        Continuous M&E fee rate.
    contribution_k: float
        Continuous contribution per year.
    guarantee_g: float
        Roll-up rate of the guarantee.
    maturity_years: float
    discount_rate: float
        Payoffs at time t are discounted by ``exp(-r t)``. When positive, the
        roll-up rate must stay below it.
    """
    a0: float
    fee_c: float
    contribution_k: float
    guarantee_g: float
    maturity_years: float
    discount_rate: float = 0.0

    def __post_init__(self):
        for name in ('a0', 'maturity_years'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError('AnnuitySpec.{} must be > 0, got {}.'.format(name, value))
        for name in ('fee_c', 'contribution_k', 'guarantee_g', 'discount_rate'):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError('AnnuitySpec.{} must be >= 0, got {}.'.format(name, value))
        if self.discount_rate > 0 and self.guarantee_g >= self.discount_rate:
            raise ValueError('The roll-up rate ({}) must be below the discount rate ({}).'
                             .format(self.guarantee_g, self.discount_rate))

    def to_dict(self):
        return dataclasses.asdict(self)


def _check_grid(spec, grid):
    if grid.s0 != spec.a0:
        raise ValueError('The simulation starts at {} but the subaccount at {}.'
                         .format(grid.s0, spec.a0))
    if not math.isclose(grid.horizon_years, spec.maturity_years):
        raise ValueError('The simulation horizon ({}) must equal the maturity ({}).'
                         .format(grid.horizon_years, spec.maturity_years))


def simulate_annuity(spec, model, grid, scheme='exponential', workers=1):
    """
    Simulate subaccount values.

    Each step multiplies the account by the asset's gross return over the
    step, takes the fee, and adds the contributions of the step. With
    `scheme` ``"exponential"`` the fee is taken as ``exp(-c dt)``::

        A[k+1] = A[k] exp(x[k] - c dt) + k dt

    With ``"euler"`` it is taken as ``c A[k] dt``. That step can bring the
    account to zero or below, in which case the account stays at zero and
    the path is marked as absorbed.

    Parameters
    ----------
    spec: AnnuitySpec
    model: GbmParams, MertonParams, KouParams or SplitJumpParams
        Model of the underlying asset.
    grid: jumpdiff.models.SimGrid
        ``grid.s0`` is the initial account value and must equal ``spec.a0``.
    scheme: str
    workers: int

    Returns
    -------
    jumpdiff.models.PathSet
    """
    if scheme not in SCHEMES:
        raise ValueError('Unknown annuity scheme "{}"; expected one of {}.'
                         .format(scheme, ', '.join(SCHEMES)))
    _check_grid(spec, grid)
    increments = log_increments(model, grid, workers=workers)
    dt = grid.dt
    contribution = spec.contribution_k * dt
    values = np.empty((grid.n_paths, grid.n_steps + 1))
    values[:, 0] = spec.a0
    absorbed = np.zeros(grid.n_paths, dtype=bool)
    if scheme == 'exponential':
        growth = np.exp(increments - spec.fee_c * dt)
        for step in range(grid.n_steps):
            values[:, step + 1] = values[:, step] * growth[:, step] + contribution
    else:
        growth = np.exp(increments)
        for step in range(grid.n_steps):
            current = values[:, step]
            following = current * growth[:, step] - spec.fee_c * current * dt + contribution
            absorbed |= following <= 0
            values[:, step + 1] = np.where(absorbed, 0.0, following)
        if absorbed.any():
            LOGGER.warning('{} of {} accounts were depleted before maturity.',
                           int(absorbed.sum()), grid.n_paths, type='degenerate-data')
    return PathSet(times=grid.times, values=values, model_tag='annuity-' + model.tag,
                   seed=grid.seed, absorbed=absorbed if scheme == 'euler' else None)


def guarantee_curve(spec, times):
    """
    Vectorised :func:`guarantee_value`, without the range check.
    """
    times = np.asarray(times, dtype=float)
    g = spec.guarantee_g
    if g == 0:
        return spec.a0 + spec.contribution_k * times
    return spec.a0 * np.exp(g * times) + spec.contribution_k / g * np.expm1(g * times)


def guarantee_value(spec, t):
    """
    Roll-up guarantee at time `t`: the premium and every contribution grown
    at rate ``g``, ``a0 exp(g t) + k (exp(g t) - 1) / g``, or ``a0 + k t``
    when ``g`` is 0.

    Parameters
    ----------
    spec: AnnuitySpec
    t: float
        Between 0 and the maturity.

    Returns
    -------
    float
    """
    if not 0 <= t <= spec.maturity_years:
        raise ValueError('The guarantee is defined between 0 and {} years, not at {}.'
                         .format(spec.maturity_years, t))
    return float(guarantee_curve(spec, t))


def annuity_payoff(account, guarantee):
    """
    What the guarantee pays: ``max(guarantee - account, 0)``.

    Parameters
    ----------
    account: float or numpy.ndarray
    guarantee: float or numpy.ndarray

    Returns
    -------
    float or numpy.ndarray
    """
    account = np.asarray(account, dtype=float)
    guarantee = np.asarray(guarantee, dtype=float)
    for name, value in (('account', account), ('guarantee', guarantee)):
        if not (np.all(np.isfinite(value)) and np.all(value >= 0)):
            raise ValueError('The {} value must be finite and >= 0.'.format(name))
    payoff = np.maximum(guarantee - account, 0.0)
    if payoff.ndim == 0:
        return float(payoff)
    return payoff


def annuity_payoffs(spec, accounts, evaluation='at-maturity'):
    """
    Discounted guarantee payoff of every account path.

    Parameters
    ----------
    spec: AnnuitySpec
    accounts: jumpdiff.models.PathSet
        As returned by :func:`simulate_annuity`.
    evaluation: str
        ``"at-maturity"`` pays at the maturity only. ``"max-over-dates"``
        takes, per path, the largest discounted payoff over all grid dates.

    Returns
    -------
    numpy.ndarray
    """
    if evaluation not in EVALUATIONS:
        raise ValueError('Unknown evaluation "{}"; expected one of {}.'
                         .format(evaluation, ', '.join(EVALUATIONS)))
    times = accounts.times
    discount = np.exp(-spec.discount_rate * times)
    if evaluation == 'at-maturity':
        guarantee = guarantee_curve(spec, times[-1])
        return discount[-1] * annuity_payoff(accounts.terminal, guarantee)
    guarantee = guarantee_curve(spec, times)
    payoffs = discount * annuity_payoff(accounts.values, np.broadcast_to(guarantee, accounts.values.shape))
    return payoffs.max(axis=1)


def price_annuity_guarantee(spec, model, grid, evaluation='at-maturity',
                            scheme='exponential', workers=1):
    """
    Monte Carlo value of the guarantee of `spec`.

    Parameters
    ----------
    spec: AnnuitySpec
    model: GbmParams, MertonParams, KouParams or SplitJumpParams
    grid: jumpdiff.models.SimGrid
    evaluation: str
        See :func:`annuity_payoffs`.
    scheme: str
        See :func:`simulate_annuity`.
    workers: int

    Returns
    -------
    jumpdiff.pricing.monte_carlo.McEstimate
    """
    accounts = simulate_annuity(spec, model, grid, scheme=scheme, workers=workers)
    estimate = McEstimate.from_samples(annuity_payoffs(spec, accounts, evaluation), grid.seed)
    LOGGER.debug('Guarantee under {}: {} +- {}', params_to_dict(model),
                 estimate.mean, estimate.std_error)
    return estimate


def annuity_document(estimate, model, spec, evaluation, scheme):
    """
    JSON-ready description of a priced guarantee.
    """
    document = estimate.to_dict()
    document['model'] = params_to_dict(model)
    document['spec'] = spec.to_dict()
    document['evaluation'] = evaluation
    document['scheme'] = scheme
    return document


def write_annuity_json(estimate, path, model, spec, evaluation, scheme, defer_writing=True):
    """
    Write a priced guarantee, with the model and contract behind it.
    """
    write_json(annuity_document(estimate, model, spec, evaluation, scheme), path, defer_writing)
