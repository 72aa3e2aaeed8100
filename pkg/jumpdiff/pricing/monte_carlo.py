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
Monte Carlo prices of European calls, and expected-payoff surfaces over the
jump arrival rate and the mean jump size.

All cells of a surface are simulated from the same seed, so they share their
random numbers: the diffusion draws are identical, and a larger arrival rate
only adds jumps to a path. Differences between cells are therefore not noise.
"""
import dataclasses
import math

import numpy as np

from .. import models
from ..file_writer import open_output, write_json
from ..log_helpers import StyleAdapter, get_logger
from ..models import GbmParams, MertonParams, SplitJumpParams, params_to_dict
from ..simulation import simulate

LOGGER = StyleAdapter(get_logger(__name__))

SURFACE_KINDS = ('merton', 'split-up')


@dataclasses.dataclass(frozen=True)
class McEstimate:
    """
    A Monte Carlo estimate.

    Attributes
    ----------
    mean: float
    std_error: float
        Sample standard deviation of the discounted payoffs over
        ``sqrt(n_paths)``.
    n_paths: int
    seed: int
    """
    mean: float
    std_error: float
    n_paths: int
    seed: int

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError('McEstimate.std_error must be >= 0, got {}.'.format(self.std_error))

    @classmethod
    def from_samples(cls, samples, seed):
        """
        Estimate the mean of `samples`. A single sample has standard error 0.
        """
        samples = np.asarray(samples, dtype=float)
        n_paths = samples.size
        if n_paths == 1:
            std_error = 0.0
        else:
            std_error = float(np.std(samples, ddof=1)) / math.sqrt(n_paths)
        return cls(mean=float(np.mean(samples)), std_error=std_error,
                   n_paths=n_paths, seed=seed)

    def to_dict(self):
        return dataclasses.asdict(self)


def _check_grid(spec, grid):
    if grid.s0 != spec.s0:
        raise ValueError('The simulation starts at {} but the contract spot is {}.'
                         .format(grid.s0, spec.s0))
    if not math.isclose(grid.horizon_years, spec.maturity_years):
        raise ValueError('The simulation horizon ({}) must equal the maturity ({}).'
                         .format(grid.horizon_years, spec.maturity_years))


def pricing_model(model, rate, risk_neutral=False):
    """
    `model` itself, or with its drift replaced by the risk-neutral drift for
    `rate` when `risk_neutral` is set.
    """
    if risk_neutral:
        return models.risk_neutral(model, rate)
    return model


def call_payoffs(spec, paths):
    """
    Discounted payoff of the call `spec` on every path of `paths`.
    """
    return spec.discount_factor * np.maximum(paths.terminal - spec.strike, 0)


def mc_call_price(spec, model, grid, risk_neutral=False, workers=1):
    """
    Monte Carlo price of the European call `spec`.

    Parameters
    ----------
    spec: jumpdiff.pricing.closed_form.CallSpec
    model: GbmParams, MertonParams, KouParams or SplitJumpParams
        Simulated as given, i.e. under its own drift, unless `risk_neutral`.
    grid: jumpdiff.models.SimGrid
        Must start at ``spec.s0`` and end at ``spec.maturity_years``.
    risk_neutral: bool
        Replace the drift by ``r - compensator``.
    workers: int

    Returns
    -------
    McEstimate

    Raises
    ------
    ValueError
        If `grid` does not match `spec`.
    """
    _check_grid(spec, grid)
    model = pricing_model(model, spec.discount_rate, risk_neutral)
    paths = simulate(model, grid, workers=workers)
    estimate = McEstimate.from_samples(call_payoffs(spec, paths), grid.seed)
    LOGGER.debug('Call under {}: {} +- {}', params_to_dict(model),
                 estimate.mean, estimate.std_error)
    return estimate


def surface_model(base, lam, intensity, model_kind='merton', jump_sd=0.0):
    """
    The jump model of one surface cell.

    Parameters
    ----------
    base: GbmParams
    lam: float
        Jump arrival rate.
    intensity: float
        Mean jump size: the mean jump exponent for ``"merton"``, the mean
        exponent of the upward jumps for ``"split-up"``.
    model_kind: str
        ``"merton"`` or ``"split-up"``.
    jump_sd: float
        Standard deviation of the Merton jump exponent.

    Returns
    -------
    MertonParams or SplitJumpParams
    """
    if model_kind == 'merton':
        return MertonParams(gbm=base, lam=lam, mu_j=intensity, sigma_j=jump_sd)
    if model_kind == 'split-up':
        if intensity == 0:
            # Zero-size jumps; the same paths as no jumps at all.
            return SplitJumpParams(gbm=base, lambda_up=0.0, eta_up=2.0,
                                   lambda_down=0.0, eta_down=1.0)
        if not 0 < intensity < 1:
            raise ValueError('Upward jump sizes must be in [0, 1), got {}.'.format(intensity))
        return SplitJumpParams(gbm=base, lambda_up=lam, eta_up=1 / intensity,
                               lambda_down=0.0, eta_down=1.0)
    raise ValueError('Unknown surface model "{}"; expected one of {}.'
                     .format(model_kind, ', '.join(SURFACE_KINDS)))


@dataclasses.dataclass(frozen=True, eq=False)
class PayoffSurface:
    """
    Expected discounted call payoffs over a grid of jump arrival rates and
    mean jump sizes.

    Attributes
    ----------
    lambda_axis: numpy.ndarray
    intensity_axis: numpy.ndarray
    values: numpy.ndarray
        Shape ``(len(lambda_axis), len(intensity_axis))``.
    std_errors: numpy.ndarray
        Same shape as `values`.
    baseline: McEstimate
        The estimate without jumps.
    model_kind: str
    seed: int
    """
    lambda_axis: np.ndarray
    intensity_axis: np.ndarray
    values: np.ndarray
    std_errors: np.ndarray
    baseline: McEstimate
    model_kind: str
    seed: int

    def __post_init__(self):
        shape = (len(self.lambda_axis), len(self.intensity_axis))
        if self.values.shape != shape or self.std_errors.shape != shape:
            raise ValueError('Surface values must have shape {}.'.format(shape))
        if not (np.all(np.isfinite(self.values)) and np.all(self.values >= 0)):
            raise ValueError('Expected call payoffs must be finite and >= 0.')
        for array in (self.lambda_axis, self.intensity_axis, self.values, self.std_errors):
            array.setflags(write=False)

    def cells(self):
        """
        Iterate over ``(lambda, intensity, value, std_error)``, rates first.
        """
        for i, lam in enumerate(self.lambda_axis):
            for j, intensity in enumerate(self.intensity_axis):
                yield float(lam), float(intensity), float(self.values[i, j]), float(self.std_errors[i, j])


def _axis(name, values):
    axis = np.array(values, dtype=float).ravel()
    if not axis.size:
        raise ValueError('The {} axis is empty.'.format(name))
    if not np.all(np.isfinite(axis)) or np.any(axis < 0):
        raise ValueError('The {} axis must be finite and >= 0.'.format(name))
    if np.any(np.diff(axis) <= 0):
        raise ValueError('The {} axis must be ascending.'.format(name))
    return axis


def payoff_surface(spec, base, lambda_axis, intensity_axis, grid, model_kind='merton',
                   jump_sd=0.0, risk_neutral=False, workers=1):
    """
    Expected discounted call payoff for every (arrival rate, mean jump size)
    pair, with common random numbers across cells.

    Parameters
    ----------
    spec: jumpdiff.pricing.closed_form.CallSpec
    base: GbmParams
        Diffusion part shared by every cell.
    lambda_axis, intensity_axis: collections.abc.Sequence[float]
        Ascending, non-negative.
    grid: jumpdiff.models.SimGrid
    model_kind: str
        See :func:`surface_model`.
    jump_sd: float
    risk_neutral: bool
        Price every cell under its own risk-neutral drift.
    workers: int

    Returns
    -------
    PayoffSurface
    """
    if not isinstance(base, GbmParams):
        raise TypeError('The base of a payoff surface must be GbmParams, got {}.'
                        .format(type(base).__name__))
    lambda_axis = _axis('lambda', lambda_axis)
    intensity_axis = _axis('intensity', intensity_axis)
    _check_grid(spec, grid)
    LOGGER.info('Pricing a {}x{} {} surface with {} paths per cell.',
                lambda_axis.size, intensity_axis.size, model_kind, grid.n_paths)
    baseline = mc_call_price(spec, base, grid, risk_neutral=risk_neutral, workers=workers)
    values = np.empty((lambda_axis.size, intensity_axis.size))
    std_errors = np.empty_like(values)
    for i, lam in enumerate(lambda_axis):
        for j, intensity in enumerate(intensity_axis):
            model = surface_model(base, lam, intensity, model_kind, jump_sd)
            estimate = mc_call_price(spec, model, grid, risk_neutral=risk_neutral,
                                     workers=workers)
            values[i, j] = estimate.mean
            std_errors[i, j] = estimate.std_error
    return PayoffSurface(lambda_axis=lambda_axis, intensity_axis=intensity_axis,
                         values=values, std_errors=std_errors, baseline=baseline,
                         model_kind=model_kind, seed=grid.seed)


def write_surface_csv(surface, path, defer_writing=True):
    """
    Write `surface` as CSV with header
    ``lambda,intensity,expected_payoff,std_error``. The first row is the
    baseline without jumps, at ``lambda = intensity = 0``.
    """
    baseline = surface.baseline
    with open_output(path, defer_writing) as outfile:
        outfile.write('lambda,intensity,expected_payoff,std_error\n')
        rows = [(0.0, 0.0, baseline.mean, baseline.std_error)]
        rows.extend(surface.cells())
        for row in rows:
            outfile.write(','.join(repr(float(value)) for value in row) + '\n')


def surface_document(surface, spec, base, n_paths, jump_sd=0.0):
    """
    JSON-ready description of `surface`, without its cells.
    """
    return {
        'baseline': surface.baseline.to_dict(),
        'seed': surface.seed,
        'n_paths': n_paths,
        'model_kind': surface.model_kind,
        'jump_sd': jump_sd,
        'base': params_to_dict(base),
        'spec': spec.to_dict(),
        'lambda_axis': [float(value) for value in surface.lambda_axis],
        'intensity_axis': [float(value) for value in surface.intensity_axis],
        'argmax': [int(index) for index in np.unravel_index(np.argmax(surface.values),
                                                             surface.values.shape)],
    }


def write_surface_json(surface, path, spec, base, n_paths, jump_sd=0.0, defer_writing=True):
    """
    Write the sidecar of a surface CSV: baseline, seed and axes.
    """
    write_json(surface_document(surface, spec, base, n_paths, jump_sd), path, defer_writing)


def estimate_document(estimate, model, spec):
    """
    JSON-ready description of a priced contract.
    """
    document = estimate.to_dict()
    document['model'] = params_to_dict(model)
    document['spec'] = spec.to_dict()
    return document


def write_estimate_json(estimate, path, model, spec, defer_writing=True):
    """
    Write `estimate` together with the model and contract it prices.
    """
    write_json(estimate_document(estimate, model, spec), path, defer_writing)
