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
Seeded path simulation for all asset models.

The diffusion part is stepped exactly in log space. Jumps arrive as Poisson
counts per step, drawn by inverting the Poisson distribution function at one
uniform per step, and all jumps of a step are applied at the end of that
step. Each path draws from its own substreams (see
:mod:`jumpdiff.random_streams`), so the result does not depend on the number
of workers, and the jump streams never disturb the diffusion draws.
"""
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np
from scipy import stats

from .file_writer import open_output
from .log_helpers import StyleAdapter, get_logger
from .models import GbmParams, MertonParams, KouParams, SplitJumpParams, PathSet
from .random_streams import Purpose, philox_key, substream, validate_seed

LOGGER = StyleAdapter(get_logger(__name__))


def poisson_counts(uniforms, mean):
    """
    Poisson(`mean`) counts obtained by inverting the distribution function at
    `uniforms`.

    Inversion keeps the counts of a fixed set of uniforms nondecreasing in
    `mean`, which is what makes jump-rate scans with common random numbers
    monotone path by path.

    Parameters
    ----------
    uniforms: numpy.ndarray
        Values in [0, 1).
    mean: float

    Returns
    -------
    numpy.ndarray[int]
    """
    if mean == 0:
        return np.zeros(uniforms.shape, dtype=np.int64)
    # The inversion may set floating point flags in its tails; the result is checked instead.
    with np.errstate(all='ignore'):
        counts = stats.poisson.ppf(uniforms, mean)
    if not np.all(np.isfinite(counts)):
        raise FloatingPointError('Poisson inversion failed for mean {}.'.format(mean))
    return np.maximum(counts, 0).astype(np.int64)


def _kou_exponents(params, exponentials, signs):
    return np.where(signs < params.p, exponentials / params.eta1, -exponentials / params.eta2)


def sample_kou_jump(params, n, seed):
    """
    Draw `n` double exponential jump exponents.

    Each exponent is +Exponential(eta1) with probability p, and
    -Exponential(eta2) otherwise.

    Parameters
    ----------
    params: jumpdiff.models.KouParams
    n: int
    seed: int

    Returns
    -------
    numpy.ndarray
    """
    if int(n) != n or n < 1:
        raise ValueError('The number of jump draws must be >= 1, got {}.'.format(n))
    key = philox_key(validate_seed(seed))
    exponentials = substream(seed, 0, Purpose.KOU_SAMPLE, key).standard_exponential(int(n))
    signs = substream(seed, 1, Purpose.KOU_SAMPLE, key).random(int(n))
    return _kou_exponents(params, exponentials, signs)


class _JumpStream:
    """
    One compound Poisson stream of jump exponents.

    Parameters
    ----------
    rate: float
        Jumps per year.
    counts_purpose: Purpose
        Substream for the per-step uniforms.
    draw: collections.abc.Callable
        ``draw(index, total)`` returns `total` exponents for path `index`.
    """
    def __init__(self, rate, counts_purpose, draw):
        self.rate = rate
        self.counts_purpose = counts_purpose
        self.draw = draw

    def exponents(self, grid, paths, key):
        """
        Sum of jump exponents per path and step, shape ``(len(paths), n_steps)``.
        """
        uniforms = np.empty((len(paths), grid.n_steps))
        for row, index in enumerate(paths):
            generator = substream(grid.seed, index, self.counts_purpose, key)
            uniforms[row] = generator.random(grid.n_steps)
        counts = poisson_counts(uniforms, self.rate * grid.dt)
        steps = np.arange(grid.n_steps)
        exponents = np.zeros(uniforms.shape)
        for row, index in enumerate(paths):
            total = int(counts[row].sum())
            if total == 0:
                continue
            owner = np.repeat(steps, counts[row])
            exponents[row] = np.bincount(owner, weights=self.draw(index, total),
                                         minlength=grid.n_steps)
        return exponents


def _jump_streams(params, grid, key):
    """
    The jump streams of `params`; empty for models without jumps, or with all
    rates at zero.
    """
    seed = grid.seed

    def sizes(purpose, index):
        return substream(seed, index, purpose, key)

    streams = []
    if isinstance(params, MertonParams):
        def draw(index, total):
            normals = sizes(Purpose.JUMP_SIZES, index).standard_normal(total)
            return params.mu_j + params.sigma_j * normals
        streams.append(_JumpStream(params.lam, Purpose.JUMP_COUNTS, draw))
    elif isinstance(params, KouParams):
        def draw(index, total):
            exponentials = sizes(Purpose.JUMP_SIZES, index).standard_exponential(total)
            signs = sizes(Purpose.JUMP_SIGNS, index).random(total)
            return _kou_exponents(params, exponentials, signs)
        streams.append(_JumpStream(params.lam, Purpose.JUMP_COUNTS, draw))
    elif isinstance(params, SplitJumpParams):
        def draw_up(index, total):
            return sizes(Purpose.JUMP_SIZES, index).standard_exponential(total) / params.eta_up

        def draw_down(index, total):
            return -sizes(Purpose.DOWN_SIZES, index).standard_exponential(total) / params.eta_down
        streams.append(_JumpStream(params.lambda_up, Purpose.JUMP_COUNTS, draw_up))
        streams.append(_JumpStream(params.lambda_down, Purpose.DOWN_COUNTS, draw_down))
    return [stream for stream in streams if stream.rate > 0]


def _increment_block(params, grid, start, stop, key):
    paths = range(start, stop)
    gbm = params.gbm
    drift = (gbm.mu - 0.5 * gbm.sigma ** 2) * grid.dt
    scale = gbm.sigma * math.sqrt(grid.dt)
    normals = np.empty((len(paths), grid.n_steps))
    for row, index in enumerate(paths):
        normals[row] = substream(grid.seed, index, Purpose.DIFFUSION, key).standard_normal(grid.n_steps)
    increments = drift + scale * normals
    for stream in _jump_streams(params, grid, key):
        increments += stream.exponents(grid, paths, key)
    return increments


def _chunks(n_paths, workers):
    size = max(1, math.ceil(n_paths / workers))
    return [(start, min(start + size, n_paths)) for start in range(0, n_paths, size)]


def log_increments(params, grid, workers=1):
    """
    Log-price increments of every path and step.

    Parameters
    ----------
    params: GbmParams, MertonParams, KouParams or SplitJumpParams
    grid: jumpdiff.models.SimGrid
    workers: int
        Number of threads to spread the paths over. Does not change the
        result.

    Returns
    -------
    numpy.ndarray
        Shape ``(n_paths, n_steps)``.
    """
    if not isinstance(params, (GbmParams, MertonParams, KouParams, SplitJumpParams)):
        raise TypeError('Unknown model parameters: {!r}.'.format(params))
    workers = max(1, int(workers))
    key = philox_key(grid.seed)
    chunks = _chunks(grid.n_paths, workers)
    if workers == 1 or len(chunks) == 1:
        blocks = [_increment_block(params, grid, start, stop, key) for start, stop in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            blocks = list(executor.map(
                lambda bounds: _increment_block(params, grid, bounds[0], bounds[1], key),
                chunks,
            ))
    return np.vstack(blocks)


def simulate(params, grid, workers=1):
    """
    Simulate price paths under any of the asset models.

    Parameters
    ----------
    params: GbmParams, MertonParams, KouParams or SplitJumpParams
    grid: jumpdiff.models.SimGrid
    workers: int

    Returns
    -------
    jumpdiff.models.PathSet
    """
    LOGGER.debug('Simulating {} paths of {} steps under the {} model.',
                 grid.n_paths, grid.n_steps, params.tag)
    increments = log_increments(params, grid, workers=workers)
    values = np.empty((grid.n_paths, grid.n_steps + 1))
    values[:, 0] = grid.s0
    values[:, 1:] = grid.s0 * np.exp(np.cumsum(increments, axis=1))
    return PathSet(times=grid.times, values=values, model_tag=params.tag, seed=grid.seed)


def _expect(params, kind):
    if not isinstance(params, kind):
        raise TypeError('Expected {}, got {}.'.format(kind.__name__, type(params).__name__))


def simulate_gbm(params, grid, workers=1):
    """
    Geometric Brownian motion paths,
    ``S[k+1] = S[k] * exp((mu - sigma**2/2) dt + sigma sqrt(dt) Z)``.
    """
    _expect(params, GbmParams)
    return simulate(params, grid, workers)


def simulate_merton(params, grid, workers=1):
    """
    Compound Poisson jump diffusion paths with normal jump exponents. With
    ``lam == 0`` the paths equal :func:`simulate_gbm` bit for bit.
    """
    _expect(params, MertonParams)
    return simulate(params, grid, workers)


def simulate_kou(params, grid, workers=1):
    """
    Double exponential jump diffusion paths.
    """
    _expect(params, KouParams)
    return simulate(params, grid, workers)


def simulate_split(params, grid, workers=1):
    """
    Paths with independent upward and downward jump streams. With both rates
    at zero the paths equal :func:`simulate_gbm` bit for bit.
    """
    _expect(params, SplitJumpParams)
    return simulate(params, grid, workers)


def write_paths_csv(paths, path, defer_writing=True):
    """
    Write `paths` as CSV: a ``time`` column in years, then one column per
    path. Times get 9 decimals, values 12 significant digits.

    Parameters
    ----------
    paths: jumpdiff.models.PathSet
    path: os.PathLike
    defer_writing: bool
    """
    header = ['time'] + ['path_{}'.format(idx) for idx in range(paths.n_paths)]
    with open_output(path, defer_writing) as outfile:
        outfile.write(','.join(header) + '\n')
        for column, time in enumerate(paths.times):
            cells = ['{:.9f}'.format(time)]
            cells.extend('{:.12g}'.format(value) for value in paths.values[:, column])
            outfile.write(','.join(cells) + '\n')
