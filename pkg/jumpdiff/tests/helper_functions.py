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
Contains helper functions for tests.
"""
import numpy as np

from jumpdiff.models import SimGrid, TRADING_DAYS
from jumpdiff.series import PriceSeries
from jumpdiff.simulation import simulate


def series_from_diffs(diffs, start_price=100.0, label='synthetic'):
    """
    Build a business-day :class:`PriceSeries` whose consecutive price
    differences are `diffs`.

    Parameters
    ----------
    diffs: collections.abc.Sequence[float]
    start_price: float
    label: str

    Returns
    -------
    jumpdiff.series.PriceSeries
    """
    closes = start_price + np.concatenate([[0.0], np.cumsum(diffs)])
    return PriceSeries.from_closes(closes, label=label)


def spike_diffs(n_small=251, small=0.1, up=10.0, down=None):
    """
    Price differences with `n_small` small moves of size `small` and one
    spike of `up`. If `down` is given, every small upward move is followed by
    a small downward one, and a downward spike of `down` is appended.
    """
    if down is None:
        return [small] * n_small + [up]
    diffs = []
    for _ in range(n_small):
        diffs.extend([small, -small])
    return diffs + [up, -down]


def simulated_series(params, years, seed, s0=100.0, label='simulated'):
    """
    Daily closes of one simulated path of `params` over `years` years.
    """
    grid = SimGrid(s0=s0, horizon_years=years, n_steps=int(round(years * TRADING_DAYS)),
                   n_paths=1, seed=seed)
    paths = simulate(params, grid)
    return PriceSeries.from_closes(paths.values[0], label=label)
