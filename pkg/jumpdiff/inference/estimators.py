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
Moment estimators and the median-multiple jump detector.
"""
import dataclasses
import math

import numpy as np

from ..log_helpers import StyleAdapter, get_logger
from ..models import GbmParams, SplitJumpParams, TRADING_DAYS

LOGGER = StyleAdapter(get_logger(__name__))

DEFAULT_THRESHOLD_MULTIPLE = 4
# Fewest closes the estimators and the detector accept.
MIN_CLOSES = 3


def log_returns(series):
    """
    Daily log returns, ``ln(close[k+1] / close[k])``.

    Parameters
    ----------
    series: jumpdiff.series.PriceSeries

    Returns
    -------
    numpy.ndarray
        One element less than `series`.
    """
    if len(series) < 2:
        raise ValueError('At least 2 closes are needed for a return.')
    closes = series.closes
    return np.log(closes[1:] / closes[:-1])


def drift_vol_from_returns(returns, periods_per_year=TRADING_DAYS):
    """
    Annualised drift and volatility from daily log returns.

    The volatility is the sample standard deviation scaled by
    ``sqrt(periods_per_year)``. The drift is the annualised mean log return
    plus ``vol**2 / 2``, i.e. the arithmetic rate of return of a geometric
    Brownian motion.

    Returns
    -------
    tuple[float, float]
        ``(drift, vol)``.
    """
    returns = np.asarray(returns, dtype=float)
    if returns.size < 2:
        raise ValueError('At least 2 returns are needed, got {}.'.format(returns.size))
    vol = float(np.std(returns, ddof=1)) * math.sqrt(periods_per_year)
    drift = float(np.mean(returns)) * periods_per_year + 0.5 * vol ** 2
    return drift, vol


def estimate_drift_vol(series):
    """
    Annualised ``(drift, vol)`` of `series`; see :func:`drift_vol_from_returns`.

    Raises
    ------
    ValueError
        If the series has fewer than 3 closes.
    """
    if len(series) < MIN_CLOSES:
        raise ValueError('At least {} closes are needed to estimate drift and volatility.'
                         .format(MIN_CLOSES))
    return drift_vol_from_returns(log_returns(series))


@dataclasses.dataclass(frozen=True)
class JumpDetection:
    """
    Result of :func:`detect_jumps`.

    Attributes
    ----------
    up_count, down_count: int
        Number of spikes in the series.
    up_intensity, down_intensity: float
        Mean relative size of the spikes, ``|diff| / price before``.
    lambda_up, lambda_down: float
        Spike counts per year.
    drift, vol: float
        Annualised, from the returns that are not spikes.
    threshold_multiple: float
    up_defined, down_defined: bool
        Whether the series had any positive (negative) differences at all.
        When not, that side reports no spikes.
    n_returns: int
    """
    up_count: int
    down_count: int
    up_intensity: float
    down_intensity: float
    lambda_up: float
    lambda_down: float
    drift: float
    vol: float
    threshold_multiple: float = DEFAULT_THRESHOLD_MULTIPLE
    up_defined: bool = True
    down_defined: bool = True
    n_returns: int = 0

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_split_params(self):
        """
        The split-jump model described by this detection. A side without
        spikes gets a zero rate.

        Returns
        -------
        jumpdiff.models.SplitJumpParams

        Raises
        ------
        ValueError
            If the upward spikes are too large (mean size >= 1) to have a
            finite expected jump factor.
        """
        # Rates are placeholders when a side has no spikes; they do not matter
        # with a zero arrival rate.
        eta_up = 1 / self.up_intensity if self.up_count else 2.0
        eta_down = 1 / self.down_intensity if self.down_count else 2.0
        return SplitJumpParams(gbm=GbmParams(mu=self.drift, sigma=self.vol),
                               lambda_up=self.lambda_up if self.up_count else 0.0,
                               eta_up=eta_up,
                               lambda_down=self.lambda_down if self.down_count else 0.0,
                               eta_down=eta_down)


def _side(diffs, before, median, multiple, upward):
    if median is None:
        return np.zeros(diffs.shape, dtype=bool), 0.0
    flagged = diffs > multiple * median if upward else diffs < multiple * median
    if not flagged.any():
        return flagged, 0.0
    return flagged, float(np.mean(np.abs(diffs[flagged]) / before[flagged]))


def detect_jumps(series, threshold_multiple=DEFAULT_THRESHOLD_MULTIPLE):
    """
    Flag spikes in the day-to-day price differences of `series`.

    A positive difference larger than `threshold_multiple` times the median
    of the positive differences is an upward spike; a negative difference
    below `threshold_multiple` times the median of the negative differences
    is a downward spike. Drift and volatility are estimated from the
    remaining days.

    Parameters
    ----------
    series: jumpdiff.series.PriceSeries
    threshold_multiple: float

    Returns
    -------
    JumpDetection
    """
    if len(series) < MIN_CLOSES:
        raise ValueError('At least {} closes are needed to detect jumps.'.format(MIN_CLOSES))
    if not (math.isfinite(threshold_multiple) and threshold_multiple > 0):
        raise ValueError('The threshold multiple must be > 0, got {}.'
                         .format(threshold_multiple))
    closes = series.closes
    diffs = np.diff(closes)
    before = closes[:-1]
    positive = diffs[diffs > 0]
    negative = diffs[diffs < 0]
    up_median = float(np.median(positive)) if positive.size else None
    down_median = float(np.median(negative)) if negative.size else None
    if up_median is None:
        LOGGER.warning('{} has no positive price differences; no upward spikes '
                       'can be detected.', series.label or 'The series', type='missing-side')
    if down_median is None:
        LOGGER.warning('{} has no negative price differences; no downward spikes '
                       'can be detected.', series.label or 'The series', type='missing-side')

    up, up_intensity = _side(diffs, before, up_median, threshold_multiple, upward=True)
    down, down_intensity = _side(diffs, before, down_median, threshold_multiple, upward=False)

    returns = log_returns(series)
    calm = returns[~(up | down)]
    if calm.size >= 2:
        drift, vol = drift_vol_from_returns(calm)
    else:
        LOGGER.warning('Fewer than 2 returns are left after removing spikes; drift and '
                       'volatility are set to 0.', type='degenerate-data')
        drift, vol = 0.0, 0.0

    n_returns = diffs.size
    per_year = TRADING_DAYS / n_returns
    detection = JumpDetection(
        up_count=int(up.sum()),
        down_count=int(down.sum()),
        up_intensity=up_intensity,
        down_intensity=down_intensity,
        lambda_up=int(up.sum()) * per_year,
        lambda_down=int(down.sum()) * per_year,
        drift=drift,
        vol=vol,
        threshold_multiple=threshold_multiple,
        up_defined=up_median is not None,
        down_defined=down_median is not None,
        n_returns=n_returns,
    )
    LOGGER.info('Detected {} upward and {} downward spikes in {} returns.',
                detection.up_count, detection.down_count, n_returns)
    return detection
