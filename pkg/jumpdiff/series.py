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
Provides a class to describe a series of daily closing prices.
"""
import dataclasses
import datetime

import numpy as np


@dataclasses.dataclass(frozen=True, eq=False)
class PriceSeries:
    """
    Dated daily closing prices of one instrument.

    Attributes
    ----------
    dates: tuple[datetime.date]
        Strictly increasing.
    closes: numpy.ndarray
        Strictly positive, one per date.
    label: str
    """
    dates: tuple
    closes: np.ndarray
    label: str = ''

    def __post_init__(self):
        closes = np.array(self.closes, dtype=float)
        object.__setattr__(self, 'dates', tuple(self.dates))
        object.__setattr__(self, 'closes', closes)
        closes.setflags(write=False)
        if len(self.dates) != len(closes):
            raise ValueError('A price series needs one close per date, got {} dates '
                             'and {} closes.'.format(len(self.dates), len(closes)))
        if len(closes) < 2:
            raise ValueError('A price series needs at least 2 observations.')
        if not np.all(np.isfinite(closes) & (closes > 0)):
            raise ValueError('Closing prices must be finite and strictly positive.')
        for before, after in zip(self.dates, self.dates[1:]):
            if not after > before:
                raise ValueError('Dates must be strictly increasing; {} is followed '
                                 'by {}.'.format(before, after))

    def __len__(self):
        return len(self.closes)

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.closes, other.closes)

    __hash__ = None

    @property
    def start(self):
        return self.dates[0]

    @property
    def end(self):
        return self.dates[-1]

    def scaled(self, factor):
        """
        Copy of the series with every close multiplied by `factor`.
        """
        return dataclasses.replace(self, closes=self.closes * factor)

    @classmethod
    def from_closes(cls, closes, start=datetime.date(2000, 1, 3), label=''):
        """
        Build a series with consecutive business-day dates from `start`.
        Mostly useful for synthetic data.
        """
        dates = np.busday_offset(np.datetime64(start, 'D'), np.arange(len(closes)), roll='forward')
        return cls(dates=tuple(date.item() for date in dates), closes=closes, label=label)
