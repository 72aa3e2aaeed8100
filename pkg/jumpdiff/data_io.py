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
Reading, validating and slicing daily market-data files.

The expected layout is the CSV export of common quote providers: a header
row, a date column and one or more price columns::

    Date,Open,High,Low,Close,Adj Close,Volume
    2007-01-03,12459.54,12580.35,12404.82,12474.52,12474.52,327200000

Missing trading days are kept as gaps; nothing is interpolated.
"""
import dataclasses
import datetime
import math

import pandas as pd

from .file_writer import open_output
from .log_helpers import StyleAdapter, get_logger
from .series import PriceSeries

LOGGER = StyleAdapter(get_logger(__name__))

DATE_FORMATS = ('%Y-%m-%d', '%m/%d/%Y')
# The header is line 1, so the first data row is line 2.
FIRST_DATA_LINE = 2


class PriceFileError(ValueError):
    """
    Raised when a price file can not be turned into a price series.

    Attributes
    ----------
    path: str
    lines: tuple[int]
        The 1-based line numbers involved, if any.
    """
    def __init__(self, message, path=None, lines=()):
        self.path = path
        self.lines = tuple(lines)
        if lines:
            where = ', '.join(str(line) for line in self.lines)
            message = '{} (line{} {})'.format(message, 's' if len(self.lines) > 1 else '', where)
        if path is not None:
            message = '{}: {}'.format(path, message)
        super().__init__(message)


@dataclasses.dataclass(frozen=True)
class RawTable:
    """
    The cells of a delimited text file, as strings.

    Attributes
    ----------
    header: tuple[str]
    rows: tuple[tuple[str]]
        Every row has as many cells as the header.
    source: str
    """
    header: tuple
    rows: tuple
    source: str = None

    def __post_init__(self):
        width = len(self.header)
        for offset, row in enumerate(self.rows):
            if len(row) != width:
                raise PriceFileError('Expected {} cells, found {}'.format(width, len(row)),
                                     self.source, [offset + FIRST_DATA_LINE])

    def column(self, name):
        """
        The cells of column `name`.
        """
        try:
            idx = self.header.index(name)
        except ValueError:
            raise PriceFileError('No column named "{}"; available columns are {}'
                                 .format(name, ', '.join(self.header)), self.source) from None
        return [row[idx] for row in self.rows]


@dataclasses.dataclass(frozen=True)
class PeriodSlice:
    """
    The part of a price series between two dates, both inclusive.
    """
    start: datetime.date
    end: datetime.date
    series: PriceSeries


def read_table(path):
    """
    Read a delimited text file with a header row into a :class:`RawTable`.

    Blank lines are kept as (empty) rows so that line numbers in error
    messages match the file.

    Parameters
    ----------
    path: os.PathLike

    Returns
    -------
    RawTable
    """
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            skip_blank_lines=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise PriceFileError('The file is empty', str(path)) from None
    except pd.errors.ParserError as error:
        raise PriceFileError('Could not parse the file: {}'.format(error), str(path)) from None
    frame = frame.fillna('')
    header = tuple(str(name).strip() for name in frame.columns)
    rows = tuple(tuple(cell.strip() for cell in row) for row in frame.itertuples(index=False, name=None))
    return RawTable(header=header, rows=rows, source=str(path))


def parse_date(text):
    """
    Parse an ISO-8601 date, or a ``MM/DD/YYYY`` one.

    Raises
    ------
    ValueError
    """
    for fmt in DATE_FORMATS:
        try:
            return datetime.datetime.strptime(text, fmt).date()
        except ValueError:
            pass
    raise ValueError('"{}" is not a date'.format(text))


def parse_price(text):
    """
    Parse a strictly positive, finite price.

    Raises
    ------
    ValueError
    """
    value = float(text)
    if not (math.isfinite(value) and value > 0):
        raise ValueError('"{}" is not a positive price'.format(text))
    return value


def table_to_series(table, date_column='Date', price_column='Close', label=None):
    """
    Turn the `date_column` and `price_column` of `table` into a
    :class:`~jumpdiff.series.PriceSeries`, sorted by date.

    Raises
    ------
    PriceFileError
        If a column is missing, a cell can not be parsed, or a date occurs
        twice.
    """
    date_cells = table.column(date_column)
    price_cells = table.column(price_column)
    seen = {}
    records = []
    for offset, (date_cell, price_cell) in enumerate(zip(date_cells, price_cells)):
        line = offset + FIRST_DATA_LINE
        try:
            date = parse_date(date_cell)
        except ValueError as error:
            raise PriceFileError('Unparseable date: {}'.format(error), table.source, [line]) from None
        try:
            price = parse_price(price_cell)
        except ValueError:
            raise PriceFileError('Unparseable {} value "{}"'.format(price_column, price_cell),
                                 table.source, [line]) from None
        if date in seen:
            raise PriceFileError('Duplicate date {}'.format(date), table.source,
                                 [seen[date], line])
        seen[date] = line
        records.append((date, price))
    if len(records) < 2:
        raise PriceFileError('At least 2 price rows are needed, found {}'.format(len(records)),
                             table.source)
    records.sort()
    if label is None:
        label = price_column
    return PriceSeries(dates=[date for date, _ in records],
                       closes=[price for _, price in records],
                       label=label)


def load_price_csv(path, date_column='Date', price_column='Close'):
    """
    Read a daily price file.

    Parameters
    ----------
    path: os.PathLike
    date_column: str
    price_column: str
        E.g. ``"Close"`` or ``"Adj Close"``.

    Returns
    -------
    jumpdiff.series.PriceSeries

    Raises
    ------
    PriceFileError
    """
    table = read_table(path)
    series = table_to_series(table, date_column, price_column)
    LOGGER.info('Read {} closes from {} ({} to {}).', len(series), path,
                series.start, series.end, type='io')
    return series


def slice_period(series, start, end):
    """
    Restrict `series` to the dates between `start` and `end`, inclusive.

    Returns
    -------
    PeriodSlice

    Raises
    ------
    ValueError
        If `start` is after `end`.
    PriceFileError
        If fewer than 2 observations fall within the window.
    """
    if start > end:
        raise ValueError('The period start ({}) is after its end ({}).'.format(start, end))
    keep = [idx for idx, date in enumerate(series.dates) if start <= date <= end]
    if not keep:
        raise PriceFileError('No observations between {} and {}.'.format(start, end))
    if len(keep) < 2:
        raise PriceFileError('Only one observation between {} and {}.'.format(start, end))
    window = PriceSeries(dates=[series.dates[idx] for idx in keep],
                         closes=series.closes[keep], label=series.label)
    return PeriodSlice(start=start, end=end, series=window)


def write_price_csv(series, path, defer_writing=True):
    """
    Write `series` as a ``Date,Close`` CSV with ISO dates. Prices are written
    with full precision, so reading the file back gives the same series.
    """
    with open_output(path, defer_writing) as outfile:
        outfile.write('Date,Close\n')
        for date, close in zip(series.dates, series.closes):
            outfile.write('{},{!r}\n'.format(date.isoformat(), float(close)))
