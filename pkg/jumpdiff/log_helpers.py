# -*- coding: utf-8 -*-
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
Logging helpers: brace-style message formatting, a ``type`` tag on every
record, and a handler that tallies records so the CLI can report (and limit)
the number of warnings a run produced.
"""
from collections import defaultdict
import logging

DEFAULT_TYPE = 'general'


class Message:
    """
    A log message whose ``str.format`` call is postponed until a handler
    actually renders it.
    """
    def __init__(self, fmt, args, kwargs):
        self.fmt = fmt
        self.args = args
        self.kwargs = kwargs

    def __str__(self):
        return self.fmt.format(*self.args, **self.kwargs)

    def __repr__(self):
        return 'Message({!r}, {!r}, {!r})'.format(self.fmt, self.args, self.kwargs)


class PassingLoggerAdapter(logging.LoggerAdapter):
    """
    A :class:`logging.LoggerAdapter` that can wrap another adapter, so that
    several adapters can be stacked on a single logger.

    The stock adapter replaces the ``extra`` of the wrapped adapter instead of
    merging it; this one merges, and hands the record down the chain.
    """
    @property
    def manager(self):
        """
        The :class:`logging.Manager` of the wrapped logger.
        """
        return self.logger.manager

    @manager.setter
    def manager(self, new_value):
        self.logger.manager = new_value

    def process(self, msg, kwargs):
        extra = kwargs.setdefault('extra', {})
        extra.update(self.extra or {})
        if isinstance(self.logger, logging.LoggerAdapter):
            msg, kwargs = self.logger.process(msg, kwargs)
        return msg, kwargs

    def log(self, level, msg, *args, **kwargs):
        if not self.isEnabledFor(level):
            return
        msg, kwargs = self.process(msg, kwargs)
        if isinstance(self.logger, logging.Logger):
            # A plain Logger refuses unknown keyword arguments.
            allowed = ('exc_info', 'stack_info', 'stacklevel', 'extra')
            kwargs = {key: value for key, value in kwargs.items() if key in allowed}
            self.logger._log(level, msg, args, **kwargs)  # pylint: disable=protected-access
        else:
            self.logger.log(level, msg, *args, **kwargs)

    def addHandler(self, *args, **kwargs):  # pylint: disable=invalid-name
        self.logger.addHandler(*args, **kwargs)


class StyleAdapter(PassingLoggerAdapter):
    """
    Adapter that turns ``LOGGER.info('{} paths', n)`` into a deferred
    :class:`Message`, so callers use ``{}`` placeholders instead of ``%s``.
    """
    def log(self, level, msg, *args, **kwargs):
        if not self.isEnabledFor(level):
            return
        msg, kwargs = self.process(msg, kwargs)
        # Keyword arguments that are not logging's own are format fields.
        own = {'exc_info', 'stack_info', 'stacklevel', 'extra', 'type'}
        fields = {key: value for key, value in kwargs.items() if key not in own}
        kwargs = {key: value for key, value in kwargs.items() if key in own}
        super().log(level, Message(msg, args, fields), **kwargs)


class TypeAdapter(PassingLoggerAdapter):
    """
    Adapter that moves the ``type`` keyword of a logging call into the
    record's ``extra``, so handlers can filter or count on it.

    Parameters
    ----------
    logger: logging.Logger or logging.LoggerAdapter
        The logger to wrap.
    extra: dict or None
        Passed on to :class:`logging.LoggerAdapter`.
    default_type: str
        Type given to records logged without one.
    """
    def __init__(self, logger, extra=None, default_type=DEFAULT_TYPE):
        super().__init__(logger, extra or {})
        self.default_type = default_type

    def process(self, msg, kwargs):
        type_ = kwargs.pop('type', None)
        msg, kwargs = super().process(msg, kwargs)
        kwargs['extra'].setdefault('type', self.default_type if type_ is None else type_)
        return msg, kwargs


class VerbosityFormatter(logging.Formatter):
    """
    Formatter that renders records tersely, unless `logger` is set to a level
    at or below `cutoff`, in which case the logger name is added.

    Parameters
    ----------
    cutoff: int
        Effective log level at or below which the detailed layout is used.
    logger: logging.Logger or None
        Logger whose effective level is consulted. Defaults to the root.
    """
    TERSE = '{levelname} - {type}: {message}'
    DETAILED = '{levelname}:{name}:{type}: {message}'

    def __init__(self, cutoff=logging.DEBUG, logger=None):
        super().__init__(self.TERSE, style='{')
        self._detailed = logging.Formatter(self.DETAILED, style='{')
        self.cutoff = cutoff
        self.logger = logger or logging.getLogger()

    def format(self, record):
        if not hasattr(record, 'type'):
            record.type = DEFAULT_TYPE
        if self.logger.getEffectiveLevel() <= self.cutoff:
            return self._detailed.format(record)
        return super().format(record)


class CountingHandler(logging.NullHandler):
    """
    Handler that does not emit anything, but counts records per level and per
    type.

    Parameters
    ----------
    type_attribute: str
        Name of the record attribute that carries the type.
    default_type: str
        Type assumed for records without one.
    """
    def __init__(self, *args, type_attribute='type', default_type=DEFAULT_TYPE, **kwargs):
        super().__init__(*args, **kwargs)
        self.counts = defaultdict(lambda: defaultdict(int))
        self.type_attr = type_attribute
        self.default_type = default_type

    def handle(self, record):
        record_type = getattr(record, self.type_attr, self.default_type)
        self.counts[record.levelno][record_type] += 1
        return True

    def number_of_counts_by(self, level=None, type=None):  # pylint: disable=redefined-builtin
        """
        Number of records counted at `level` or above, optionally restricted
        to one `type`.

        Parameters
        ----------
        level: int or None
        type: str or None

        Returns
        -------
        int
        """
        total = 0
        for record_level, per_type in self.counts.items():
            if level is not None and record_level < level:
                continue
            for record_type, count in per_type.items():
                if type is None or type == record_type:
                    total += count
        return total


def get_logger(name):
    """
    Wrap a :class:`TypeAdapter` around ``logging.getLogger(name)``.

    Parameters
    ----------
    name: str
        Logger name, usually ``__name__``.

    Returns
    -------
    TypeAdapter
    """
    return TypeAdapter(logging.getLogger(name))
