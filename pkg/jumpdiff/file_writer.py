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
Staged output writing. Result files of a run are written to temporary files
first, and only moved to their destination once the whole run succeeded, so a
failing calibration or pricing run never leaves half a set of outputs behind.
"""

from builtins import open as _open

import json
import os
import pathlib
import shutil
import tempfile
import threading

from .log_helpers import StyleAdapter, get_logger

LOGGER = StyleAdapter(get_logger(__name__))

_LOCK = threading.Lock()


class _SingletonMeta(type):
    """
    Metaclass making every instantiation of a class return the same object.
    """
    _instances = {}

    def __call__(cls, *args, **kwargs):
        with _LOCK:
            if cls not in cls._instances:
                cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]


def backup_path(path):
    """
    First name of the form ``#{name}.{n}#`` next to `path` that is not taken.
    Returns `path` itself when it does not exist.

    Parameters
    ----------
    path: os.PathLike

    Returns
    -------
    pathlib.Path
    """
    path = pathlib.Path(path)
    candidate = path
    index = 0
    while candidate.exists():
        index += 1
        candidate = path.with_name('#{}.{}#'.format(path.name, index))
    return candidate


class DeferredFileWriter(metaclass=_SingletonMeta):
    """
    Process-wide register of staged output files.

    :meth:`open` hands out a handle to a temporary file for write modes;
    :meth:`write` moves every staged file to its destination, backing up
    files that already exist there; :meth:`close` discards staged files.
    """
    def __init__(self):
        self.staged = []
        self.tmpdir = None

    def open(self, filename, mode='r', **kwargs):
        """
        Open `filename`. Read modes open the real file; write modes open a
        staged temporary file that :meth:`write` later moves into place.

        Parameters
        ----------
        filename: os.PathLike
        mode: str
        **kwargs: dict
            Passed to :func:`open`.

        Returns
        -------
        io.IOBase
        """
        destination = pathlib.Path(filename)
        # Resolve now: the working directory may change before committing.
        destination = destination.parent.resolve() / destination.name
        for tmp_path, staged_destination in self.staged:
            if staged_destination == destination:
                return _open(tmp_path, mode, **kwargs)
        if 'r' in mode and '+' not in mode:
            return _open(filename, mode, **kwargs)
        if 'a' in mode or '+' in mode:
            raise ValueError('Staged files can only be opened for reading or '
                             'writing, not with mode "{}".'.format(mode))
        with _LOCK:
            handle, tmp_path = tempfile.mkstemp(suffix=destination.suffix, dir=self.tmpdir)
        self.staged.append((tmp_path, destination))
        return os.fdopen(handle, mode, **kwargs)

    def write(self):
        """
        Move all staged files to their destination.
        """
        while self.staged:
            tmp_path, destination = self.staged.pop(0)
            with _LOCK:
                free = backup_path(destination)
                if free != destination:
                    LOGGER.info('Backing up {} to {}.', destination, free, type='io')
                    shutil.move(str(destination), str(free))
                LOGGER.debug('Writing {}.', destination, type='io')
                shutil.move(tmp_path, str(destination))

    def close(self):
        """
        Drop all staged files without writing them.
        """
        while self.staged:
            tmp_path, _ = self.staged.pop()
            try:
                os.remove(tmp_path)
            except FileNotFoundError:
                pass


deferred_open = DeferredFileWriter().open


def open_output(path, defer_writing=True):
    """
    Open `path` for text writing, staged through :class:`DeferredFileWriter`
    unless `defer_writing` is False.
    """
    if defer_writing:
        return deferred_open(path, 'w', newline='')
    return _open(path, 'w', newline='')


def write_json(document, path, defer_writing=True):
    """
    Write `document` as indented JSON with sorted keys, so equal documents
    give identical bytes.
    """
    with open_output(path, defer_writing) as outfile:
        json.dump(document, outfile, sort_keys=True, indent=2)
        outfile.write('\n')
