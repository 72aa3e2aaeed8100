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
Run manifests: what a command was asked to do, with which inputs, so it can
be repeated exactly.
"""
import dataclasses
import hashlib
import json

from .file_writer import write_json
from .log_helpers import StyleAdapter, get_logger

LOGGER = StyleAdapter(get_logger(__name__))

MANIFEST_NAME = 'run.json'


def file_digest(path, chunk_size=1 << 16):
    """
    SHA-256 hex digest of the file at `path`.
    """
    digest = hashlib.sha256()
    with open(path, 'rb') as infile:
        for chunk in iter(lambda: infile.read(chunk_size), b''):
            digest.update(chunk)
    return digest.hexdigest()


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """
    Everything needed to repeat a command.

    Attributes
    ----------
    subcommand: str
        E.g. ``"simulate"`` or ``"price call"``.
    params: dict
        Every option of the command after defaults and presets were applied.
    seed: int or None
        None for commands that draw no random numbers.
    inputs: dict[str, dict]
        Per input option, the file path and its SHA-256 digest.
    version: str
        Version of jumpdiff that wrote the manifest.
    """
    subcommand: str
    params: dict
    seed: int = None
    inputs: dict = dataclasses.field(default_factory=dict)
    version: str = ''

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, document):
        names = {field.name for field in dataclasses.fields(cls)}
        unknown = set(document) - names
        if unknown:
            raise ValueError('Unknown manifest keys: {}.'.format(', '.join(sorted(unknown))))
        if 'subcommand' not in document or 'params' not in document:
            raise ValueError('A manifest needs at least a subcommand and its params.')
        return cls(**document)

    @classmethod
    def read(cls, path):
        """
        Read the manifest at `path`.

        Raises
        ------
        ValueError
            If the file is not a manifest.
        """
        with open(path) as infile:
            try:
                document = json.load(infile)
            except json.JSONDecodeError as error:
                raise ValueError('{} is not valid JSON: {}'.format(path, error)) from None
        if not isinstance(document, dict):
            raise ValueError('{} does not contain a manifest.'.format(path))
        return cls.from_dict(document)

    def write(self, path, defer_writing=True):
        write_json(self.to_dict(), path, defer_writing)

    def stale_inputs(self):
        """
        Names of the inputs whose file is missing or changed since the
        manifest was written.
        """
        stale = []
        for name, record in sorted(self.inputs.items()):
            try:
                digest = file_digest(record['path'])
            except OSError:
                digest = None
            if digest != record['sha256']:
                stale.append(name)
        return stale


def describe_inputs(paths):
    """
    Manifest records for a mapping of option names to input files.
    """
    return {name: {'path': str(path), 'sha256': file_digest(path)}
            for name, path in paths.items() if path is not None}
