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
Counter-based random substreams.

Every random draw in the package comes from a Philox generator whose key is
derived from the run seed, and whose 256-bit counter starts at a block
reserved for one (index, purpose) pair. The draws of path 17's diffusion
normals therefore do not depend on how many paths are simulated, on which
worker simulates them, or on whether the model has jumps at all.

Counter layout, from the most significant word down::

    [ index | purpose | 0 | 0 ]

Draws only advance the two low words, so blocks never overlap.
"""
import enum

import numpy as np

SEED_BITS = 64


class Purpose(enum.IntEnum):
    """
    What a substream is used for.
    """
    DIFFUSION = 0
    JUMP_COUNTS = 1
    JUMP_SIZES = 2
    JUMP_SIGNS = 3
    DOWN_COUNTS = 4
    DOWN_SIZES = 5
    MCMC = 6
    KOU_SAMPLE = 7


def validate_seed(seed):
    """
    Check that `seed` is a non-negative integer that fits in 64 bits, and
    return it as a Python int.
    """
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise ValueError('The seed must be an integer, not {!r}.'.format(seed))
    seed = int(seed)
    if not 0 <= seed < 2 ** SEED_BITS:
        raise ValueError('The seed must be between 0 and 2**64 - 1, got {}.'.format(seed))
    return seed


def fresh_seed():
    """
    A new 64-bit seed drawn from operating-system entropy.
    """
    entropy = np.random.SeedSequence().entropy
    return int(entropy) % (2 ** SEED_BITS)


def philox_key(seed):
    """
    The 128-bit Philox key for `seed`, as two 64-bit words.
    """
    sequence = np.random.SeedSequence(validate_seed(seed))
    return sequence.generate_state(2, dtype=np.uint64)


def substream(seed, index, purpose, key=None):
    """
    Generator for the substream of (`index`, `purpose`) under `seed`.

    Parameters
    ----------
    seed: int
        The run seed.
    index: int
        Path (or cell, or chain) index.
    purpose: Purpose
    key: numpy.ndarray or None
        Precomputed :func:`philox_key` of `seed`, to avoid rehashing it for
        every path.

    Returns
    -------
    numpy.random.Generator
    """
    if key is None:
        key = philox_key(seed)
    counter = np.array([0, 0, int(purpose), int(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))
