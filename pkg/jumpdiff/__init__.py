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
jumpdiff: jump-diffusion simulation, calibration and pricing.

Simulates geometric Brownian motion and its jump-diffusion extensions,
calibrates their parameters from daily closing prices, and prices European
calls and variable-annuity guarantees by Monte Carlo. Powers the CLI tool
``jumpdiff``.
"""
import logging

import pbr.version

from .log_helpers import StyleAdapter, get_logger

try:
    __version__ = pbr.version.VersionInfo('jumpdiff').release_string()
except Exception:  # pylint: disable=broad-except
    # Running from a source tree that was never installed, and is not a git
    # checkout either.
    __version__ = '0.0.0.dev0'

logging.getLogger(__name__).addHandler(logging.NullHandler())

LOGGER = StyleAdapter(get_logger(__name__))


# Find the data directory once.
try:
    from importlib.resources import files, as_file
    import atexit
    from contextlib import ExitStack
except ImportError:
    from pathlib import Path
    DATA_PATH = Path(__file__).parent / 'data'
    del Path
else:
    ref = files('jumpdiff') / 'data'
    file_manager = ExitStack()
    atexit.register(file_manager.close)
    DATA_PATH = file_manager.enter_context(as_file(ref))
    del files, as_file, atexit, ExitStack

del pbr
del LOGGER

from .models import (  # pylint: disable=wrong-import-position
    GbmParams, MertonParams, KouParams, SplitJumpParams, SimGrid, PathSet,
)
from .series import PriceSeries  # pylint: disable=wrong-import-position
from .simulation import (  # pylint: disable=wrong-import-position
    simulate, simulate_gbm, simulate_merton, simulate_kou, simulate_split,
    sample_kou_jump,
)
