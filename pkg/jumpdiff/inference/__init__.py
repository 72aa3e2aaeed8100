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
Calibration of model parameters from daily price series.
"""
from .estimators import (log_returns, drift_vol_from_returns, estimate_drift_vol,
                         detect_jumps, JumpDetection, DEFAULT_THRESHOLD_MULTIPLE, MIN_CLOSES)
from .gibbs import (gibbs_fit, posterior_summary, split_half_check, GibbsConfig,
                    PriorSpec, PosteriorChain, ParameterSummary, SamplerError,
                    MIN_OBSERVATIONS, PARAMETER_NAMES, SIGMA_FLOOR)
