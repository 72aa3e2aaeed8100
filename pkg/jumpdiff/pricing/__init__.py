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
Closed-form and Monte Carlo prices of European calls and variable-annuity
guarantees.
"""
from .closed_form import CallSpec, bs_call, merton_call, DEFAULT_MERTON_TERMS
from .monte_carlo import (McEstimate, PayoffSurface, mc_call_price, payoff_surface,
                          surface_model, call_payoffs, SURFACE_KINDS)
from .annuity import (AnnuitySpec, simulate_annuity, guarantee_value, annuity_payoff,
                      annuity_payoffs, price_annuity_guarantee, SCHEMES, EVALUATIONS)
