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
Tests for the jump diffusion sampler and its chain summaries.
"""
import json

import numpy as np
import pytest

from jumpdiff.file_writer import DeferredFileWriter
from jumpdiff.inference import (PARAMETER_NAMES, GibbsConfig, PosteriorChain,
                                PriorSpec, SamplerError, gibbs_fit,
                                posterior_summary, split_half_check)
from jumpdiff.inference.gibbs import write_chain_csv, write_summary_json
from jumpdiff.models import GbmParams, MertonParams
from jumpdiff.series import PriceSeries
from jumpdiff.tests.helper_functions import simulated_series

# pylint: disable=redefined-outer-name

SHORT = GibbsConfig(iterations=600, burn_in=200, thinning=4, seed=3)


@pytest.fixture(scope='module')
def merton_series():
    params = MertonParams(GbmParams(mu=0.1, sigma=0.5), lam=10, mu_j=0.05, sigma_j=0.025)
    return simulated_series(params, years=10, seed=1, label='table1')


@pytest.fixture(scope='module')
def short_chain(merton_series):
    return gibbs_fit(merton_series, SHORT)


def _chain(rows, iterations=10, burn_in=0, thinning=1):
    config = GibbsConfig(iterations=iterations, burn_in=burn_in, thinning=thinning)
    return PosteriorChain(draws=np.array(rows, dtype=float), accept_count=5, config=config)


@pytest.mark.parametrize('kwargs', (
    {'iterations': 100, 'burn_in': 100},
    {'iterations': 100, 'burn_in': 150},
    {'iterations': 0, 'burn_in': 0},
    {'thinning': 0},
    {'burn_in': -1},
    {'iterations': 10.5, 'burn_in': 1},
    {'seed': -1},
))
def test_config_errors(kwargs):
    with pytest.raises(ValueError):
        GibbsConfig(**kwargs)


@pytest.mark.parametrize('kwargs', (
    {'drift_var': 0},
    {'var_shape': -1},
    {'lambda_rate': float('inf')},
    {'jump_mean': float('nan')},
))
def test_prior_errors(kwargs):
    with pytest.raises(ValueError):
        PriorSpec(**kwargs)


def test_kept_sweeps():
    assert list(GibbsConfig(iterations=10, burn_in=4, thinning=3).kept_sweeps) == [4, 7]


def test_chain_shape_and_domain(short_chain):
    assert len(short_chain) == len(SHORT.kept_sweeps) == 100
    assert short_chain.draws.shape == (100, len(PARAMETER_NAMES))
    assert np.all(short_chain.column('sigma') > 0)
    assert np.all(short_chain.column('sigma_j') > 0)
    assert np.all(short_chain.column('lambda') >= 0)
    assert np.array_equal(short_chain.sweeps, np.arange(200, 600, 4))
    assert 0 < short_chain.acceptance_rate < 1
    assert short_chain.diagnostics == {'sigma_floor': False}


def test_deterministic(merton_series, short_chain):
    again = gibbs_fit(merton_series, SHORT)
    assert np.array_equal(again.draws, short_chain.draws)
    assert again.accept_count == short_chain.accept_count
    other = gibbs_fit(merton_series, GibbsConfig(iterations=600, burn_in=200, thinning=4, seed=4))
    assert not np.array_equal(other.draws, short_chain.draws)


@pytest.mark.parametrize('factor', (2.0 ** -10, 2.0 ** 12))
def test_scale_invariance(merton_series, short_chain, factor):
    scaled = gibbs_fit(merton_series.scaled(factor), SHORT)
    assert np.array_equal(scaled.draws, short_chain.draws)


@pytest.fixture(scope='module')
def table1_chain():
    params = MertonParams(GbmParams(mu=0.1, sigma=0.5), lam=10, mu_j=0.05, sigma_j=0.025)
    series = simulated_series(params, years=10, seed=2, label='table1')
    return gibbs_fit(series, GibbsConfig())


def test_recovers_table1_preset(table1_chain):
    summary = posterior_summary(table1_chain)
    assert 0.45 <= summary['sigma'].mean <= 0.55
    assert 6 <= summary['lambda'].mean <= 14


def test_table1_chain_halves_agree(table1_chain):
    for name, gap in split_half_check(table1_chain).items():
        assert gap < 0.5, name


def test_recovers_separated_jumps():
    params = MertonParams(GbmParams(mu=0.05, sigma=0.2), lam=10, mu_j=0.15, sigma_j=0.02)
    series = simulated_series(params, years=10, seed=8)
    chain = gibbs_fit(series, GibbsConfig(iterations=3000, burn_in=1000, thinning=2, seed=0))
    summary = posterior_summary(chain)
    assert 6 <= summary['lambda'].mean <= 14
    assert summary['mu_j'].mean == pytest.approx(0.15, abs=0.02)
    assert summary['sigma'].mean == pytest.approx(0.2, abs=0.02)


def test_tight_zero_rate_prior():
    series = simulated_series(GbmParams(mu=0.05, sigma=0.3), years=4, seed=2)
    priors = PriorSpec(lambda_shape=1.0, lambda_rate=1e6)
    chain = gibbs_fit(series, GibbsConfig(iterations=1500, burn_in=500, thinning=2, priors=priors))
    summary = posterior_summary(chain)
    assert summary['lambda'].mean < 1e-4
    assert summary['sigma'].mean == pytest.approx(0.3, abs=0.03)


def test_constant_series(caplog):
    series = PriceSeries.from_closes([100.0] * 40, label='flat')
    chain = gibbs_fit(series, GibbsConfig(iterations=300, burn_in=100))
    assert chain.diagnostics['sigma_floor']
    assert np.all(chain.column('sigma') > 0)
    assert 'degenerate-data' in [record.type for record in caplog.records]


def test_too_short():
    with pytest.raises(ValueError):
        gibbs_fit(PriceSeries.from_closes(np.linspace(100, 110, 29)), SHORT)


def test_posterior_mean_params(short_chain):
    params = short_chain.posterior_mean_params()
    assert isinstance(params, MertonParams)
    assert params.sigma == pytest.approx(short_chain.column('sigma').mean())
    assert params.lam == pytest.approx(short_chain.column('lambda').mean())


def test_summary_of_identical_draws():
    chain = _chain([[0.1, 0.2, 3.0, 0.0, 0.05]] * 6)
    summary = posterior_summary(chain)
    assert list(summary) == list(PARAMETER_NAMES)
    assert summary['lambda'].to_dict() == {'mean': 3.0, 'sd': 0.0, 'q05': 3.0, 'q95': 3.0}
    assert split_half_check(chain) == dict.fromkeys(PARAMETER_NAMES, 0.0)


def test_summary_of_two_draws():
    chain = _chain([[0.1, 0.2, 3.0, 0.0, 0.05], [0.3, 0.2, 5.0, 0.0, 0.05]])
    summary = posterior_summary(chain)
    assert summary['mu'].mean == pytest.approx(0.2)
    assert summary['mu'].sd == pytest.approx(np.sqrt(0.02))
    assert summary['lambda'].q05 == pytest.approx(3.1)
    assert summary['lambda'].q95 == pytest.approx(4.9)


def test_summary_of_one_draw():
    chain = _chain([[0.1, 0.2, 3.0, 0.0, 0.05]])
    assert posterior_summary(chain)['mu'].sd == 0.0
    with pytest.raises(ValueError):
        split_half_check(chain)


def test_empty_chain():
    with pytest.raises(ValueError):
        posterior_summary(_chain(np.empty((0, 5))))


def test_split_half_check():
    rows = [[0.0, 0.2, 3.0, 0.0, 0.05]] * 2 + [[1.0, 0.2, 3.0, 0.0, 0.05]] * 2
    scores = split_half_check(_chain(rows))
    assert scores['mu'] == pytest.approx(1 / np.std([0, 0, 1, 1], ddof=1))
    assert scores['sigma'] == 0.0


@pytest.mark.parametrize('row, error', (
    ([0.1, 0.0, 3.0, 0.0, 0.05], ValueError),
    ([0.1, 0.2, -1.0, 0.0, 0.05], ValueError),
    ([0.1, 0.2, 3.0, 0.0, 0.0], ValueError),
    ([np.nan, 0.2, 3.0, 0.0, 0.05], SamplerError),
))
def test_chain_validation(row, error):
    with pytest.raises(error):
        _chain([row])


def test_write_chain_csv(tmp_path):
    chain = _chain([[0.1, 0.2, 3.0, 0.0, 0.05], [0.3, 0.25, 5.0, -0.5, 0.5]],
                   iterations=10, burn_in=6, thinning=2)
    out = tmp_path / 'chain.csv'
    write_chain_csv(chain, out)
    DeferredFileWriter().write()
    assert out.read_text() == ('iter,mu,sigma,lambda,mu_j,sigma_j\n'
                               '6,0.1,0.2,3.0,0.0,0.05\n'
                               '8,0.3,0.25,5.0,-0.5,0.5\n')


def test_write_summary_json(tmp_path):
    chain = _chain([[0.1, 0.2, 3.0, 0.0, 0.05], [0.3, 0.2, 5.0, 0.0, 0.05]])
    out = tmp_path / 'summary.json'
    write_summary_json(chain, out)
    DeferredFileWriter().write()
    document = json.loads(out.read_text())
    assert set(document) == set(PARAMETER_NAMES) | {'diagnostics'}
    assert document['diagnostics']['n_draws'] == 2
    assert document['diagnostics']['acceptance_rate'] == pytest.approx(0.5)
    assert set(document['diagnostics']['split_half']) == set(PARAMETER_NAMES)
