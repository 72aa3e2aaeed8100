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
Tests for the path simulation.
"""
import math

from hypothesis import given, settings, strategies as st
import numpy as np
import pytest

from jumpdiff.file_writer import DeferredFileWriter
from jumpdiff.models import (GbmParams, KouParams, MertonParams, SimGrid,
                             SplitJumpParams, expected_terminal)
from jumpdiff.simulation import (log_increments, poisson_counts, sample_kou_jump,
                                 simulate, simulate_gbm, simulate_kou,
                                 simulate_merton, simulate_split, write_paths_csv)

GBM = GbmParams(mu=0.1, sigma=0.5)
MERTON = MertonParams(GBM, lam=10, mu_j=0.05, sigma_j=0.025)
KOU = KouParams(GBM, lam=3, p=0.4, eta1=10, eta2=5)
DJI2007 = SplitJumpParams(GbmParams(mu=-0.0043, sigma=0.1454), lambda_up=1, eta_up=1 / 0.012,
                          lambda_down=5, eta_down=1 / 0.0107)
ALL_MODELS = (GBM, MERTON, KOU, DJI2007)


def _grid(n_paths=20, n_steps=50, seed=7, horizon_years=1.0, s0=100.0):
    return SimGrid(s0=s0, horizon_years=horizon_years, n_steps=n_steps,
                   n_paths=n_paths, seed=seed)


@pytest.mark.parametrize('jumpless', (
    MertonParams(GBM, lam=0, mu_j=0.3, sigma_j=0.2),
    KouParams(GBM, lam=0, p=0.5, eta1=10, eta2=10),
    SplitJumpParams(GBM, lambda_up=0, eta_up=10, lambda_down=0, eta_down=10),
))
def test_no_jumps_equals_gbm(jumpless):
    grid = _grid()
    assert np.array_equal(simulate(jumpless, grid).values, simulate_gbm(GBM, grid).values)


def test_zero_size_jumps_equal_gbm():
    grid = _grid()
    params = MertonParams(GBM, lam=50, mu_j=0, sigma_j=0)
    assert np.array_equal(simulate_merton(params, grid).values, simulate_gbm(GBM, grid).values)


@pytest.mark.parametrize('params', ALL_MODELS)
def test_deterministic(params):
    grid = _grid()
    assert simulate(params, grid) == simulate(params, grid)
    assert simulate(params, grid) != simulate(params, SimGrid(100.0, 1.0, 50, 20, seed=8))


@pytest.mark.parametrize('params', ALL_MODELS)
def test_more_paths_keep_earlier_ones(params):
    small = simulate(params, _grid(n_paths=5))
    large = simulate(params, _grid(n_paths=12))
    assert np.array_equal(large.values[:5], small.values)


@pytest.mark.parametrize('params', ALL_MODELS)
@pytest.mark.parametrize('workers', (2, 4, 32))
def test_workers_do_not_change_paths(params, workers):
    grid = _grid(n_paths=13)
    assert np.array_equal(log_increments(params, grid, workers=workers),
                          log_increments(params, grid, workers=1))


def test_jumps_do_not_move_diffusion_draws():
    """With upward jumps only, every price is at least the jumpless one."""
    grid = _grid()
    up_only = SplitJumpParams(GBM, lambda_up=20, eta_up=10, lambda_down=0, eta_down=1)
    assert np.all(simulate(up_only, grid).values >= simulate(GBM, grid).values)


def test_positive_with_violent_jumps():
    params = SplitJumpParams(GBM, lambda_up=1000, eta_up=2, lambda_down=1000, eta_down=2)
    paths = simulate(params, _grid(n_paths=10, n_steps=252, horizon_years=0.1))
    assert np.all(paths.values > 0)
    assert np.all(np.isfinite(paths.values))


def test_shape_and_start():
    paths = simulate(MERTON, _grid(n_paths=3, n_steps=10, horizon_years=2.0))
    assert paths.values.shape == (3, 11)
    assert np.all(paths.values[:, 0] == 100.0)
    assert paths.times[-1] == pytest.approx(2.0)
    assert paths.model_tag == 'merton'


@pytest.mark.parametrize('params', ALL_MODELS)
def test_terminal_mean(params):
    """The sample mean of the terminal price matches its expectation."""
    grid = _grid(n_paths=20000, n_steps=12, seed=11)
    terminal = simulate(params, grid, workers=4).terminal
    error = np.std(terminal, ddof=1) / math.sqrt(terminal.size)
    assert abs(terminal.mean() - expected_terminal(params, 100.0, 1.0)) < 4 * error


def test_dji2007_log_return():
    """Mean and spread of the yearly log return of the 2007 Dow Jones model."""
    grid = _grid(n_paths=20000, n_steps=252, seed=2007, s0=12474.52)
    log_returns = np.log(simulate_split(DJI2007, grid).terminal / grid.s0)
    gbm = DJI2007.gbm
    expected_mean = gbm.mu - gbm.sigma ** 2 / 2 + DJI2007.mean_log_jump()
    expected_var = (gbm.sigma ** 2 + 2 * DJI2007.lambda_up / DJI2007.eta_up ** 2
                    + 2 * DJI2007.lambda_down / DJI2007.eta_down ** 2)
    error = math.sqrt(expected_var / grid.n_paths)
    assert abs(log_returns.mean() - expected_mean) < 4 * error
    assert np.var(log_returns, ddof=1) == pytest.approx(expected_var, rel=0.05)


def test_kou_paths():
    paths = simulate_kou(KOU, _grid())
    assert paths.model_tag == 'kou'
    with pytest.raises(TypeError):
        simulate_kou(MERTON, _grid())


def test_sample_kou_jump():
    draws = sample_kou_jump(KOU, 200000, seed=3)
    assert np.array_equal(draws, sample_kou_jump(KOU, 200000, seed=3))
    error = np.std(draws, ddof=1) / math.sqrt(draws.size)
    assert abs(draws.mean() - KOU.mean_jump()) < 4 * error
    assert np.mean(draws > 0) == pytest.approx(KOU.p, abs=0.01)


@pytest.mark.parametrize('n', (0, -1, 2.5))
def test_sample_kou_jump_errors(n):
    with pytest.raises(ValueError):
        sample_kou_jump(KOU, n, seed=0)


def test_poisson_counts_monotone():
    uniforms = np.linspace(0, 0.999, 500)
    previous = poisson_counts(uniforms, 0.0)
    assert not previous.any()
    for mean in (0.01, 0.1, 0.5, 2.0):
        counts = poisson_counts(uniforms, mean)
        assert np.all(counts >= previous)
        previous = counts


def test_unknown_model():
    with pytest.raises(TypeError):
        simulate(object(), _grid())


def test_write_paths_csv(tmp_path):
    grid = SimGrid(s0=100.0, horizon_years=1.0, n_steps=2, n_paths=2, seed=0)
    paths = simulate(GbmParams(mu=0.0, sigma=0.0), grid)
    out = tmp_path / 'paths.csv'
    write_paths_csv(paths, out)
    DeferredFileWriter().write()
    assert out.read_text() == ('time,path_0,path_1\n'
                               '0.000000000,100,100\n'
                               '0.500000000,100,100\n'
                               '1.000000000,100,100\n')


SEEDS = st.integers(min_value=0, max_value=2 ** 64 - 1)
GBMS = st.builds(GbmParams, mu=st.floats(-0.5, 0.5), sigma=st.floats(0, 1))
RATES = st.floats(0, 50)
MODELS = st.one_of(
    GBMS,
    st.builds(MertonParams, GBMS, lam=RATES, mu_j=st.floats(-0.3, 0.3),
              sigma_j=st.floats(0, 0.3)),
    st.builds(KouParams, GBMS, lam=RATES, p=st.floats(0, 1), eta1=st.floats(2, 100),
              eta2=st.floats(1, 100)),
    st.builds(SplitJumpParams, GBMS, lambda_up=RATES, eta_up=st.floats(2, 100),
              lambda_down=RATES, eta_down=st.floats(1, 100)),
)


@settings(max_examples=30, deadline=None)
@given(params=MODELS, seed=SEEDS, n_steps=st.integers(1, 60))
def test_prices_stay_positive(params, seed, n_steps):
    paths = simulate(params, _grid(n_paths=4, n_steps=n_steps, seed=seed))
    assert np.all(np.isfinite(paths.values))
    assert np.all(paths.values > 0)


@settings(max_examples=30, deadline=None)
@given(gbm=GBMS, seed=SEEDS, mu_j=st.floats(-0.3, 0.3), eta=st.floats(2, 100))
def test_without_arrivals_every_model_is_gbm(gbm, seed, mu_j, eta):
    grid = _grid(n_paths=3, n_steps=20, seed=seed)
    expected = simulate_gbm(gbm, grid).values
    for jumpless in (MertonParams(gbm, lam=0, mu_j=mu_j, sigma_j=0.1),
                     KouParams(gbm, lam=0, p=0.5, eta1=eta, eta2=eta),
                     SplitJumpParams(gbm, lambda_up=0, eta_up=eta, lambda_down=0, eta_down=eta)):
        assert np.array_equal(simulate(jumpless, grid).values, expected)


@settings(max_examples=30, deadline=None)
@given(params=MODELS, seed=SEEDS, n_paths=st.integers(1, 8), extra=st.integers(1, 8))
def test_adding_paths_keeps_earlier_ones(params, seed, n_paths, extra):
    small = simulate(params, _grid(n_paths=n_paths, n_steps=15, seed=seed))
    large = simulate(params, _grid(n_paths=n_paths + extra, n_steps=15, seed=seed))
    assert np.array_equal(large.values[:n_paths], small.values)
