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
The ``jumpdiff`` command line tool.

Every command writes its results, and a ``run.json`` manifest to repeat it,
to the directory given with ``--out``. Nothing is written unless the command
succeeds. Exit codes: 0 success, 2 usage, 3 input data, 4 numeric failure.
"""
import argparse
import datetime
import json
import logging
import pathlib

import numpy as np

import jumpdiff
from .data_io import PriceFileError, load_price_csv, slice_period
from .file_writer import DeferredFileWriter, write_json
from .inference import (MIN_CLOSES, MIN_OBSERVATIONS, GibbsConfig, SamplerError,
                        detect_jumps, gibbs_fit)
from .inference.gibbs import write_chain_csv, write_summary_json
from .log_helpers import CountingHandler, StyleAdapter, VerbosityFormatter, get_logger
from .manifest import MANIFEST_NAME, RunManifest, describe_inputs
from .models import (GbmParams, KouParams, MertonParams, SimGrid, SplitJumpParams,
                     params_to_dict)
from .pricing import (AnnuitySpec, CallSpec, EVALUATIONS, SCHEMES, SURFACE_KINDS,
                      mc_call_price, payoff_surface, price_annuity_guarantee)
from .pricing.annuity import write_annuity_json
from .pricing.monte_carlo import pricing_model, write_estimate_json, write_surface_csv, write_surface_json
from .random_streams import fresh_seed
from .simulation import simulate, write_paths_csv

LOGGER = StyleAdapter(get_logger(__name__))

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4

# Jump-model flags, by the model they belong to.
MODEL_FLAGS = {
    'gbm': ('mu', 'sigma'),
    'merton': ('mu', 'sigma', 'lam', 'mu_j', 'sigma_j'),
    'kou': ('mu', 'sigma', 'lam', 'p', 'eta1', 'eta2'),
    'split': ('mu', 'sigma', 'lambda_up', 'eta_up', 'lambda_down', 'eta_down'),
}
MODEL_DEFAULTS = {
    'mu': 0.08, 'sigma': 0.4,
    'lam': 0.0, 'mu_j': 0.0, 'sigma_j': 0.0,
    'p': 0.5, 'eta1': 10.0, 'eta2': 10.0,
    'lambda_up': 0.0, 'eta_up': 10.0, 'lambda_down': 0.0, 'eta_down': 10.0,
}
GRID_DEFAULTS = {'s0': 100.0, 't': 1.0, 'steps': 252, 'paths': 10000}
SURFACE_DEFAULTS = {
    'model_kind': 'merton', 'jump_sd': 0.0, 'mu': 0.08, 'sigma': 0.4, 's0': 100.0,
    'k': 100.0, 't': 1.0, 'r': 0.0, 'lambda_axis': '0:4:17', 'intensity_axis': '0:0.8:17',
    'steps': 252, 'paths': 10000,
}
# Options that do not change the results.
NOT_RECORDED = ('func', 'out', 'verbose', 'max_warnings', 'workers', 'subcommand')
DATE_OPTIONS = ('start', 'end')


class UsageError(ValueError):
    """
    Raised for option combinations that argparse can not rule out by itself.
    """


def _flag(dest):
    return '--lambda' if dest == 'lam' else '--' + dest.replace('_', '-')


def _date(text):
    try:
        return datetime.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError('"{}" is not an ISO date (YYYY-MM-DD)'.format(text)) from None


def load_presets():
    """
    The named presets shipped with the package.
    """
    with open(jumpdiff.DATA_PATH / 'presets.json') as infile:
        return json.load(infile)


def _apply_defaults(args, defaults):
    for name, value in defaults.items():
        if getattr(args, name, None) is None:
            setattr(args, name, value)


def _preset_values(args, group):
    if getattr(args, 'preset', None) is None:
        return {}
    preset = dict(load_presets()[group][args.preset])
    preset.pop('description', None)
    LOGGER.debug('Applying preset {}: {}', args.preset, preset)
    return preset


def _apply_preset(args, group):
    _apply_defaults(args, _preset_values(args, group))


def resolve_model(args):
    """
    Build the model parameters from the model flags of `args`, after
    checking that no flag of another model was given. A preset fills in
    what was not given, and must be for the model asked for. Resolved values
    are written back to `args`.
    """
    preset = _preset_values(args, 'model')
    if args.model is not None and preset.get('model', args.model) != args.model:
        raise UsageError('The preset {} is for --model {}, not --model {}.'
                         .format(args.preset, preset['model'], args.model))
    model = args.model or preset.get('model', 'gbm')
    own = MODEL_FLAGS[model]
    foreign = sorted({flag for flags in MODEL_FLAGS.values() for flag in flags} - set(own))
    given = [_flag(dest) for dest in foreign if getattr(args, dest) is not None]
    if given:
        raise UsageError('{} can not be used with --model {}.'.format(', '.join(given), model))
    _apply_defaults(args, preset)
    args.model = model
    _apply_defaults(args, {name: MODEL_DEFAULTS[name] for name in own})
    gbm = GbmParams(mu=args.mu, sigma=args.sigma)
    if args.model == 'gbm':
        return gbm
    if args.model == 'merton':
        return MertonParams(gbm=gbm, lam=args.lam, mu_j=args.mu_j, sigma_j=args.sigma_j)
    if args.model == 'kou':
        return KouParams(gbm=gbm, lam=args.lam, p=args.p, eta1=args.eta1, eta2=args.eta2)
    return SplitJumpParams(gbm=gbm, lambda_up=args.lambda_up, eta_up=args.eta_up,
                           lambda_down=args.lambda_down, eta_down=args.eta_down)


def resolve_seed(args):
    """
    The seed of `args`, drawing and logging a new one if none was given.
    """
    if args.seed is None:
        args.seed = fresh_seed()
        LOGGER.info('No seed given; using --seed {}.', args.seed)
    return args.seed


def resolve_grid(args, s0=None):
    _apply_defaults(args, GRID_DEFAULTS)
    return SimGrid(s0=args.s0 if s0 is None else s0, horizon_years=args.t,
                   n_steps=args.steps, n_paths=args.paths, seed=resolve_seed(args))


def parse_axis(text):
    """
    Parse an axis specification ``start:stop:count`` into `count` evenly
    spaced values in ``(start, stop]``. ``x:x:1`` is the single value x.

    Returns
    -------
    numpy.ndarray
    """
    try:
        start, stop, count = text.split(':')
        start, stop, count = float(start), float(stop), int(count)
    except ValueError:
        raise UsageError('"{}" is not an axis specification of the form start:stop:count.'
                         .format(text)) from None
    if count < 1:
        raise UsageError('An axis needs at least one point, got {}.'.format(count))
    if start == stop:
        if count != 1:
            raise UsageError('An axis with start == stop can only have one point.')
        return np.array([start])
    if stop < start:
        raise UsageError('The axis "{}" is not ascending.'.format(text))
    return start + (stop - start) * np.arange(1, count + 1) / count


def _load_series(args, min_length):
    series = load_price_csv(args.input, date_column=args.date_column,
                            price_column=args.price_column)
    if args.start is not None or args.end is not None:
        start = args.start or series.start
        end = args.end or series.end
        try:
            series = slice_period(series, start, end).series
        except PriceFileError as error:
            raise PriceFileError(str(error), path=args.input) from None
        LOGGER.info('Using {} closes between {} and {}.', len(series), start, end)
    if len(series) < min_length:
        raise PriceFileError('{} closes are needed, got {}.'.format(min_length, len(series)),
                             path=args.input)
    return series


def _manifest(args, seed=None, inputs=None):
    params = {}
    for name, value in sorted(vars(args).items()):
        if name in NOT_RECORDED:
            continue
        if isinstance(value, datetime.date):
            value = value.isoformat()
        params[name] = value
    return RunManifest(subcommand=args.subcommand, params=params, seed=seed,
                       inputs=describe_inputs(inputs or {}), version=jumpdiff.__version__)


def _out(args, name):
    return pathlib.Path(args.out) / name


def cmd_simulate(args):
    """Simulate price paths and write them as CSV."""
    params = resolve_model(args)
    grid = resolve_grid(args)
    paths = simulate(params, grid, workers=args.workers)
    write_paths_csv(paths, _out(args, 'paths.csv'))
    LOGGER.info('Simulated {} {} paths of {} steps.', grid.n_paths, params.tag, grid.n_steps)
    return _manifest(args, seed=grid.seed)


def cmd_fit(args):
    """Sample the jump-diffusion posterior of a price file."""
    config = GibbsConfig(iterations=args.iterations, burn_in=args.burn_in,
                         thinning=args.thinning, seed=resolve_seed(args))
    series = _load_series(args, MIN_OBSERVATIONS)
    chain = gibbs_fit(series, config)
    write_chain_csv(chain, _out(args, 'chain.csv'))
    write_summary_json(chain, _out(args, 'summary.json'))
    return _manifest(args, seed=config.seed, inputs={'input': args.input})


def cmd_detect(args):
    """Count the upward and downward spikes of a price file."""
    series = _load_series(args, MIN_CLOSES)
    detection = detect_jumps(series, threshold_multiple=args.threshold_multiple)
    document = detection.to_dict()
    try:
        document['split_model'] = params_to_dict(detection.to_split_params())
    except ValueError as error:
        LOGGER.warning('The detected spikes do not define a split jump model: {}', error,
                       type='degenerate-data')
    write_json(document, _out(args, 'detection.json'))
    return _manifest(args, inputs={'input': args.input})


def cmd_price_call(args):
    """Monte Carlo price of a European call."""
    params = resolve_model(args)
    grid = resolve_grid(args)
    _apply_defaults(args, {'k': args.s0, 'r': 0.0})
    spec = CallSpec(s0=args.s0, strike=args.k, maturity_years=args.t, discount_rate=args.r)
    estimate = mc_call_price(spec, params, grid, risk_neutral=args.risk_neutral,
                             workers=args.workers)
    model = pricing_model(params, spec.discount_rate, args.risk_neutral)
    write_estimate_json(estimate, _out(args, 'estimate.json'), model, spec)
    LOGGER.info('Call price {:.6f} +- {:.6f}.', estimate.mean, estimate.std_error)
    return _manifest(args, seed=grid.seed)


def cmd_price_annuity(args):
    """Monte Carlo value of a roll-up guarantee on a variable annuity."""
    params = resolve_model(args)
    _apply_defaults(args, {'a0': 100.0, 'c': 0.0, 'k': 0.0, 'g': 0.0, 'r': 0.0})
    grid = resolve_grid(args, s0=args.a0)
    spec = AnnuitySpec(a0=args.a0, fee_c=args.c, contribution_k=args.k,
                       guarantee_g=args.g, maturity_years=args.t, discount_rate=args.r)
    estimate = price_annuity_guarantee(spec, params, grid, evaluation=args.evaluation,
                                       scheme=args.scheme, workers=args.workers)
    write_annuity_json(estimate, _out(args, 'estimate.json'), params, spec,
                       args.evaluation, args.scheme)
    LOGGER.info('Guarantee value {:.6f} +- {:.6f}.', estimate.mean, estimate.std_error)
    return _manifest(args, seed=grid.seed)


def cmd_surface(args):
    """Expected call payoff over jump arrival rates and mean jump sizes."""
    _apply_preset(args, 'surface')
    _apply_defaults(args, SURFACE_DEFAULTS)
    lambda_axis = parse_axis(args.lambda_axis)
    intensity_axis = parse_axis(args.intensity_axis)
    base = GbmParams(mu=args.mu, sigma=args.sigma)
    spec = CallSpec(s0=args.s0, strike=args.k, maturity_years=args.t, discount_rate=args.r)
    grid = resolve_grid(args)
    surface = payoff_surface(spec, base, lambda_axis, intensity_axis, grid,
                             model_kind=args.model_kind, jump_sd=args.jump_sd,
                             risk_neutral=args.risk_neutral, workers=args.workers)
    write_surface_csv(surface, _out(args, 'surface.csv'))
    write_surface_json(surface, _out(args, 'surface.json'), spec, base, grid.n_paths,
                       jump_sd=args.jump_sd)
    return _manifest(args, seed=grid.seed)


COMMANDS = {
    'simulate': cmd_simulate,
    'fit': cmd_fit,
    'detect': cmd_detect,
    'price call': cmd_price_call,
    'price annuity': cmd_price_annuity,
    'surface': cmd_surface,
}


def cmd_replay(args):
    """Repeat the command recorded in a manifest."""
    manifest = RunManifest.read(args.manifest)
    if manifest.subcommand not in COMMANDS:
        raise UsageError('{} records an unknown command "{}".'
                         .format(args.manifest, manifest.subcommand))
    if manifest.version != jumpdiff.__version__:
        LOGGER.warning('{} was written by jumpdiff {}, this is {}.', args.manifest,
                       manifest.version, jumpdiff.__version__, type='replay')
    for name in manifest.stale_inputs():
        LOGGER.warning('Input {} ({}) changed or disappeared since the recorded run.',
                       name, manifest.inputs[name]['path'], type='replay')
    params = dict(manifest.params)
    for name in DATE_OPTIONS:
        if params.get(name) is not None:
            params[name] = datetime.date.fromisoformat(params[name])
    replayed = argparse.Namespace(**params, out=args.out, workers=args.workers,
                                  subcommand=manifest.subcommand)
    LOGGER.info('Replaying "{}" from {}.', manifest.subcommand, args.manifest)
    return COMMANDS[manifest.subcommand](replayed)


def _add_model_flags(parser, presets=True):
    group = parser.add_argument_group('Model')
    group.add_argument('--model', choices=sorted(MODEL_FLAGS), default=None,
                       help='Asset model (default: gbm)')
    if presets:
        group.add_argument('--preset', choices=sorted(load_presets()['model']), default=None,
                           help='Named model and horizon; explicit flags take precedence')
    group.add_argument('--mu', type=float, help='Drift per year')
    group.add_argument('--sigma', type=float, help='Volatility per sqrt(year)')
    group.add_argument('--lambda', dest='lam', type=float, help='Jumps per year (merton, kou)')
    group.add_argument('--mu-j', type=float, help='Mean jump exponent (merton)')
    group.add_argument('--sigma-j', type=float, help='Jump exponent standard deviation (merton)')
    group.add_argument('--p', type=float, help='Probability of an upward jump (kou)')
    group.add_argument('--eta1', type=float, help='Upward jump rate (kou)')
    group.add_argument('--eta2', type=float, help='Downward jump rate (kou)')
    group.add_argument('--lambda-up', type=float, help='Upward jumps per year (split)')
    group.add_argument('--eta-up', type=float, help='Upward jump rate (split)')
    group.add_argument('--lambda-down', type=float, help='Downward jumps per year (split)')
    group.add_argument('--eta-down', type=float, help='Downward jump rate (split)')


def _add_grid_flags(parser, s0=True):
    group = parser.add_argument_group('Simulation grid')
    if s0:
        group.add_argument('--s0', type=float, help='Initial price (default: 100)')
    group.add_argument('--t', type=float, help='Horizon in years (default: 1)')
    group.add_argument('--steps', type=int, help='Steps per path (default: 252)')
    group.add_argument('--paths', type=int, help='Number of paths (default: 10000)')
    group.add_argument('--seed', type=int, help='Random seed (default: drawn and recorded)')
    group.add_argument('--workers', type=int, default=1,
                       help='Threads to simulate with; does not change results')


def _add_series_flags(parser):
    group = parser.add_argument_group('Input')
    group.add_argument('--input', required=True, help='CSV file of daily closes')
    group.add_argument('--date-column', default='Date')
    group.add_argument('--price-column', default='Close',
                       help='E.g. "Close" or "Adj Close"')
    group.add_argument('--start', type=_date, help='First date to use (inclusive)')
    group.add_argument('--end', type=_date, help='Last date to use (inclusive)')


def _add_out(parser):
    parser.add_argument('--out', default='.', help='Output directory (default: .)')


def build_parser():
    """
    The argument parser of the ``jumpdiff`` command.
    """
    parser = argparse.ArgumentParser(
        prog='jumpdiff',
        description='Simulate, calibrate and price jump-diffusion models.',
    )
    parser.add_argument('-V', '--version', action='version',
                        version='%(prog)s {}'.format(jumpdiff.__version__))
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='Report debug messages')
    parser.add_argument('--max-warnings', type=int, default=None,
                        help='Fail, without writing output, after more than this many warnings')
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    simulate_parser = commands.add_parser('simulate', help='Simulate price paths')
    _add_model_flags(simulate_parser)
    _add_grid_flags(simulate_parser)
    _add_out(simulate_parser)
    simulate_parser.set_defaults(func=cmd_simulate, subcommand='simulate')

    fit_parser = commands.add_parser('fit', help='Fit a jump diffusion with a Gibbs sampler')
    _add_series_flags(fit_parser)
    sampler = fit_parser.add_argument_group('Sampler')
    sampler.add_argument('--iterations', type=int, default=GibbsConfig.iterations)
    sampler.add_argument('--burn-in', type=int, default=GibbsConfig.burn_in)
    sampler.add_argument('--thinning', type=int, default=GibbsConfig.thinning)
    sampler.add_argument('--seed', type=int, help='Random seed (default: drawn and recorded)')
    _add_out(fit_parser)
    fit_parser.set_defaults(func=cmd_fit, subcommand='fit')

    detect_parser = commands.add_parser('detect', help='Detect upward and downward spikes')
    _add_series_flags(detect_parser)
    detect_parser.add_argument('--threshold-multiple', type=float, default=4.0,
                               help='Spikes exceed this multiple of the median move')
    _add_out(detect_parser)
    detect_parser.set_defaults(func=cmd_detect, subcommand='detect')

    price_parser = commands.add_parser('price', help='Price a contract by Monte Carlo')
    instruments = price_parser.add_subparsers(dest='instrument', metavar='INSTRUMENT')
    instruments.required = True
    call_parser = instruments.add_parser('call', help='European call')
    _add_model_flags(call_parser)
    _add_grid_flags(call_parser)
    contract = call_parser.add_argument_group('Contract')
    contract.add_argument('--k', type=float, help='Strike (default: s0)')
    contract.add_argument('--r', type=float, help='Discount rate (default: 0)')
    contract.add_argument('--risk-neutral', action='store_true',
                          help='Simulate with drift r minus the jump compensator')
    _add_out(call_parser)
    call_parser.set_defaults(func=cmd_price_call, subcommand='price call')

    annuity_parser = instruments.add_parser('annuity', help='Roll-up guarantee on a variable annuity')
    _add_model_flags(annuity_parser)
    _add_grid_flags(annuity_parser, s0=False)
    contract = annuity_parser.add_argument_group('Contract')
    contract.add_argument('--a0', type=float, help='Initial subaccount (default: 100)')
    contract.add_argument('--c', type=float, help='M&E fee rate (default: 0)')
    contract.add_argument('--k', type=float, help='Contributions per year (default: 0)')
    contract.add_argument('--g', type=float, help='Guarantee roll-up rate (default: 0)')
    contract.add_argument('--r', type=float, help='Discount rate (default: 0)')
    contract.add_argument('--evaluation', choices=EVALUATIONS, default='at-maturity')
    contract.add_argument('--scheme', choices=SCHEMES, default='exponential')
    _add_out(annuity_parser)
    annuity_parser.set_defaults(func=cmd_price_annuity, subcommand='price annuity')

    surface_parser = commands.add_parser('surface', help='Expected call payoff surface')
    surface_parser.add_argument('--preset', choices=sorted(load_presets()['surface']),
                                default=None)
    surface_parser.add_argument('--lambda-axis', help='start:stop:count (default: 0:4:17)')
    surface_parser.add_argument('--intensity-axis', help='start:stop:count (default: 0:0.8:17)')
    surface_parser.add_argument('--model-kind', choices=SURFACE_KINDS)
    surface_parser.add_argument('--jump-sd', type=float,
                                help='Jump exponent standard deviation (merton; default: 0)')
    surface_parser.add_argument('--mu', type=float)
    surface_parser.add_argument('--sigma', type=float)
    surface_parser.add_argument('--k', type=float, help='Strike (default: 100)')
    surface_parser.add_argument('--r', type=float, help='Discount rate (default: 0)')
    surface_parser.add_argument('--risk-neutral', action='store_true')
    _add_grid_flags(surface_parser)
    _add_out(surface_parser)
    surface_parser.set_defaults(func=cmd_surface, subcommand='surface')

    replay_parser = commands.add_parser('replay', help='Repeat a recorded run')
    replay_parser.add_argument('manifest', help='run.json of the run to repeat')
    replay_parser.add_argument('--workers', type=int, default=1)
    _add_out(replay_parser)
    replay_parser.set_defaults(func=cmd_replay, subcommand='replay')
    return parser


def _run(args, counter):
    try:
        with np.errstate(over='raise', invalid='raise'):
            manifest = args.func(args)
        manifest.write(_out(args, MANIFEST_NAME))
        warnings = counter.number_of_counts_by(level=logging.WARNING)
        if args.max_warnings is not None and warnings > args.max_warnings:
            LOGGER.error('{} warnings were reported, more than the {} allowed. No output '
                         'is written.', warnings, args.max_warnings)
            return EXIT_DATA
        pathlib.Path(args.out).mkdir(parents=True, exist_ok=True)
        DeferredFileWriter().write()
    except PriceFileError as error:
        LOGGER.error('{}', error, type='io')
        return EXIT_DATA
    except (SamplerError, FloatingPointError) as error:
        LOGGER.error('Numerical failure: {}', error)
        return EXIT_NUMERIC
    except OSError as error:
        LOGGER.error('{}', error, type='io')
        return EXIT_DATA
    except ValueError as error:
        LOGGER.error('{}', error, type='usage')
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    """
    Run the ``jumpdiff`` command with arguments `argv`.

    Returns
    -------
    int
        The exit code.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code
    logger = logging.getLogger('jumpdiff')
    handler = logging.StreamHandler()
    handler.setFormatter(VerbosityFormatter(logger=logger))
    counter = CountingHandler()
    previous_level = logger.level
    logger.setLevel(logging.DEBUG if args.verbose else logging.INFO)
    logger.addHandler(handler)
    logger.addHandler(counter)
    try:
        return _run(args, counter)
    finally:
        DeferredFileWriter().close()
        logger.removeHandler(handler)
        logger.removeHandler(counter)
        logger.setLevel(previous_level)
