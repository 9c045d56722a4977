import argparse
import collections
import sys

import numpy as np
import sympy

from grid import GridFunction, l2_norm
from logger import CometWriter, plot_kernel_decay
from parse_config import ConfigParser
from solver import StripDiscretization, dn_apply, poisson_apply, q_apply
from symbol import check_symbol_bounds, mu_of
from utils import ConfigError, EllipticityError, HypothesisError, LipschitzDNError, parse_number, write_csv, write_json
from verify import KernelDecayCheck, decay_study, kernel_grid, run_suites

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
# samples per axis kept in the decimated CSV tables
CSV_SAMPLES = {1: 64, 2: 16}


def _csv_list(kind=str):
    def parse(text):
        return [kind(item.strip()) for item in text.split(',') if item.strip()]
    return parse


def _str2bool(text):
    if text.lower() in ('1', 'true', 'yes', 'on'):
        return True
    if text.lower() in ('0', 'false', 'no', 'off'):
        return False
    raise argparse.ArgumentTypeError('expected a boolean, got {!r}'.format(text))


def _stride(points, dimension):
    return max(1, points // CSV_SAMPLES[dimension])


def _writer(config, logger):
    if config['comet']['api'] is None:
        return None
    writer = CometWriter(
        logger,
        project_name=config['comet']['project_name'],
        experiment_name=config['name'],
        api_key=config['comet']['api'],
        log_dir=config.save_dir,
        offline=config['comet']['offline'])
    writer.log_hyperparams(config.raw)
    return writer


def parse_data(grid, text):
    """ Boundary data from 'mode:k[,k2]', 'constant:c' or a sympy expression in x (and y). """
    kind, _, value = text.partition(':')
    if kind == 'mode' and value:
        k = [int(item) for item in value.split(',')]
        return GridFunction.mode(grid, *(k + [0] * (grid.dimension - len(k))))
    if kind == 'constant' and value:
        return GridFunction.constant(grid, parse_number(value, complex))
    symbols = sympy.symbols('x y')[:grid.dimension]
    try:
        expr = sympy.sympify(text, locals={'I': sympy.I, 'pi': sympy.pi})
    except (sympy.SympifyError, TypeError) as err:
        raise ConfigError('cannot parse boundary data {!r}'.format(text)) from err
    unknown = expr.free_symbols - set(symbols)
    if unknown:
        raise ConfigError('unknown symbols {} in boundary data {!r}'.format(sorted(map(str, unknown)), text))
    fn = sympy.lambdify(symbols, expr, modules='numpy')
    return GridFunction.from_callable(grid, lambda *coords: np.asarray(fn(*coords), dtype=complex))


def check_symbol(config, args):
    logger = config.get_logger('check-symbol', config['verify']['verbosity'])
    field = config.build_field()
    grid = field.grid
    mu = mu_of(field)
    report = check_symbol_bounds(mu, field)

    step = _stride(grid.points, grid.dimension)
    x_index = np.ndindex(*((grid.points // step,) * grid.dimension))
    rows = []
    for xm in x_index:
        node = tuple(i * step for i in xm)
        for km in np.ndindex(*((grid.points // step,) * grid.dimension)):
            k = tuple(i * step for i in km)
            value = mu.values[node + k]
            rows.append([grid.axis_nodes[i] for i in node] + [grid.lattice.xi[a][k] for a in range(grid.dimension)]
                        + [value.real, value.imag])
    header = ['x{}'.format(a + 1) for a in range(grid.dimension)]
    header += ['xi{}'.format(a + 1) for a in range(grid.dimension)]
    write_csv(rows, header + ['re', 'im'], config.save_dir / 'symbol.csv')
    write_json({'reports': [report.to_dict()]}, config.save_dir / 'report.json')
    logger.info("    {:15s}: {}".format('C', report.constants['C']))
    logger.info("    {:15s}: {}".format("C'", report.constants['C_prime']))
    logger.info('{}: {}'.format(report.name, report.verdict))
    return EXIT_PASS if report.passed else EXIT_FAIL


def solve(config, args):
    logger = config.get_logger('solve', config['verify']['verbosity'])
    field = config.build_field()
    grid = field.grid
    f = parse_data(grid, args.data)
    cfg = config['strip']
    strip = StripDiscretization.for_field(field, height=cfg['height_factor'] * grid.period, levels=cfg['levels'],
                                          permc_spec=cfg['permc_spec'], refinement_steps=cfg['refinement_steps'])
    solution = strip.solve_dirichlet(f)
    poisson = poisson_apply(strip, f, solution)
    dn = dn_apply(strip, f, solution)
    conjugate = q_apply(strip, f, solution)
    traces = collections.OrderedDict([('f', f), ('P', poisson), ('Lambda', dn), ('Q', conjugate)])

    step = _stride(grid.points, grid.dimension)
    t_step = max(1, strip.levels // CSV_SAMPLES[1])
    rows = []
    for n in range(0, strip.levels + 1, t_step):
        for index in np.ndindex(*grid.shape):
            if any(i % step for i in index):
                continue
            value = solution.values[(n,) + index]
            rows.append([grid.axis_nodes[i] for i in index] + [strip.times[n], value.real, value.imag])
    header = ['x{}'.format(a + 1) for a in range(grid.dimension)]
    write_csv(rows, header + ['t', 're', 'im'], config.save_dir / 'solution.csv')

    rows = []
    for index in np.ndindex(*grid.shape):
        row = [grid.axis_nodes[i] for i in index]
        for trace in traces.values():
            row += [trace.values[index].real, trace.values[index].imag]
        rows.append(row)
    columns = [part for label in traces for part in ('{}_re'.format(label), '{}_im'.format(label))]
    write_csv(rows, header + columns, config.save_dir / 'traces.csv')

    summary = collections.OrderedDict(data=args.data, strip=strip.describe(), residual=solution.residual,
                                      condition=solution.condition)
    summary['norms'] = collections.OrderedDict((label, l2_norm(trace)) for label, trace in traces.items())
    dominant = np.unravel_index(np.argmax(np.abs(f.spectral)), grid.shape)
    if abs(f.spectral[dominant]) > 0 and dominant != grid.lattice.zero_index:
        summary['mode'] = [int(grid.lattice.wavenumbers[i]) for i in dominant]
        summary['modal_values'] = collections.OrderedDict(
            (label, trace.spectral[dominant] / f.spectral[dominant]) for label, trace in traces.items() if label != 'f')
    write_json(summary, config.save_dir / 'traces.json')
    for label, norm in summary['norms'].items():
        logger.info('    {:15s}: {}'.format('||{}||'.format(label), norm))
    return EXIT_PASS


def verify(config, args):
    logger = config.get_logger('verify', config['verify']['verbosity'])
    field = config.build_field()
    writer = _writer(config, logger)
    reports = run_suites(field, config, config['verify']['suites'], writer)
    write_json({'name': config['name'], 'seed': config['seed'], 'reports': [r.to_dict() for r in reports]},
               config.save_dir / 'report.json')
    for report in reports:
        _write_refinement(report, config.save_dir / '{}.csv'.format(report.name))
        logger.info('    {:28s}: {}'.format(report.name, report.verdict))
    if writer is not None:
        writer.finalize()
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAIL


def _write_refinement(report, fname):
    if not report.refinement:
        return
    header = []
    for level in report.refinement:
        header += [key for key, value in level.items() if np.isscalar(value) and key not in header]
    rows = [[level.get(key, '') for key in header] for level in report.refinement]
    rows = [[abs(v) if isinstance(v, complex) else v for v in row] for row in rows]
    write_csv(rows, header, fname)


def kernel(config, args):
    logger = config.get_logger('kernel', config['verify']['verbosity'])
    field = config.build_field()
    cfg = config['kernel']
    wide = field.with_grid(kernel_grid(field, cfg))
    study = decay_study(wide, cfg['weights'], cfg['times'], cfg['node'])

    rows = []
    for item in study:
        for y, magnitude, envelope, fitted in zip(item['y'], item['magnitude'], item['envelope'], item['fitted']):
            rows.append([item['weight'], item['t'], y, magnitude, envelope, fitted])
    write_csv(rows, ['weight', 't', 'y', 'abs_G', 'envelope', 'fitted'], config.save_dir / 'kernel.csv')

    report = KernelDecayCheck(field, config).run()
    write_json({'reports': [report.to_dict()]}, config.save_dir / 'report.json')
    if args.plot:
        for tag in cfg['weights']:
            slices = [item for item in study if item['weight'] == tag and item['sup'] > 0]
            if slices:
                fname = plot_kernel_decay(slices, config.save_dir / 'kernel_{}.png'.format(tag), title=tag)
                logger.info('kernel figure written to %s', fname)
    logger.info('{}: {}'.format(report.name, report.verdict))
    return EXIT_PASS if report.passed else EXIT_FAIL


COMMANDS = {'check-symbol': check_symbol, 'solve': solve, 'verify': verify, 'kernel': kernel}


def build_parser():
    # custom cli options to modify configuration from default values given in json file.
    CustomArgs = collections.namedtuple('CustomArgs', 'flags type target')
    options = [
        CustomArgs(['--name', '--exp_name'], type=str, target=('name',)),
        CustomArgs(['--seed'], type=int, target=('seed',)),
        CustomArgs(['--n-jobs'], type=int, target=('n_jobs',)),
        CustomArgs(['--points', '--N'], type=int, target=('grid', 'points')),
        CustomArgs(['--period', '--L'], type=str, target=('grid', 'period')),
        CustomArgs(['--dimension'], type=int, target=('grid', 'dimension')),
        CustomArgs(['--levels', '--Nt'], type=int, target=('strip', 'levels')),
        CustomArgs(['--height-factor'], type=float, target=('strip', 'height_factor')),
        CustomArgs(['--ensemble-size'], type=int, target=('ensemble', 'size')),
        CustomArgs(['-o', '--save-dir'], type=str, target=('verify', 'save_dir')),
        CustomArgs(['--verbosity'], type=int, target=('verify', 'verbosity')),
        CustomArgs(['--allow-2d'], type=_str2bool, target=('verify', 'allow_2d')),
        CustomArgs(['--key', '--comet_key'], type=str, target=('comet', 'api')),
        CustomArgs(['--suite'], type=_csv_list(), target=('verify', 'suites')),
        CustomArgs(['--weight'], type=_csv_list(), target=('kernel', 'weights')),
        CustomArgs(['--times'], type=_csv_list(float), target=('kernel', 'times')),
    ]
    per_command = {'verify': ('--suite',), 'kernel': ('--weight', '--times')}
    command_flags = {flag for flags in per_command.values() for flag in flags}

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('config', type=str, help='config file path')
    common.add_argument('--run-id', default=None, type=str,
                        help='name of the run directory (default: timestamp)')
    for opt in options:
        if opt.flags[0] not in command_flags:
            common.add_argument(*opt.flags, default=None, type=opt.type)

    parser = argparse.ArgumentParser(description='DN maps and Poisson semigroups of Lipschitz elliptic operators')
    commands = parser.add_subparsers(dest='command', required=True)
    subparsers = {
        'check-symbol': commands.add_parser('check-symbol', parents=[common],
                                            help='principal symbol tables and bounds'),
        'solve': commands.add_parser('solve', parents=[common], help='strip solution and boundary traces'),
        'verify': commands.add_parser('verify', parents=[common], help='run verification suites'),
        'kernel': commands.add_parser('kernel', parents=[common], help='kernel slices and decay fits'),
    }
    subparsers['solve'].add_argument('--data', required=True, type=str,
                                     help="boundary data: 'mode:k', 'constant:c' or an expression in x")
    subparsers['verify'].add_argument('--refine', action='store_true', help='append one refinement level')
    subparsers['kernel'].add_argument('--plot', action='store_true', help='write log-log decay figures')
    for command, flags in per_command.items():
        for opt in options:
            if opt.flags[0] in flags:
                subparsers[command].add_argument(*opt.flags, default=None, type=opt.type)
    return parser, options


def main(argv=None):
    parser, options = build_parser()
    args = parser.parse_args(argv)
    try:
        config = ConfigParser.from_args(args, options)
        return COMMANDS[args.command](config, args)
    except (ConfigError, HypothesisError) as err:
        print('configuration error: {}'.format(err), file=sys.stderr)
        return EXIT_CONFIG
    except EllipticityError as err:
        print('coefficient field is not uniformly elliptic: {}'.format(err), file=sys.stderr)
        print('witness: {}'.format(err.witness()), file=sys.stderr)
        return EXIT_FAIL
    except LipschitzDNError as err:
        print('{}: {}'.format(type(err).__name__, err), file=sys.stderr)
        return EXIT_FAIL


if __name__ == '__main__':
    sys.exit(main())
