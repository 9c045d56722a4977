import copy
import logging
import os
from collections import OrderedDict
from datetime import datetime
from functools import reduce
from operator import getitem
from pathlib import Path

import coeff as module_coeff
from grid import TorusGrid
from logger import VERBOSITY_LEVELS, setup_logging
from utils import ConfigError, GridError, parse_number, read_json, write_json

OUTPUT_ENV = 'LIPDN_OUTPUT_DIR'
MAX_POINTS_2D = 64

DEFAULTS = OrderedDict([
    ('name', 'lipschitz-dn'),
    ('seed', 0),
    ('n_jobs', 1),
    ('coefficient', OrderedDict(type='ConstantFamily', args=OrderedDict(matrix=[[1, 0], [0, 1]]))),
    ('grid', OrderedDict(dimension=1, period='2*pi', points=256)),
    ('strip', OrderedDict(height_factor=4, levels=None, permc_spec='MMD_AT_PLUS_A', refinement_steps=3)),
    ('ensemble', OrderedDict(size=8, domain_size=64, band=None, decay=4.0)),
    ('verify', OrderedDict(save_dir='', suites=['all'], refinement_levels=2, verbosity=1, allow_2d=False,
                           log_config='')),
    ('tolerance', OrderedDict(identity=0.05, halving=0.625, floor=1e-10, kendall=0.5, drift=0.2, rounding=1e-7,
                              ratio_bounds=[0.02, 50], sector_degrees=85, semigroup_defect=1e-8, closure=1e-10,
                              constant_zero=1e-3, order=1.8, kernel_reference=0.01,
                              oracle=1e-2)),
    ('kernel', OrderedDict(points=512, period='16*pi', times=[0.25, 0.5, 1.0],
                           weights=['unit', 'pi-prime', 'zeta', 'q-weight'], node=0)),
    ('semigroup', OrderedDict(points=128, times=[0.01, 0.1, 1.0, 10.0])),
    ('quadratic', OrderedDict(weights=['t-xi', 'sqrt-t-xi', 'pi-prime', 'zeta', 'zeta-tilde', 'dt1'])),
    ('comet', OrderedDict(api=None, project_name='lipschitz-dn', offline=False)),
])


class ConfigParser:
    def __init__(self, config, modification=None, run_id=None, save=True, refine=False):
        """
        class to parse configuration json file. Handles the documented defaults, command-line
        overrides, the run directory and logging.
        :param config: Dict containing configurations for the run, as read from the json file.
        :param modification: Dict keychain:value, specifying position values to be replaced from config dict.
        :param run_id: Unique identifier of the run, the directory name under save_dir/name. Timestamp by default.
        :param save: create the run directory, write config.json and configure logging.
        :param refine: append one more level to the refinement series.
        """
        raw = _update_config(_merge_defaults(DEFAULTS, config), modification)
        if refine:
            raw['verify']['refinement_levels'] = int(raw['verify']['refinement_levels']) + 1
        self._raw = raw
        self._config = _normalize(copy.deepcopy(raw))

        save_dir = self.config['verify']['save_dir'] or os.environ.get(OUTPUT_ENV) or 'saved'
        timestamp = datetime.now()
        if run_id is None:
            run_id = timestamp.strftime(r'%m%d_%H%M%S')
        self.run_id = run_id
        self._save_dir = Path(save_dir) / self.config['name'] / run_id

        self.log_levels = VERBOSITY_LEVELS
        if save:
            self.save_dir.mkdir(parents=True, exist_ok=True)
            # the effective config stays free of timestamps; they go to the sidecar
            write_json(self._raw, self.save_dir / 'config.json')
            write_json({'run_id': run_id, 'started': timestamp.isoformat()}, self.save_dir / 'run_info.json')
            setup_logging(self.save_dir, self.config['verify']['log_config'], self.config['verify']['verbosity'])

    @classmethod
    def from_args(cls, args, options=''):
        """
        Initialize this class from cli arguments; `args` is an ArgumentParser or a parsed namespace.
        """
        for opt in options:
            if hasattr(args, 'add_argument'):
                args.add_argument(*opt.flags, default=None, type=opt.type)
        if hasattr(args, 'parse_args'):
            args = args.parse_args()

        msg_no_cfg = "Configuration file need to be specified. Add '-c config.json', for example."
        if args.config is None:
            raise ConfigError(msg_no_cfg)
        cfg_fname = Path(args.config)
        if not cfg_fname.is_file():
            raise ConfigError('configuration file {} not found'.format(cfg_fname))
        config = read_json(cfg_fname)

        modification = {opt.target: getattr(args, _get_opt_name(opt.flags), None) for opt in options}
        return cls(config, modification, run_id=getattr(args, 'run_id', None), refine=getattr(args, 'refine', False))

    def initialize(self, name, module, *args, **kwargs):
        """
        finds a function handle with the name given as 'type' in config, and returns the
        instance initialized with corresponding keyword args given as 'args'.
        """
        module_name = self[name]['type']
        module_args = dict(self[name].get('args', {}))
        if any(k in module_args for k in kwargs):
            raise ConfigError('Overwriting kwargs given in config file is not allowed')
        module_args.update(kwargs)
        try:
            handle = getattr(module, module_name)
        except AttributeError:
            raise ConfigError('unknown {} type {!r}'.format(name, module_name))
        try:
            return handle(*args, **module_args)
        except TypeError as err:
            raise ConfigError('invalid arguments for {} {!r}: {}'.format(name, module_name, err)) from err

    def build_grid(self):
        cfg = self['grid']
        return TorusGrid(cfg['dimension'], cfg['period'], cfg['points'])

    def build_field(self, grid=None):
        """ Coefficient field of the `coefficient` section on the configured grid; raises EllipticityError. """
        grid = self.build_grid() if grid is None else grid
        family = self.initialize('coefficient', module_coeff)
        return family.field(grid)

    def __getitem__(self, name):
        return self.config[name]

    def get(self, name, default=None):
        return self.config.get(name, default)

    def get_logger(self, name, verbosity=2):
        msg_verbosity = 'verbosity option {} is invalid. Valid options are {}.'.format(verbosity,
                                                                                       self.log_levels.keys())
        assert verbosity in self.log_levels, msg_verbosity
        logger = logging.getLogger(name)
        logger.setLevel(self.log_levels[verbosity])
        return logger

    # setting read-only attributes
    @property
    def config(self):
        return self._config

    @property
    def raw(self):
        return self._raw

    @property
    def save_dir(self):
        return self._save_dir


# helper functions used to update config dict with custom cli options
def _merge_defaults(defaults, config):
    merged = copy.deepcopy(defaults)
    for key, value in config.items():
        if key == 'coefficient' or not isinstance(value, dict) or not isinstance(merged.get(key), dict):
            merged[key] = copy.deepcopy(value)
        else:
            merged[key] = _merge_defaults(merged[key], value)
    return merged


def _update_config(config, modification):
    if modification is None:
        return config

    for k, v in modification.items():
        if v is not None:
            _set_by_path(config, k, v)
    return config


def _normalize(config):
    """ Symbolic literals to floats and the structural checks a run depends on. """
    grid = config['grid']
    try:
        grid['period'] = parse_number(grid['period'])
        grid['dimension'] = int(grid['dimension'])
        grid['points'] = int(grid['points'])
        config['kernel']['period'] = parse_number(config['kernel']['period'])
        for section in ('kernel', 'semigroup'):
            config[section]['times'] = [parse_number(t) for t in config[section]['times']]
        tolerance = config['tolerance']
        for key, value in tolerance.items():
            tolerance[key] = [parse_number(v) for v in value] if isinstance(value, list) else parse_number(value)
    except (TypeError, ValueError) as err:
        raise ConfigError('invalid numeric field: {}'.format(err)) from err

    if grid['dimension'] not in (1, 2):
        raise ConfigError('grid.dimension must be 1 or 2, got {}'.format(grid['dimension']))
    if grid['dimension'] == 2:
        if not config['verify']['allow_2d']:
            raise ConfigError('2-d runs must be enabled with verify.allow_2d')
        if grid['points'] > MAX_POINTS_2D:
            raise ConfigError('2-d runs are limited to {} points per axis, got {}'.format(
                MAX_POINTS_2D, grid['points']))
    try:
        TorusGrid(grid['dimension'], grid['period'], grid['points'])
    except GridError as err:
        raise ConfigError('invalid grid: {}'.format(err)) from err
    if config['verify']['refinement_levels'] < 1:
        raise ConfigError('verify.refinement_levels must be at least 1')
    if config['verify']['verbosity'] not in (0, 1, 2):
        raise ConfigError('verify.verbosity must be 0, 1 or 2')
    return config


def _get_opt_name(flags):
    for flg in flags:
        if flg.startswith('--'):
            return flg.replace('--', '').replace('-', '_')
    return flags[0].replace('--', '')


def _set_by_path(tree, keys, value):
    """Set a value in a nested object in tree by sequence of keys."""
    _get_by_path(tree, keys[:-1])[keys[-1]] = value


def _get_by_path(tree, keys):
    """Access a nested object in tree by sequence of keys."""
    return reduce(getitem, keys, tree)
