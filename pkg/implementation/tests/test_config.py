import argparse
import json

import numpy as np
import pytest

import coeff as module_coeff
from parse_config import DEFAULTS, ConfigParser
from utils import ConfigError, EllipticityError


def test_defaults_are_merged(make_config):
    config = make_config()
    assert config['grid']['period'] == pytest.approx(2 * np.pi)
    assert config['strip']['height_factor'] == 4
    assert config['ensemble']['decay'] == DEFAULTS['ensemble']['decay']
    assert config['ensemble']['size'] == 4
    assert config['kernel']['period'] == pytest.approx(16 * np.pi)
    assert config['tolerance']['ratio_bounds'] == [0.02, 50]


def test_modification_and_refine():
    raw = {'grid': {'points': 32}}
    config = ConfigParser(raw, {('grid', 'points'): 64, ('seed',): None}, save=False, refine=True)
    assert config['grid']['points'] == 64
    assert config['seed'] == 0
    assert config['verify']['refinement_levels'] == DEFAULTS['verify']['refinement_levels'] + 1
    # the caller's dict is left alone
    assert raw == {'grid': {'points': 32}}


@pytest.mark.parametrize('sections', [
    {'grid': {'dimension': 2, 'points': 32}},
    {'grid': {'dimension': 2, 'points': 128}, 'verify': {'allow_2d': True}},
    {'grid': {'period': 'pi/'}},
    {'grid': {'points': 33}},
    {'grid': {'dimension': 3}},
    {'verify': {'refinement_levels': 0}},
    {'verify': {'verbosity': 5}},
    {'tolerance': {'drift': 'much'}},
])
def test_invalid_configurations(make_config, sections):
    with pytest.raises(ConfigError):
        make_config(**sections)


def test_two_dimensional_runs_are_opt_in(make_config):
    config = make_config(grid={'dimension': 2, 'points': 16}, verify={'allow_2d': True, 'verbosity': 0})
    assert config.build_grid().shape == (16, 16)


def test_run_directory(tmp_path):
    raw = {'name': 'saved-run', 'verify': {'save_dir': str(tmp_path)}, 'grid': {'points': 16}}
    config = ConfigParser(raw, run_id='fixed')
    assert config.save_dir == tmp_path / 'saved-run' / 'fixed'
    written = json.loads((config.save_dir / 'config.json').read_text())
    # symbolic literals are written back as given
    assert written['grid']['period'] == '2*pi'
    assert written['grid']['points'] == 16
    info = json.loads((config.save_dir / 'run_info.json').read_text())
    assert info['run_id'] == 'fixed' and 'started' in info


def test_initialize(make_config):
    family = make_config().initialize('coefficient', module_coeff)
    assert isinstance(family, module_coeff.ConstantFamily)
    with pytest.raises(ConfigError):
        make_config(coefficient={'type': 'NoSuchFamily', 'args': {}}).initialize('coefficient', module_coeff)
    with pytest.raises(ConfigError):
        make_config(coefficient={'type': 'ConstantFamily', 'args': {'bogus': 1}}).initialize('coefficient',
                                                                                              module_coeff)


def test_build_field_checks_ellipticity(make_config):
    config = make_config(coefficient={'type': 'ConstantFamily', 'args': {'matrix': [[1, 0], [0, -1]]}})
    with pytest.raises(EllipticityError):
        config.build_field()


def test_from_args(tmp_path):
    missing = argparse.Namespace(config=str(tmp_path / 'missing.json'), run_id=None, refine=False)
    with pytest.raises(ConfigError):
        ConfigParser.from_args(missing)
    with pytest.raises(ConfigError):
        ConfigParser.from_args(argparse.Namespace(config=None))

    path = tmp_path / 'config.json'
    path.write_text(json.dumps({'name': 'from-args', 'verify': {'save_dir': str(tmp_path)}}))
    config = ConfigParser.from_args(argparse.Namespace(config=str(path), run_id='cli', refine=True))
    assert config.run_id == 'cli'
    assert config['verify']['refinement_levels'] == 3
    assert (tmp_path / 'from-args' / 'cli' / 'config.json').is_file()
