import copy
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from coeff import ConstantFamily, LipschitzFamily  # noqa: E402
from grid import TorusGrid  # noqa: E402
from parse_config import ConfigParser  # noqa: E402

RUNNING_MATRIX = [[2.0, 0.5], [0.3, 1.0]]
# mu_A(x, 1) of the running example: -0.4 + i sqrt(1.84)
RUNNING_MU = complex(-0.4, np.sqrt(1.84))


@pytest.fixture
def grid16():
    return TorusGrid(1, 2 * np.pi, 16)


@pytest.fixture
def grid32():
    return TorusGrid(1, 2 * np.pi, 32)


@pytest.fixture
def grid64():
    return TorusGrid(1, 2 * np.pi, 64)


@pytest.fixture
def running_family():
    return ConstantFamily(RUNNING_MATRIX, name='running-example')


@pytest.fixture
def identity_family():
    return ConstantFamily([[1, 0], [0, 1]], name='identity')


@pytest.fixture
def lipschitz_family():
    return LipschitzFamily(amplitude=0.5, skew_amplitude=0.4, seed=3)


@pytest.fixture
def make_config():
    """ ConfigParser factory without a run directory; `sections` are merged over a small base. """
    def build(**sections):
        config = {
            'name': 'test',
            'seed': 0,
            'coefficient': {'type': 'ConstantFamily', 'args': {'matrix': RUNNING_MATRIX}},
            'grid': {'dimension': 1, 'period': '2*pi', 'points': 32},
            'ensemble': {'size': 4, 'band': 2},
            'verify': {'refinement_levels': 1, 'verbosity': 0},
        }
        for key, value in sections.items():
            if isinstance(value, dict) and isinstance(config.get(key), dict) and key != 'coefficient':
                config[key] = dict(config[key], **value)
            else:
                config[key] = copy.deepcopy(value)
        return ConfigParser(config, save=False)
    return build
