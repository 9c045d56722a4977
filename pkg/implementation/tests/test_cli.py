import json

import pytest

import run
from conftest import RUNNING_MATRIX

IDENTITY = [[1, 0], [0, 1]]


@pytest.fixture
def config_file(tmp_path):
    def write(matrix=RUNNING_MATRIX, **sections):
        config = {
            'name': 'cli',
            'coefficient': {'type': 'ConstantFamily', 'args': {'matrix': matrix}},
            'grid': {'dimension': 1, 'period': '2*pi', 'points': 32},
            'ensemble': {'size': 4, 'band': 2},
            'verify': {'refinement_levels': 1, 'verbosity': 0},
        }
        config.update(sections)
        path = tmp_path / 'config.json'
        path.write_text(json.dumps(config))
        return str(path)
    return write


def _args(tmp_path, *extra):
    return list(extra) + ['-o', str(tmp_path / 'out'), '--run-id', 'run']


def test_check_symbol(tmp_path, config_file):
    code = run.main(['check-symbol', config_file()] + _args(tmp_path, '--N', '16'))
    assert code == run.EXIT_PASS
    out = tmp_path / 'out' / 'cli' / 'run'
    assert (out / 'symbol.csv').is_file()
    report = json.loads((out / 'report.json').read_text())['reports'][0]
    assert report['verdict'] == 'pass'
    saved = json.loads((out / 'config.json').read_text())
    assert saved['grid']['points'] == 16


def test_solve_modal_values(tmp_path, config_file):
    code = run.main(['solve', config_file(), '--data', 'mode:1'] + _args(tmp_path, '--N', '64'))
    assert code == run.EXIT_PASS
    out = tmp_path / 'out' / 'cli' / 'run'
    traces = json.loads((out / 'traces.json').read_text())
    assert traces['mode'] == [1]
    re, im = traces['modal_values']['P']
    assert complex(re, im) == pytest.approx(complex(1.356466, 0.4), rel=3e-2)
    assert (out / 'traces.csv').is_file() and (out / 'solution.csv').is_file()


def test_solve_expression_data(tmp_path, config_file):
    code = run.main(['solve', config_file(IDENTITY), '--data', 'sin(x) + 0.5*I*cos(2*x)'] + _args(tmp_path))
    assert code == run.EXIT_PASS


def test_verify_suite(tmp_path, config_file):
    code = run.main(['verify', config_file(), '--suite', 'phi'] + _args(tmp_path, '--N', '16'))
    assert code == run.EXIT_PASS
    out = tmp_path / 'out' / 'cli' / 'run'
    reports = json.loads((out / 'report.json').read_text())['reports']
    assert [r['name'] for r in reports] == ['phi-closure']
    assert (out / 'phi-closure.csv').is_file()


def test_kernel_plot(tmp_path, config_file):
    path = config_file(IDENTITY, kernel={'points': 128, 'period': '8*pi', 'node': 0})
    code = run.main(['kernel', path, '--weight', 'unit', '--times', '0.5', '--plot'] + _args(tmp_path))
    assert code == run.EXIT_PASS
    out = tmp_path / 'out' / 'cli' / 'run'
    assert (out / 'kernel.csv').is_file()
    assert (out / 'kernel_unit.png').is_file()


def test_unknown_suite(tmp_path, config_file):
    assert run.main(['verify', config_file(), '--suite', 'bogus'] + _args(tmp_path)) == run.EXIT_CONFIG


def test_malformed_config(tmp_path):
    path = tmp_path / 'broken.json'
    path.write_text('{"name": "broken",\n "grid": {"points": 32,}\n}')
    assert run.main(['check-symbol', str(path)] + _args(tmp_path)) == run.EXIT_CONFIG


def test_missing_config(tmp_path):
    assert run.main(['check-symbol', str(tmp_path / 'missing.json')]) == run.EXIT_CONFIG


def test_non_elliptic_field(tmp_path, config_file, capsys):
    code = run.main(['check-symbol', config_file([[1, 0], [0, -1]])] + _args(tmp_path))
    assert code == run.EXIT_FAIL
    assert 'witness' in capsys.readouterr().err


def test_untagged_weight_is_a_configuration_error(tmp_path, config_file):
    path = config_file(quadratic={'weights': ['unit']})
    assert run.main(['verify', path, '--suite', 'quadratic'] + _args(tmp_path)) == run.EXIT_CONFIG


def test_verify_is_reproducible(tmp_path, config_file):
    path = config_file()
    written = []
    for run_id in ('first', 'second'):
        run.main(['verify', path, '--suite', 'dn,remainder', '--N', '16', '-o', str(tmp_path / 'out'),
                  '--run-id', run_id])
        written.append((tmp_path / 'out' / 'cli' / run_id / 'report.json').read_bytes())
    assert written[0] == written[1]
    assert json.loads(written[0])['reports']
