import json

import numpy as np
import pytest

from utils import (ConfigError, EllipticityError, LipschitzDNError, loglog_slope, observed_order, parse_number,
                   read_json, smooth_cutoff, smooth_cutoff_derivative, trend_tau, write_json)


def test_parse_number_symbolic():
    assert parse_number('2*pi') == pytest.approx(2 * np.pi, rel=1e-15)
    assert parse_number(3) == 3.0
    assert parse_number('0.5 + 0.2*I', complex) == complex(0.5, 0.2)
    assert parse_number([1, -2], complex) == complex(1, -2)


def test_parse_number_rejects_garbage():
    with pytest.raises(ConfigError):
        parse_number('2*)')
    with pytest.raises(ConfigError):
        parse_number('1 + I')


def test_read_json_reports_position(tmp_path):
    fname = tmp_path / 'broken.json'
    fname.write_text('{\n  "name": "x",\n  "seed": \n}\n')
    with pytest.raises(ConfigError) as info:
        read_json(fname)
    assert info.value.line == 4


def test_write_json_complex(tmp_path):
    fname = tmp_path / 'out.json'
    write_json({'z': np.complex128(1 + 2j), 'a': np.arange(3)}, fname)
    content = json.loads(fname.read_text())
    assert content == {'z': [1.0, 2.0], 'a': [0, 1, 2]}


def test_smooth_cutoff():
    t = np.linspace(0.0, 3.0, 301)
    chi = smooth_cutoff(t)
    assert np.all(chi[t <= 1.0] == 1.0)
    assert np.all(chi[t >= 2.0] == 0.0)
    assert np.all(np.diff(chi) <= 0.0)
    assert np.all(smooth_cutoff_derivative(t) <= 0.0)
    # finite differences of the cut-off match its derivative inside (1, 2)
    inner = (t > 1.05) & (t < 1.95)
    assert np.allclose(np.gradient(chi, t)[inner], smooth_cutoff_derivative(t)[inner], atol=5e-3)


def test_trend_statistics():
    assert trend_tau([1, 2, 3, 4, 5]) == pytest.approx(1.0)
    assert trend_tau([1, 1, 1]) == 0.0
    assert trend_tau([1, 2]) == 0.0
    x = np.array([1.0, 2.0, 4.0, 8.0])
    assert loglog_slope(x, 3 * x ** -2) == pytest.approx(-2.0)
    assert np.isnan(loglog_slope([1.0], [1.0]))
    assert np.allclose(observed_order([1e-2, 2.5e-3, 6.25e-4]), [2.0, 2.0])


def test_error_hierarchy():
    err = EllipticityError('bad', node=(3,), direction=np.array([1.0, 1j]), value=-0.5)
    assert isinstance(err, LipschitzDNError)
    assert err.witness() == {'node': [3], 'direction': [[1.0, 0.0], [0.0, 1.0]], 'value': -0.5}
    assert 'line 2' in str(ConfigError('syntax', line=2, column=5))
