import json
import logging
from pathlib import Path

import numpy as np
import pytest

from base import EstimateReport
from logger import setup_logging, visualization
from utils import ConfigError


class FakeExperiment:
    def __init__(self, **kwargs):
        self.kwargs = kwargs
        self.metrics, self.parameters = [], {}
        self.name, self.ended = None, False

    def set_name(self, name):
        self.name = name

    def log_parameters(self, params):
        self.parameters.update(params)

    def log_metrics(self, metrics, step=None):
        self.metrics.append((step, metrics))

    def end(self):
        self.ended = True


@pytest.fixture
def writer(monkeypatch, tmp_path):
    monkeypatch.setattr(visualization, '_COMET_AVAILABLE', True)
    monkeypatch.setattr(visualization, 'CometOfflineExperiment', FakeExperiment, raising=False)
    return visualization.CometWriter(logging.getLogger('test'), project_name='p', experiment_name='run',
                                     log_dir=tmp_path)


def test_writer_contexts(writer):
    experiment = writer.experiment
    assert writer.mode == 'offline' and experiment.name == 'run'
    writer.set_step(0, 'dn-consistency')
    writer.add_scalar({'median_gap': 0.01, 'modal': complex(1.0, 2.0)})
    step, metrics = experiment.metrics[-1]
    assert step == 0
    assert metrics == {'dn-consistency/median_gap': 0.01, 'dn-consistency/modal/real': 1.0,
                       'dn-consistency/modal/imag': 2.0}

    writer.set_step(1, 'dn-consistency')
    assert 'dn-consistency/seconds_per_level' in experiment.metrics[-1][1]


def test_writer_reports(writer):
    experiment = writer.experiment
    report = EstimateReport('phi-closure', '').require('gap', 1e-12, '<', 1e-10)
    report.constants.update(gap=1e-12, note='text')
    writer.add_report(report)
    _, metrics = experiment.metrics[-1]
    assert metrics == {'phi-closure/gap': 1e-12, 'phi-closure/passed': 1}
    writer.finalize()
    assert experiment.ended and writer.experiment is None


def test_writer_requires_comet(monkeypatch):
    monkeypatch.setattr(visualization, '_COMET_AVAILABLE', False)
    with pytest.raises(ImportError):
        visualization.CometWriter(logging.getLogger('test'))


def test_setup_logging_writes_into_run_directory(tmp_path):
    setup_logging(tmp_path)
    logging.getLogger('verify.test').warning('written')
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert 'written' in (tmp_path / 'info.log').read_text()
    assert 'written' in (tmp_path / 'warnings.log').read_text()


def test_setup_logging_follows_verbosity_and_custom_config(tmp_path):
    setup_logging(tmp_path, verbosity=0)
    assert logging.getLogger().level == logging.WARNING
    custom = tmp_path / 'quiet.json'
    custom.write_text(json.dumps({
        'version': 1, 'disable_existing_loggers': False,
        'handlers': {'file': {'class': 'logging.FileHandler', 'filename': 'quiet.log'}},
        'root': {'level': 'INFO', 'handlers': ['file']},
    }))
    (tmp_path / 'run').mkdir()
    setup_logging(tmp_path / 'run', log_config=custom, verbosity=2)
    assert logging.getLogger().level == logging.DEBUG
    assert Path(logging.getLogger().handlers[0].baseFilename) == tmp_path / 'run' / 'quiet.log'
    with pytest.raises(ConfigError):
        setup_logging(tmp_path, log_config=tmp_path / 'missing.json')
    with pytest.raises(ConfigError):
        setup_logging(tmp_path, verbosity=3)


def test_plot_kernel_decay(tmp_path):
    y = np.linspace(0.0, 4.0, 50)
    slices = [{'t': 0.5, 'y': y, 'magnitude': (1 + y / 0.5) ** -2.0, 'envelope': (1 + y / 0.5) ** -2.0}]
    fname = visualization.plot_kernel_decay(slices, tmp_path / 'decay.png', title='unit')
    assert fname.is_file()
