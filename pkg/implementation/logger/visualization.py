from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

try:
    from comet_ml import Experiment as CometExperiment
    from comet_ml import OfflineExperiment as CometOfflineExperiment
except ImportError:  # pragma: no-cover
    _COMET_AVAILABLE = False
else:
    _COMET_AVAILABLE = True

from utils import Timer


class CometWriter:
    """
    Sends empirical constants and residuals of estimate reports to comet.ml.
    Each check is logged under its own context; the refinement level plays the role of the step.
    """
    def __init__(
        self,
        logger,
        project_name: Optional[str] = None,
        experiment_name: Optional[str] = None,
        api_key: Optional[str] = None,
        log_dir: Optional[str] = None,
        offline: bool = False,
        **kwargs):
        if not _COMET_AVAILABLE:
            raise ImportError(
                "You want to use `comet_ml` logger which is not installed yet,"
                " install it with `pip install comet-ml`."
            )

        self.project_name = project_name
        self.experiment_name = experiment_name
        self.kwargs = kwargs
        self.timer = Timer()
        self.context = ''
        self.step = 0

        if api_key is not None:
            self.mode = "offline" if (offline and log_dir is not None) else "online"
        elif log_dir is not None:
            self.mode = "offline"
        else:
            logger.warning("CometWriter requires either api_key or log_dir; falling back to offline mode in '.'.")
            self.mode = "offline"
            log_dir = '.'
        self.api_key = api_key
        self.log_dir = log_dir

        if self.mode == "online":
            self.experiment = CometExperiment(
                api_key=self.api_key,
                project_name=self.project_name,
                **self.kwargs,
            )
        else:
            self.experiment = CometOfflineExperiment(
                offline_directory=str(self.log_dir),
                project_name=self.project_name,
                **self.kwargs,
            )

        if self.experiment_name:
            self.experiment.set_name(self.experiment_name)

    def set_step(self, step, context='check') -> None:
        self.context = context
        self.step = step
        if step == 0:
            self.timer.reset()
        else:
            duration = self.timer.check()
            self.add_scalar({'seconds_per_level': duration})

    def log_hyperparams(self, params: Dict[str, Any]) -> None:
        self.experiment.log_parameters(params)

    def add_scalar(self, metrics: Dict[str, Any], step: Optional[int] = None) -> None:
        metrics_renamed = {}
        for key, val in metrics.items():
            if isinstance(val, (np.generic, np.ndarray)):
                val = np.asarray(val).item()
            if isinstance(val, complex):
                metrics_renamed['{}/{}/real'.format(self.context, key)] = val.real
                metrics_renamed['{}/{}/imag'.format(self.context, key)] = val.imag
            else:
                metrics_renamed['{}/{}'.format(self.context, key)] = val
        self.experiment.log_metrics(metrics_renamed, step=self.step if step is None else step)

    def add_report(self, report) -> None:
        """ Logs the empirical constants and the verdict of an EstimateReport. """
        self.context = report.name
        metrics = {k: v for k, v in report.constants.items() if isinstance(v, (int, float, np.floating))}
        metrics['passed'] = int(report.passed)
        self.add_scalar(metrics)

    def reset_experiment(self):
        self.experiment = None

    def finalize(self) -> None:
        self.experiment.end()
        self.reset_experiment()


def plot_kernel_decay(slices, fname, title=None):
    """
    Log-log plot of |G(x, y, t)| against |y| / t with the fitted envelope.

    slices: iterable of dicts with keys 't', 'y', 'magnitude', 'envelope' (arrays)
    """
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 5))
    for item in slices:
        y = np.asarray(item['y'])
        keep = y > 0
        scaled = 1.0 + y[keep] / item['t']
        line, = ax.loglog(scaled, np.asarray(item['magnitude'])[keep], label='t = {:g}'.format(item['t']))
        if item.get('envelope') is not None:
            ax.loglog(scaled, np.asarray(item['envelope'])[keep], linestyle='--', color=line.get_color())
    ax.set_xlabel('1 + |y| / t')
    ax.set_ylabel('|G(x, y, t)|')
    if title:
        ax.set_title(title)
    ax.legend()
    fname = Path(fname)
    plt.savefig(fname, bbox_inches='tight')
    plt.close(fig)
    return fname
