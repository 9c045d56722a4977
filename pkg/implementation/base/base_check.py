from abc import abstractmethod
from collections import OrderedDict

import numpy as np
from tqdm import tqdm

from solver import StripDiscretization
from utils import loglog_slope, summarize, trend_tau

from .base_report import EstimateReport


class BaseCheck:
    """
    Base class for all checks

    A check measures one identity or inequality on a refinement series: the base grid and, for
    checks with `refines`, dyadically refined copies of it (N and Nt doubled each time).
    """
    name = 'check'
    statement = ''
    refines = True

    def __init__(self, field, config, ensemble=None, writer=None):
        self.config = config
        self.logger = config.get_logger('verify.{}'.format(self.name), config['verify']['verbosity'])
        self.field = field
        self.ensemble = ensemble
        self.writer = writer
        self.tolerance = config['tolerance']

        cfg_strip = config['strip']
        self.height_factor = cfg_strip['height_factor']
        self.base_levels = cfg_strip['levels']
        self.permc_spec = cfg_strip['permc_spec']
        self.refinement_steps = cfg_strip['refinement_steps']
        self.levels = config['verify']['refinement_levels'] if self.refines else 1

    @abstractmethod
    def _check_resolution(self, field, level):
        """
        Measurements on one grid of the refinement series

        :param field: coefficient field sampled on the current grid
        :param level: 0 for the base grid, k for a 2^k refinement
        :return: dict of recorded numbers
        """
        raise NotImplementedError

    @abstractmethod
    def _report(self, series):
        """
        Fold the per-resolution measurements into an EstimateReport
        """
        raise NotImplementedError

    def resolutions(self):
        field = self.field
        for level in range(self.levels):
            yield level, field
            if level + 1 < self.levels:
                field = field.with_grid(field.grid.refine())

    def strip(self, field, level=0):
        height = self.height_factor * field.grid.period
        levels = None if self.base_levels is None else int(self.base_levels) * 2 ** level
        return StripDiscretization.for_field(field, height=height, levels=levels, permc_spec=self.permc_spec,
                                             refinement_steps=self.refinement_steps)

    def run(self):
        series = []
        for level, field in tqdm(self.resolutions(), total=self.levels, desc=self.name, leave=False):
            result = self._check_resolution(field, level)
            result = OrderedDict([('points', field.grid.points)] + list(result.items()))
            for key, value in result.items():
                if np.isscalar(value):
                    self.logger.info('    {:24s}: {}'.format(str(key), value))
            if self.writer is not None:
                self.writer.set_step(level, self.name)
                self.writer.add_scalar({k: v for k, v in result.items() if np.isscalar(v)})
            series.append(result)

        report = self._report(series)
        report.grid = OrderedDict(self.field.grid.describe())
        report.grid['strip'] = self.strip(self.field).describe()
        report.grid['field'] = self.field.name
        if self.ensemble is not None and not report.ensemble:
            report.ensemble = self.ensemble.describe()
        self.logger.info('{}: {}'.format(report.name, report.verdict))
        if self.writer is not None:
            self.writer.add_report(report)
        return report

    def new_report(self, **kwargs):
        kwargs.setdefault('name', self.name)
        kwargs.setdefault('statement', self.statement)
        return EstimateReport(**kwargs)

    # criteria shared by the checks

    def require_halving(self, report, label, values, floor=None):
        """ value(2N) / value(N) <= halving ratio, or both below the absolute floor. """
        if len(values) < 2:
            report.notes.append('{}: single resolution, halving not assessed'.format(label))
            return
        floor = self.tolerance['floor'] if floor is None else floor
        for coarse, fine in zip(values[:-1], values[1:]):
            if coarse < floor and fine < floor:
                report.require('{} below floor'.format(label), max(coarse, fine), '<', floor)
            else:
                report.require('{} refinement ratio'.format(label), fine / coarse, '<=', self.tolerance['halving'])

    def require_stable(self, report, label, values):
        """ relative drift between consecutive resolutions below the drift tolerance """
        if len(values) < 2:
            report.notes.append('{}: single resolution, drift not assessed'.format(label))
            return
        floor = self.tolerance['floor']
        drift = 0.0
        for coarse, fine in zip(values[:-1], values[1:]):
            if max(abs(coarse), abs(fine)) > floor:
                drift = max(drift, abs(fine - coarse) / max(abs(coarse), abs(fine)))
        report.require('{} drift'.format(label), drift, '<', self.tolerance['drift'])

    def require_no_growth(self, report, label, modes, values):
        """ Kendall tau of the values against the sweep parameter; the log-log slope is only reported. """
        tau = trend_tau(values)
        report.constants['{} tau'.format(label)] = tau
        report.constants['{} slope'.format(label)] = loglog_slope(modes, values)
        report.require('{} growth trend tau'.format(label), tau, '<=', self.tolerance['kendall'])

    @staticmethod
    def summary(values):
        return summarize(values)
