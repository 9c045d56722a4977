import numpy as np

from base.base_check import BaseCheck
from grid import sobolev_norm
from solver import poisson_apply

ORDERS = (0.0, 0.25, 0.5, 0.75, 1.0)


class DomainEquivalenceCheck(BaseCheck):
    """
    Graph norm of P_A on H^s against the H^(1+s) norm: the ratios
    (||P_A f||_{H^s} + ||f||_{H^s}) / ||f||_{H^(1+s)} stay inside fixed bounds on every grid.
    """
    name = 'domain-equivalence'
    statement = '||P_A f||_{H^s} + ||f||_{H^s} ~ ||f||_{H^(1+s)}'

    def __init__(self, field, config, ensemble=None, writer=None, orders=ORDERS):
        super().__init__(field, config, ensemble, writer)
        self.orders = tuple(orders)

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        ratios = {s: [] for s in self.orders}
        for f in self.ensemble.members(field.grid):
            p_f = poisson_apply(strip, f)
            for s in self.orders:
                ratios[s].append((sobolev_norm(p_f, s) + sobolev_norm(f, s)) / sobolev_norm(f, 1.0 + s))
        result = {}
        for s in self.orders:
            result['min_ratio_s{:g}'.format(s)] = float(np.min(ratios[s]))
            result['max_ratio_s{:g}'.format(s)] = float(np.max(ratios[s]))
        return result

    def _report(self, series):
        low, high = self.tolerance['ratio_bounds']
        report = self.new_report(refinement=series, samples=list(self.orders),
                                 tolerance={'ratio_bounds': [low, high], 'drift': self.tolerance['drift']})
        for s in self.orders:
            lo = [r['min_ratio_s{:g}'.format(s)] for r in series]
            hi = [r['max_ratio_s{:g}'.format(s)] for r in series]
            report.constants['s={:g}'.format(s)] = {'min': lo[0], 'max': hi[0]}
            report.require('min ratio s={:g}'.format(s), min(lo), 'in', [low, high])
            report.require('max ratio s={:g}'.format(s), max(hi), 'in', [low, high])
            self.require_stable(report, 'min ratio s={:g}'.format(s), lo)
            self.require_stable(report, 'max ratio s={:g}'.format(s), hi)
        return report
