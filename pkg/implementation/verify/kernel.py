"""
Off-diagonal decay of the kernels of G_p(t) at a frozen node, fitted against (1 + |y|/t)^slope.
"""
from collections import OrderedDict

import numpy as np

from base.base_check import BaseCheck
from grid import TorusGrid
from psdo import fit_decay, kernel_mass, kernel_slice, poisson_kernel_reference, weight_from_tag
from symbol import principal_symbol
from utils import parse_number

VANISHING = 1e-12


def kernel_grid(field, cfg):
    """ The wide torus of the kernel study; in d = 2 the point count is capped by the base grid. """
    grid = field.grid
    points = int(cfg['points'])
    if grid.dimension > 1:
        points = min(points, grid.points)
    return TorusGrid(grid.dimension, parse_number(cfg['period']), points)


def decay_study(field, weights, times, node=0):
    """
    Kernel slices and decay fits for every (weight, t).

    :return: list of dicts with keys weight, t, y, values, magnitude, envelope, fitted, slope, sup
    """
    grid = field.grid
    mu = principal_symbol(field)
    index = (int(node) % grid.points,) * grid.dimension
    out = []
    for tag in weights:
        weight = weight_from_tag(tag, field)
        for t in times:
            offsets, values = kernel_slice(weight, field, index, float(t), mu)
            fit = fit_decay(offsets, values, float(t), grid.period)
            out.append(OrderedDict(weight=tag, t=float(t), offsets=offsets, values=values, y=fit['radius'],
                                   magnitude=fit['magnitude'], envelope=fit['envelope'], fitted=fit['fitted'],
                                   slope=fit['slope'], sup=float(np.abs(values).max())))
    return out


def reference_gap(item, period):
    """ sup over t <= |y| <= L/4 of |(2 pi)^(-1/2) G - periodized Poisson kernel|, relative to its sup. """
    y = item['offsets'][0].ravel()
    values = (2.0 * np.pi) ** -0.5 * item['values'].ravel()
    reference = poisson_kernel_reference(y, item['t'], period)
    keep = np.abs(y) <= 0.25 * period
    return float(np.abs(values[keep] - reference[keep]).max() / np.abs(reference).max())


def is_identity(field):
    n = field.size
    identity = np.eye(n).reshape((n, n) + (1,) * field.grid.dimension)
    return bool(np.allclose(field.entries, identity, atol=1e-14))


class KernelDecayCheck(BaseCheck):
    name = 'kernel-decay'
    statement = '|G_p(x, y, t)| <= C t^(-d) (1 + |y|/t)^(-d-1) off the diagonal'
    refines = False

    def __init__(self, field, config, ensemble=None, writer=None):
        cfg = config['kernel']
        grid = kernel_grid(field, cfg)
        field = field.with_grid(grid) if grid != field.grid else field
        super().__init__(field, config, ensemble, writer)
        self.weights = list(cfg['weights'])
        self.times = [float(t) for t in cfg['times']]
        self.node = int(cfg['node'])

    def _check_resolution(self, field, level):
        study = decay_study(field, self.weights, self.times, self.node)
        result = OrderedDict()
        for item in study:
            key = '{} t={:g}'.format(item['weight'], item['t'])
            result[key + ' slope'] = item['slope']
            result[key + ' sup'] = item['sup']
            if item['weight'] == 'unit':
                result[key + ' mass'] = kernel_mass(field.grid, item['values'])
                if field.grid.dimension == 1 and is_identity(field):
                    result[key + ' reference gap'] = reference_gap(item, field.grid.period)
        return result

    def _report(self, series):
        base = series[0]
        d = self.field.grid.dimension
        report = self.new_report(refinement=series, samples=self.times,
                                 tolerance={'slope': -(d + 0.5), 'q_bracket': [-d - 1.0, -d + 1.0],
                                            'kernel_reference': self.tolerance['kernel_reference']})
        report.constants.update(base)
        for tag in self.weights:
            for t in self.times:
                key = '{} t={:g}'.format(tag, t)
                if base[key + ' sup'] < VANISHING:
                    report.notes.append('{}: kernel vanishes identically, no decay fit'.format(key))
                    continue
                if tag in ('unit', 'pi-prime'):
                    report.require('{} decay slope'.format(key), base[key + ' slope'], '<=', -(d + 0.5))
                elif tag == 'q-weight':
                    report.require('{} decay slope'.format(key), base[key + ' slope'], 'in', [-d - 1.0, -d + 1.0])
                if key + ' reference gap' in base:
                    report.require('{} against the Poisson kernel'.format(key), base[key + ' reference gap'], '<',
                                   self.tolerance['kernel_reference'])
        report.notes.append('zeta slopes and unit-weight masses are reported, not asserted')
        report.notes.append('fits use the outer envelope over t <= |y| <= L/4')
        return report
