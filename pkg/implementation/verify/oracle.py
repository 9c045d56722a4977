"""
Convergence of the strip oracle itself: the exponential ansatz exp(i t mu_A(k)) exp(i k x) for
constant fields and the manufactured solution f(x) g(t) for any field.
"""
import numpy as np

from base.base_check import BaseCheck
from grid import GridFunction
from solver import StripSolution, separable_source, strip_norm
from symbol import principal_symbol
from utils import observed_order

from .factorization import gaussian_profile


def manufactured_data(grid):
    """ f = exp(i x_1) + exp(2 i x) / 2 with x the sum of the coordinates. """
    d = grid.dimension
    first = GridFunction.mode(grid, *([1] + [0] * (d - 1)))
    second = GridFunction.mode(grid, *([2] * d))
    return first + second * 0.5


def exponential_ansatz(strip, k=1):
    """ Exact half-space extension of exp(i k x_1) for a constant field. """
    grid = strip.grid
    d = grid.dimension
    index = grid.lattice.index_of(*([k] + [0] * (d - 1)))
    mu = principal_symbol(strip.field).values[(0,) * d + index]
    mode = GridFunction.mode(grid, *([k] + [0] * (d - 1)))
    shape = (-1,) + (1,) * d
    return np.exp(1j * strip.times * mu).reshape(shape) * mode.values


class OracleConvergenceCheck(BaseCheck):
    name = 'oracle-convergence'
    statement = 'strip solutions converge at second order to exact and manufactured solutions'

    def __init__(self, field, config, ensemble=None, writer=None):
        super().__init__(field, config, ensemble, writer)
        self.levels = max(2, self.levels)

    def _relative(self, strip, computed, exact):
        exact = StripSolution(strip.grid, strip.times, exact)
        error = StripSolution(strip.grid, strip.times, computed - exact.values)
        return strip_norm(error) / strip_norm(exact)

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        result = {'dt': strip.dt}
        if field.is_constant:
            exact = exponential_ansatz(strip)
            mode = GridFunction(field.grid, exact[0])
            result['ansatz_error'] = self._relative(strip, strip.solve_dirichlet(mode).values, exact)

        g, dg, d2g = gaussian_profile(strip.height)
        f = manufactured_data(field.grid)
        source = separable_source(field, f, g, dg, d2g, strip.times)
        source[strip.times > 0.5 * strip.height] = 0.0
        shape = (-1,) + (1,) * field.grid.dimension
        exact = g(strip.times).reshape(shape) * f.values
        result['manufactured_error'] = self._relative(strip, strip.solve_inhomogeneous(source).values, exact)
        return result

    def _report(self, series):
        report = self.new_report(refinement=series,
                                 tolerance={'oracle': self.tolerance['oracle'], 'order': self.tolerance['order']})
        keys = ['manufactured_error'] + (['ansatz_error'] if 'ansatz_error' in series[0] else [])
        for key in keys:
            errors = [s[key] for s in series]
            order = float(np.min(observed_order(errors)))
            report.constants[key] = errors[0]
            report.constants[key + ' order'] = order
            report.require('{} at base resolution'.format(key), errors[0], '<', self.tolerance['oracle'])
            report.require('{} convergence order'.format(key), order, '>=', self.tolerance['order'])
        report.notes.append('manufactured profile g is a Gaussian centred at T/4 with width T/24, cut at T/2')
        return report
