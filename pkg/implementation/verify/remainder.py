"""
Lower-order behaviour of the remainders S_{A,1} = -P_A - i mu_A(., D) and
U_{A,1}(t) = E_A - chi(t) U_{A,0}(t).

The principal part is taken from the frozen-coefficient symbols of the scheme (SchemeSymbol)
rather than from mu_A itself: high modes then carry no discretization error of the principal
symbol, every swept mode is measured at every resolution, and S vanishes for constant fields
up to rounding. The gap |mu_h - mu_A| / |mu_A| is reported per mode.
"""
import numpy as np

from base.base_check import BaseCheck
from grid import GridFunction, l2_norm, sobolev_norm
from solver import SchemeSymbol, poisson_apply, s1_apply, s1_cross_check, strip_gradient_norm, u1_compute
from symbol import principal_symbol
from utils import loglog_slope, observed_order

from .ensembles import ModeEnsemble, dyadic_modes, even_modes

SOBOLEV_ORDERS = (0.25, 0.5, 0.75)
EPSILONS = (0.25, 0.5)


class _RemainderCheck(BaseCheck):
    """ Shared setup: a mode sweep fixed by the base grid and the vanishing test for constant fields. """
    def __init__(self, field, config, ensemble=None, writer=None, modes=None):
        super().__init__(field, config, ensemble, writer)
        self.modes = list(modes) if modes is not None else dyadic_modes(field.grid.points)
        self.sweep = ModeEnsemble(field.grid.dimension, self.modes)

    def scheme(self, field, strip):
        """ The scheme's symbols on this strip with their per-mode diagnostics. """
        scheme = SchemeSymbol(strip)
        return scheme, {'root_modulus': scheme.root_modulus(self.modes),
                        'symbol_gap': scheme.relative_gap(principal_symbol(field), self.modes)}

    def require_decaying_roots(self, report, series):
        """ Every swept mode must have a decaying discrete extension at every resolution. """
        worst = [max(s['root_modulus']) for s in series]
        report.constants['root_modulus'] = series[0]['root_modulus']
        report.constants['symbol_gap'] = series[-1]['symbol_gap']
        report.require('discrete extension decays on every swept mode', max(worst), '<', 1.0)

    def require_vanishing(self, report, label, values):
        """ Constant fields: the quantity is zero up to rounding or converges at second order. """
        zero = self.tolerance['constant_zero']
        if values[-1] < zero or len(values) < 2:
            report.require('{} vanishes'.format(label), values[-1], '<', zero)
            return
        orders = observed_order(values)
        report.constants['{} order'.format(label)] = float(np.min(orders))
        report.require('{} convergence order'.format(label), float(np.min(orders)), '>=', self.tolerance['order'])


class ModeSweepCheck(_RemainderCheck):
    """ ||S_{A,1} e^{ikx}|| stays bounded while ||P_A e^{ikx}|| grows linearly in k. """
    name = 'remainder-mode-sweep'
    statement = '||S_{A,1} e^{ikx}|| = O(1), ||P_A e^{ikx}|| ~ k'

    def __init__(self, field, config, ensemble=None, writer=None, modes=None):
        modes = even_modes(field.grid.points) if modes is None else modes
        super().__init__(field, config, ensemble, writer, modes)

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        scheme, result = self.scheme(field, strip)
        s_norms, p_norms = [], []
        for h in self.sweep.members(field.grid):
            solution = strip.solve_dirichlet(h)
            norm = l2_norm(h)
            s_norms.append(l2_norm(s1_apply(strip, h, scheme.trace, check=False, solution=solution)) / norm)
            p_norms.append(l2_norm(poisson_apply(strip, h, solution)) / norm)
        result.update(s_norms=s_norms, p_norms=p_norms)
        return result

    def _report(self, series):
        finest = series[-1]
        report = self.new_report(refinement=series, samples=self.modes,
                                 tolerance={'kendall': self.tolerance['kendall'], 'p_slope': [0.9, 1.1]})
        self.require_decaying_roots(report, series)
        report.constants.update(s_norms=finest['s_norms'], p_norms=finest['p_norms'])

        fit = [k for k in self.modes if k >= 4] if sum(k >= 4 for k in self.modes) >= 2 else self.modes
        p_slope = loglog_slope(fit, [finest['p_norms'][self.modes.index(k)] for k in fit])
        report.constants['p_slope'] = p_slope
        report.require('P_A slope', p_slope, 'in', [0.9, 1.1])

        if self.field.is_constant:
            self.require_vanishing(report, 'S norm', [max(s['s_norms']) for s in series])
        else:
            self.require_no_growth(report, 'S norm', self.modes, finest['s_norms'])
        return report


class RemainderBoundsCheck(_RemainderCheck):
    name = 'remainder-bounds'
    statement = '||S_{A,1} h||_{H^s} <= C ||h||_{H^s}, ||S_{A,1} h||_{H^1} <= C ||h||_{H^(1+eps)}'

    def _labels(self):
        return (['H^{:g}'.format(s) for s in SOBOLEV_ORDERS]
                + ['H^1 / H^{:g}'.format(1 + eps) for eps in EPSILONS])

    def _ratios(self, remainder, h):
        out = [sobolev_norm(remainder, s) / sobolev_norm(h, s) for s in SOBOLEV_ORDERS]
        out += [sobolev_norm(remainder, 1.0) / sobolev_norm(h, 1.0 + eps) for eps in EPSILONS]
        return out

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        scheme, result = self.scheme(field, strip)
        sup = np.zeros(len(self._labels()))
        for h in self.ensemble.members(field.grid):
            sup = np.maximum(sup, self._ratios(s1_apply(strip, h, scheme.trace, check=False), h))
        modes = []
        for h in self.sweep.members(field.grid):
            modes.append(self._ratios(s1_apply(strip, h, scheme.trace, check=False), h))
            sup = np.maximum(sup, modes[-1])
        result.update(('sup {}'.format(label), float(value)) for label, value in zip(self._labels(), sup))
        result['mode_ratios'] = modes
        return result

    def _report(self, series):
        report = self.new_report(refinement=series, samples=self.modes,
                                 tolerance={'drift': self.tolerance['drift'], 'kendall': self.tolerance['kendall'],
                                            'constant_zero': self.tolerance['constant_zero']})
        self.require_decaying_roots(report, series)
        finest = series[-1]['mode_ratios']
        for i, label in enumerate(self._labels()):
            values = [s['sup {}'.format(label)] for s in series]
            report.constants['sup {}'.format(label)] = values[0]
            if self.field.is_constant:
                self.require_vanishing(report, label, values)
                continue
            report.require('sup {} finite'.format(label), values[0], '<', 1e6)
            self.require_stable(report, 'sup {}'.format(label), values)
            self.require_no_growth(report, label, self.modes, [ratios[i] for ratios in finest])
        return report


class U1EstimateCheck(_RemainderCheck):
    """
    ||grad U_{A,1} h||_{L2(strip)} against ||(I - Delta)^(-1/4) h|| and
    sup_t ||d/dt U_{A,1}(t) h||_{H^1/2} against ||h||_{H^1/2}.
    """
    name = 'u1-estimate'
    statement = '||grad U_{A,1} h|| <= C ||h||_{H^-1/2}, sup_t ||d/dt U_{A,1}(t) h||_{H^1/2} <= C ||h||_{H^1/2}'

    def _constants(self, strip, h, mu):
        remainder = u1_compute(strip, h, mu=mu)
        gradient = strip_gradient_norm(remainder) / sobolev_norm(h, -0.5)
        rate = np.gradient(remainder.values, strip.dt, axis=0, edge_order=2)
        sup_rate = max(sobolev_norm(GridFunction(h.grid, level), 0.5) for level in rate) / sobolev_norm(h, 0.5)
        return gradient, sup_rate

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        scheme, result = self.scheme(field, strip)
        mu = scheme.propagation
        gradient, rate = 0.0, 0.0
        for h in self.ensemble.members(field.grid):
            c1, c2 = self._constants(strip, h, mu)
            gradient, rate = max(gradient, c1), max(rate, c2)
        mode_gradient = []
        for h in self.sweep.members(field.grid):
            c1, c2 = self._constants(strip, h, mu)
            mode_gradient.append(c1)
            gradient, rate = max(gradient, c1), max(rate, c2)
        lowest = self.sweep.member(field.grid, 0)
        result.update(gradient_constant=gradient, rate_constant=rate, mode_gradient=mode_gradient,
                      s1_cross_check_gap=s1_cross_check(strip, lowest, scheme.trace))
        return result

    def _report(self, series):
        gradient = [s['gradient_constant'] for s in series]
        rate = [s['rate_constant'] for s in series]
        report = self.new_report(refinement=series, samples=self.modes,
                                 tolerance={'drift': self.tolerance['drift'], 'kendall': self.tolerance['kendall']},
                                 cutoff='chi = 1 on [0, 1], 0 on [2, inf), exp(-1/s) transition')
        self.require_decaying_roots(report, series)
        report.constants.update(gradient_constant=gradient[0], rate_constant=rate[0],
                                s1_cross_check_gap=series[0]['s1_cross_check_gap'])
        report.require('gradient constant finite', gradient[0], '<', 1e6)
        report.require('rate constant finite', rate[0], '<', 1e6)
        self.require_stable(report, 'gradient constant', gradient)
        self.require_stable(report, 'rate constant', rate)
        self.require_no_growth(report, 'gradient constant', self.modes, series[-1]['mode_gradient'])
        return report
