"""
Square-function estimates for the tagged weights and the bounds on the principal part
U_{A,0}(t) that they rest on.
"""
import numpy as np

from base.base_check import BaseCheck
from grid import l2_norm, laplacian_power, sobolev_norm
from psdo import (check_weight_hypothesis, commutator_u0, gp_apply, square_function, t_xi_weight,
                  time_derivative_weight, time_grid, u0_apply, weight_from_tag)
from symbol import principal_symbol

from .kernel import is_identity

PRINCIPAL_TIMES = np.geomspace(0.01, 1.0, 9)
SQUARE_FUNCTION_TOL = 1e-3
FINITE = 1e6


def zero_mean(f):
    return f - f.mean()


def u0_energy(field, h, mu=None, ratio=2.0 ** 0.125):
    """ int_0^inf ||e^(-t) U_0(t) h||^2_{dot H^1/2} dt / ||h||^2, rectangle rule in log t. """
    mu = principal_symbol(field) if mu is None else mu
    times = time_grid(field.grid, ratio)
    total = sum(np.exp(-2.0 * t) * t * sobolev_norm(u0_apply(field, t, h, mu), 0.5, homogeneous=True) ** 2
                for t in times)
    return float(total * np.log(ratio) / l2_norm(h) ** 2)


class QuadraticEstimateCheck(BaseCheck):
    """
    int_0^inf ||G_p(t) h||^2 dt/t <= C ||h||^2 for every configured weight, evaluated on zero-mean
    ensemble members, together with the time-integrated dot H^1/2 energy of e^(-t) U_0(t).
    """
    name = 'quadratic-estimates'
    statement = ('int_0^inf ||G_p(t) h||^2 dt/t <= C ||h||^2; '
                 'int_0^inf ||e^(-t) U_0(t) h||^2_{dot H^1/2} dt <= C ||h||^2')

    def __init__(self, field, config, ensemble=None, writer=None):
        super().__init__(field, config, ensemble, writer)
        self.weights = list(config['quadratic']['weights'])
        # untagged weights are refused before any work is done
        for tag in self.weights:
            weight_from_tag(tag, field).require_tag('G_p.2')
        self.hypotheses = []

    def _check_resolution(self, field, level):
        mu = principal_symbol(field)
        members = [zero_mean(f) for f in self.ensemble.members(field.grid)]
        members = [f for f in members if l2_norm(f) > self.tolerance['floor']]
        result = {}
        for tag in self.weights:
            weight = weight_from_tag(tag, field)
            if level == 0:
                self.hypotheses.append(check_weight_hypothesis(weight, time_grid(field.grid)))
            ratios = [square_function(weight, field, f)['ratio'] for f in members]
            result['{} max ratio'.format(tag)] = float(np.max(ratios))
            result['{} min ratio'.format(tag)] = float(np.min(ratios))

        result['u0 energy'] = max(u0_energy(field, f, mu) for f in members)
        bump = t_xi_weight(field)
        result['sup G_t|xi|'] = max(l2_norm(gp_apply(bump, field, t, f, mu)) / l2_norm(f)
                                    for t in time_grid(field.grid, ratio=2.0 ** 0.25) for f in members)
        return result

    def _report(self, series):
        base = series[0]
        report = self.new_report(refinement=series,
                                 tolerance={'drift': self.tolerance['drift'], 'square_function': SQUARE_FUNCTION_TOL})
        report.constants.update((key, value) for key, value in base.items() if key != 'points')
        for tag in self.weights:
            values = [s['{} max ratio'.format(tag)] for s in series]
            report.require('{} ratio finite'.format(tag), values[0], '<', FINITE)
            self.require_stable(report, '{} ratio'.format(tag), values)
        energy = [s['u0 energy'] for s in series]
        report.require('u0 energy finite', energy[0], '<', FINITE)
        self.require_stable(report, 'u0 energy', energy)

        if is_identity(self.field):
            if 't-xi' in self.weights:
                deviation = max(max(abs(s['t-xi max ratio'] - 0.25), abs(s['t-xi min ratio'] - 0.25)) for s in series)
                report.constants['t-xi deviation'] = deviation
                report.require('t|xi| ratio equals 1/4', deviation, '<', SQUARE_FUNCTION_TOL)
            report.require('u0 energy at most 1/2', max(energy), '<=', 0.5 + SQUARE_FUNCTION_TOL)
            report.require('sup_t ||G_t|xi|(t)|| at most 1/e', max(s['sup G_t|xi|'] for s in series), '<=',
                           np.exp(-1.0) * (1.0 + 1e-9))

        for hypothesis in self.hypotheses:
            report.constants[hypothesis.name] = hypothesis.constants['sup']
            report.criteria.extend(hypothesis.criteria)
        report.notes.append('members are shifted to zero mean; the time integral is a rectangle rule in log t')
        return report


class PrincipalPartCheck(BaseCheck):
    """
    Bounds on U_{A,0}(t) for 0.01 <= t <= 1: the commutator with the gradient, t^k d^k/dt^k U_0
    for k = 1, 2, the semigroup defect U_0(t + s) - U_0(t) U_0(s) and t U_0(t) (-Delta)^(1/2).
    """
    name = 'principal-part'
    statement = 'sup_t ||[U_0(t), grad] h||, ||t^k U_0^(k)(t) h||, ||t U_0(t) (-Delta)^1/2 h|| <= C ||h||'

    def _check_resolution(self, field, level):
        mu = principal_symbol(field)
        members = self.ensemble.members(field.grid)
        derivatives = {k: time_derivative_weight(field, k) for k in (1, 2)}
        commutator, defect, smoothing = 0.0, 0.0, 0.0
        analytic = {1: 0.0, 2: 0.0}
        for f in members:
            norm = l2_norm(f)
            root = laplacian_power(f, 1.0)
            for t in PRINCIPAL_TIMES:
                parts = commutator_u0(field, t, f, mu)
                commutator = max(commutator, np.sqrt(sum(l2_norm(p) ** 2 for p in parts)) / norm)
                for k, weight in derivatives.items():
                    analytic[k] = max(analytic[k], l2_norm(gp_apply(weight, field, t, f, mu)) / norm)
                smoothing = max(smoothing, t * l2_norm(u0_apply(field, t, root, mu)) / norm)
            for t, s in zip(PRINCIPAL_TIMES[:-1], PRINCIPAL_TIMES[1:]):
                composed = u0_apply(field, t, u0_apply(field, s, f, mu), mu)
                gap = u0_apply(field, t + s, f, mu) - composed
                defect = max(defect, l2_norm(gap) / norm)
        return {'commutator': commutator, 'analyticity k=1': analytic[1], 'analyticity k=2': analytic[2],
                'semigroup defect': defect, 'smoothing': smoothing}

    def _report(self, series):
        base = series[0]
        report = self.new_report(refinement=series, samples=PRINCIPAL_TIMES.tolist(),
                                 tolerance={'drift': self.tolerance['drift'], 'floor': self.tolerance['floor']})
        report.constants.update((key, value) for key, value in base.items() if key != 'points')
        for key in ('analyticity k=1', 'analyticity k=2', 'smoothing'):
            values = [s[key] for s in series]
            report.require('{} finite'.format(key), values[0], '<', FINITE)
            self.require_stable(report, key, values)
        if self.field.is_constant:
            for key in ('commutator', 'semigroup defect'):
                report.require('{} vanishes'.format(key), max(s[key] for s in series), '<', self.tolerance['floor'])
        else:
            for key in ('commutator', 'semigroup defect'):
                values = [s[key] for s in series]
                report.require('{} finite'.format(key), values[0], '<', FINITE)
                self.require_stable(report, key, values)
        return report
