"""
The Dirichlet-to-Neumann map: trace formula against the sesquilinear form, the Green identity
between A and A*, and the adjoint relation Q_A = M_{1/b} (M_{conj b} P_{A*})*.
"""
import numpy as np

from base.base_check import BaseCheck
from coeff import adjoint
from grid import inner, sobolev_norm
from solver import dn_apply, dn_weak, poisson_apply, q_apply


def _is_hermitian(field):
    return bool(np.allclose(field.entries, np.conj(np.swapaxes(field.entries, 0, 1)), atol=1e-12))


class DNConsistencyCheck(BaseCheck):
    name = 'dn-consistency'
    statement = '<Lambda_A f, g> (conormal trace) = <A grad E_A f, grad E_A g> (form)'

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        gaps, imaginary = [], []
        for f, g in self.ensemble.pairs(field.grid):
            u, v = strip.solve_dirichlet(f), strip.solve_dirichlet(g)
            weak = dn_weak(strip, f, g, solutions=(u, v))
            trace = inner(dn_apply(strip, f, solution=u), g)
            gaps.append(abs(trace - weak) / (sobolev_norm(f, 0.5) * sobolev_norm(g, 0.5)))
            energy = dn_weak(strip, f, f, solutions=(u, u))
            imaginary.append(abs(energy.imag) / max(abs(energy), 1e-300))
        return {'median_gap': float(np.median(gaps)), 'max_gap': float(np.max(gaps)),
                'max_relative_imaginary_energy': float(np.max(imaginary))}

    def _report(self, series):
        medians = [s['median_gap'] for s in series]
        report = self.new_report(refinement=series, samples=medians,
                                 tolerance={'identity': self.tolerance['identity'],
                                            'halving': self.tolerance['halving']})
        report.constants.update(median_gap=medians[0])
        report.require('median gap at base resolution', medians[0], '<', self.tolerance['identity'])
        self.require_halving(report, 'median gap', medians, floor=self.tolerance['rounding'])
        if _is_hermitian(self.field):
            energy = series[-1]['max_relative_imaginary_energy']
            report.constants['max_relative_imaginary_energy'] = energy
            report.require('Hermitian energy is real', energy, '<', self.tolerance['identity'])
        report.notes.append('gaps are normalized by ||f||_{H^1/2} ||g||_{H^1/2}')
        return report


class GreenIdentityCheck(BaseCheck):
    name = 'green-identity'
    statement = 'form_A(f, g) = conj(form_{A*}(g, f))'

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        strip_adjoint = self.strip(adjoint(field), level)
        gaps = []
        for f, g in self.ensemble.pairs(field.grid):
            forward = dn_weak(strip, f, g)
            backward = np.conj(dn_weak(strip_adjoint, g, f))
            gaps.append(abs(forward - backward) / (sobolev_norm(f, 0.5) * sobolev_norm(g, 0.5)))
        return {'median_gap': float(np.median(gaps)), 'max_gap': float(np.max(gaps))}

    def _report(self, series):
        medians = [s['median_gap'] for s in series]
        report = self.new_report(refinement=series, samples=medians,
                                 tolerance={'identity': self.tolerance['identity'],
                                            'halving': self.tolerance['halving']})
        report.constants.update(median_gap=medians[0])
        report.require('median gap at base resolution', medians[0], '<', self.tolerance['identity'])
        self.require_halving(report, 'median gap', medians, floor=self.tolerance['rounding'])
        return report


class AdjointRelationCheck(BaseCheck):
    name = 'adjoint-relation'
    statement = '<b Q_A f, g> = <f, conj(b) P_{A*} g>'

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        strip_adjoint = self.strip(adjoint(field), level)
        gaps = []
        for f, g in self.ensemble.pairs(field.grid):
            left = inner(q_apply(strip, f) * field.b, g)
            right = inner(f, poisson_apply(strip_adjoint, g) * np.conj(field.b))
            gaps.append(abs(left - right) / (sobolev_norm(f, 1.0) * sobolev_norm(g, 1.0)))
        return {'median_gap': float(np.median(gaps)), 'max_gap': float(np.max(gaps))}

    def _report(self, series):
        medians = [s['median_gap'] for s in series]
        report = self.new_report(refinement=series, samples=medians,
                                 tolerance={'identity': self.tolerance['identity'],
                                            'halving': self.tolerance['halving']})
        report.constants.update(median_gap=medians[0])
        report.require('median gap at base resolution', medians[0], '<', self.tolerance['identity'])
        self.require_halving(report, 'median gap', medians, floor=self.tolerance['rounding'])
        report.notes.append('P_{A*} comes from an independent strip solve with the adjoint field')
        return report
