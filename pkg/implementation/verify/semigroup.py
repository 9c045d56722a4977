"""
The semigroup e^{-t Lambda_A} generated by the assembled DN matrix, and the spectra of the
nodal Lambda_A and P_A matrices.
"""
import numpy as np
from scipy import linalg

from base.base_check import BaseCheck
from grid import GridFunction, TorusGrid, l2_norm, sobolev_norm
from solver import MATRIX_NODES, assemble_operator_matrices

ORDERS = (0.0, 0.5, 1.0)


def sector(eigenvalues):
    """
    Largest |arg z| in degrees and smallest Re z / max |z| over the spectrum with the eigenvalue
    of smallest modulus (the constant mode) removed.
    """
    z = np.asarray(eigenvalues)
    z = np.delete(z, np.argmin(np.abs(z)))
    scale = max(np.abs(z).max(), 1e-300)
    return float(np.degrees(np.abs(np.angle(z)).max())), float(z.real.min() / scale)


class DNSemigroupCheck(BaseCheck):
    name = 'dn-semigroup'
    statement = 'e^{-t Lambda_A} is bounded on H^s and analytic; spectra of Lambda_A, P_A lie in a sector'

    def __init__(self, field, config, ensemble=None, writer=None):
        cfg = config['semigroup']
        grid = field.grid
        points = min(int(cfg['points'] or grid.points), int(MATRIX_NODES ** (1.0 / grid.dimension)) // 2 * 2)
        if points != grid.points:
            field = field.with_grid(TorusGrid(grid.dimension, grid.period, points))
        super().__init__(field, config, ensemble, writer)
        self.times = [float(t) for t in cfg['times']]
        while self.levels > 1 and (points * 2 ** (self.levels - 1)) ** grid.dimension > MATRIX_NODES:
            self.levels -= 1
            self.logger.warning('dense DN matrices limit the refinement series to %d level(s)', self.levels)

    def _check_resolution(self, field, level):
        strip = self.strip(field, level)
        matrices = assemble_operator_matrices(strip, ('P', 'Lambda'))
        dn = matrices['Lambda'].matrix
        members = self.ensemble.members(field.grid)
        propagators = {t: linalg.expm(-t * dn) for t in self.times}

        invariance = {s: 0.0 for s in ORDERS}
        analytic = 0.0
        for t, propagator in propagators.items():
            for f in members:
                u = GridFunction(field.grid, propagator @ f.values.ravel())
                for s in ORDERS:
                    invariance[s] = max(invariance[s], sobolev_norm(u, s) / sobolev_norm(f, s))
                rate = GridFunction(field.grid, t * (dn @ u.values.ravel()))
                analytic = max(analytic, l2_norm(rate) / l2_norm(f))

        defect = 0.0
        for t, s in zip(self.times[:-1], self.times[1:]):
            combined = linalg.expm(-(t + s) * dn)
            gap = np.linalg.norm(combined - propagators[t] @ propagators[s], 2)
            defect = max(defect, gap / max(np.linalg.norm(combined, 2), 1.0))

        domain = []
        for f in members:
            image = matrices['Lambda'].apply(f)
            domain.append((sobolev_norm(image, 1.0) + sobolev_norm(f, 1.0)) / sobolev_norm(f, 2.0))

        result = {'semigroup_defect': defect, 'analyticity': analytic,
                  'domain_min': float(np.min(domain)), 'domain_max': float(np.max(domain))}
        result.update(('invariance_s{:g}'.format(s), value) for s, value in invariance.items())
        for label, operator in matrices.items():
            eigenvalues = operator.eigenvalues()
            angle, real = sector(eigenvalues)
            result['{}_sector_degrees'.format(label)] = angle
            result['{}_min_real'.format(label)] = real
            result['{}_max_imag_ratio'.format(label)] = float(np.abs(eigenvalues.imag).max()
                                                             / max(np.abs(eigenvalues).max(), 1e-300))
        return result

    def _report(self, series):
        base = series[0]
        limit = self.tolerance['sector_degrees']
        low, high = self.tolerance['ratio_bounds']
        report = self.new_report(refinement=series, samples=self.times,
                                 tolerance={'sector_degrees': limit,
                                            'semigroup_defect': self.tolerance['semigroup_defect'],
                                            'drift': self.tolerance['drift'], 'ratio_bounds': [low, high]})
        report.constants.update((key, value) for key, value in base.items() if key != 'points')
        for label in ('Lambda', 'P'):
            report.require('{} spectrum sector'.format(label), base['{}_sector_degrees'.format(label)], '<=', limit)
            report.require('{} spectrum in right half-plane'.format(label), base['{}_min_real'.format(label)],
                           '>=', -self.tolerance['floor'])
        report.require('semigroup defect', max(s['semigroup_defect'] for s in series), '<',
                       self.tolerance['semigroup_defect'])
        for s in ORDERS:
            values = [r['invariance_s{:g}'.format(s)] for r in series]
            report.require('H^{:g} invariance bounded'.format(s), values[0], '<', 1e3)
            self.require_stable(report, 'H^{:g} invariance'.format(s), values)
        analytic = [r['analyticity'] for r in series]
        report.require('analyticity proxy bounded', analytic[0], '<', 1e3)
        self.require_stable(report, 'analyticity proxy', analytic)
        report.require('D(Lambda) ratio min', min(r['domain_min'] for r in series), 'in', [low, high])
        report.require('D(Lambda) ratio max', max(r['domain_max'] for r in series), 'in', [low, high])
        self.require_stable(report, 'D(Lambda) ratio max', [r['domain_max'] for r in series])
        if np.allclose(self.field.entries, np.conj(np.swapaxes(self.field.entries, 0, 1)), atol=1e-12):
            report.require('Hermitian spectrum real', base['Lambda_max_imag_ratio'], '<', self.tolerance['identity'])
        report.notes.append('H^infinity calculus is not assessed; sector and analyticity proxies only')
        return report
