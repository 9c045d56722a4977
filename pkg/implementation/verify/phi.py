"""
Closure of the symbol class under A -> lambda_A, q_A: the matrices M and N of coeff.closure have
principal symbols lambda_A and q_A. The sectoriality of J_A = -i lambda_A(., D) - M_b S_{A,1},
which equals Lambda_A, is recorded from the assembled matrices.
"""
import numpy as np
from scipy import linalg

from base.base_check import BaseCheck
from coeff import phi_closure_matrices
from grid import TorusGrid
from psdo import quantization_matrix
from solver import MATRIX_NODES, assemble_operator_matrices
from symbol import check_symbol_bounds, lambda_of, mu_of, q_of, xi_field
from utils import EllipticityError, SymbolError

from .semigroup import sector


def closure_residual(table, target):
    """ max over xi != 0 of |table - target| / |target|. """
    grid = target.grid
    mask = np.broadcast_to(xi_field(grid, grid.lattice.nonzero), target.values.shape)
    scale = np.maximum(np.abs(target.values[mask]), 1e-300)
    return float((np.abs(table.values[mask] - target.values[mask]) / scale).max())


class PhiClosureCheck(BaseCheck):
    name = 'phi-closure'
    statement = 'mu(M) = lambda_A, mu(N) = q_A; J_A = -i lambda_A(., D) - b S_{A,1} is sectorial'
    refines = False

    def _check_resolution(self, field, level):
        mu = mu_of(field)
        result = {'lambda_residual': float('nan'), 'q_residual': float('nan')}
        try:
            closure_m, closure_n = phi_closure_matrices(field)
            result['lambda_residual'] = closure_residual(mu_of(closure_m), lambda_of(field, mu))
            result['q_residual'] = closure_residual(mu_of(closure_n), q_of(field, mu))
            result['closure_ellipticity'] = {'M': list(closure_m.ellipticity), 'N': list(closure_n.ellipticity)}
        except (EllipticityError, SymbolError) as err:
            self.logger.warning('closure matrices rejected: %s', err)
            result['closure_error'] = str(err)

        self.bounds = check_symbol_bounds(mu, field)
        result.update(('symbol_' + key, value) for key, value in self.bounds.constants.items())

        operator_field = self._matrix_field(field)
        if operator_field is None:
            result['operator_note'] = 'grid too large for dense operator matrices'
            return result
        strip = self.strip(operator_field, level)
        mu = mu_of(operator_field)
        matrices = assemble_operator_matrices(strip, ('P', 'Lambda'))
        principal = -1j * quantization_matrix(lambda_of(operator_field, mu))
        b = operator_field.b.ravel()[:, None]
        # -i lambda_A(., D) = -i b mu_A(., D) - r2.grad, the gradient by the scheme's central differences
        drift = sum(operator_field.r2[i].ravel()[:, None] * strip.central[i].toarray()
                    for i in range(operator_field.grid.dimension))
        remainder = -matrices['P'].matrix - 1j * quantization_matrix(mu)
        j_matrix = -1j * b * quantization_matrix(mu) - drift - b * remainder

        dn = matrices['Lambda'].matrix
        result['j_gap'] = float(np.linalg.norm(j_matrix - dn, 2) / np.linalg.norm(dn, 2))
        result['j_sector_degrees'], result['j_min_real'] = sector(linalg.eigvals(j_matrix))
        result['principal_sector_degrees'], _ = sector(linalg.eigvals(principal))
        result['operator_points'] = operator_field.grid.points
        return result

    def _matrix_field(self, field):
        grid = field.grid
        if grid.size <= MATRIX_NODES:
            return field
        if field.sampler is None:
            return None
        points = int(MATRIX_NODES ** (1.0 / grid.dimension)) // 2 * 2
        return field.with_grid(TorusGrid(grid.dimension, grid.period, points))

    def _report(self, series):
        base = series[0]
        closure = self.tolerance['closure']
        report = self.new_report(refinement=series,
                                 tolerance={'closure': closure, 'sector_degrees': self.tolerance['sector_degrees'],
                                            'identity': self.tolerance['identity']})
        report.constants.update((key, value) for key, value in base.items() if key != 'points')
        if 'closure_error' in base:
            report.require('closure matrices elliptic', 0.0, '>', 0.5)
        report.require('mu(M) = lambda_A', base['lambda_residual'], '<', closure)
        report.require('mu(N) = q_A', base['q_residual'], '<', closure)
        report.criteria.extend(self.bounds.criteria)
        if 'j_gap' in base:
            report.require('J_A against Lambda_A', base['j_gap'], '<', self.tolerance['identity'])
            report.require('J_A spectrum sector', base['j_sector_degrees'], '<=', self.tolerance['sector_degrees'])
            report.notes.append('the sector of -i lambda_A(., D) alone is reported, not asserted')
        else:
            report.notes.append(base['operator_note'])
        return report
