"""
Boundary operators extracted from the strip oracle: P_A, Lambda_A, Q_A, A', the remainder
U_{A,1} and S_{A,1}. x-derivatives in P_A, Lambda_A and Q_A are the central differences of the
scheme, so the discrete relations between them hold up to the rounding of the solves.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from grid import GridFunction, derivative, l2_norm
from psdo import quantize, u0_apply
from symbol import principal_symbol
from utils import GridError, smooth_cutoff

from .strip import StripSolution, assemble_aprime

logger = logging.getLogger(__name__)

MATRIX_NODES = 512
CROSS_CHECK_RTOL = 0.05


def solve_dirichlet(strip, f):
    return strip.solve_dirichlet(f)


def solve_inhomogeneous(strip, source):
    return strip.solve_inhomogeneous(source)


def _drift_out(strip, values):
    """ sum_i r2_i D_i f on flattened values """
    field = strip.field
    return sum(field.r2[i].reshape((-1,) + (1,) * (values.ndim - 1)) * (strip.central[i] @ values)
               for i in range(strip.grid.dimension))


def _drift_in(strip, values):
    """ sum_i D_i (r1_i f) on flattened values """
    field = strip.field
    return sum(strip.central[i] @ (field.r1[i].reshape((-1,) + (1,) * (values.ndim - 1)) * values)
               for i in range(strip.grid.dimension))


def _flat_b(strip, ndim=1):
    return strip.field.b.reshape((-1,) + (1,) * (ndim - 1))


def dn_apply(strip, f, solution=None):
    """ Lambda_A f = b P_A f - r2.grad f, the conormal derivative of E_A f at t = 0. """
    solution = strip.solve_dirichlet(f) if solution is None else solution
    return strip.conormal_trace(solution)


def poisson_apply(strip, f, solution=None):
    """ P_A f = -d/dt E_A f at t = 0, recovered as (Lambda_A f + r2.grad f) / b. """
    dn = dn_apply(strip, f, solution).values.ravel()
    values = (dn + _drift_out(strip, f.values.ravel())) / _flat_b(strip)
    return GridFunction(f.grid, values.reshape(f.grid.shape))


def q_apply(strip, f, solution=None):
    """ Q_A f = (Lambda_A f - div(r1 f)) / b """
    dn = dn_apply(strip, f, solution).values.ravel()
    values = (dn - _drift_in(strip, f.values.ravel())) / _flat_b(strip)
    return GridFunction(f.grid, values.reshape(f.grid.shape))


def aprime_apply(field, f):
    """ A' f = -div_x(A' grad_x f) with the strip's conservative stencil. """
    field.grid.require_same(f.grid)
    return GridFunction(f.grid, (assemble_aprime(field) @ f.values.ravel()).reshape(f.grid.shape))


def strip_gradient(solution):
    """ (grad_x u, d_t u) on every level: spectral in x, second order in t. """
    grid = solution.grid
    x_axes = tuple(range(1, grid.dimension + 1))
    spectral = np.fft.fftn(solution.values, axes=x_axes)
    parts = []
    for axis in range(grid.dimension):
        factor = 1j * grid.lattice.xi[axis]
        parts.append(np.fft.ifftn(factor * spectral, axes=x_axes))
    parts.append(np.gradient(solution.values, solution.dt, axis=0, edge_order=2))
    return parts


def strip_integral(solution, density):
    """ int_0^T int_torus density, trapezoidal in t. """
    per_level = solution.grid.cell_volume * density.reshape(density.shape[0], -1).sum(axis=1)
    return integrate.trapezoid(per_level, dx=solution.dt)


def strip_gradient_norm(solution):
    parts = strip_gradient(solution)
    density = sum(np.abs(part) ** 2 for part in parts)
    return float(np.sqrt(strip_integral(solution, density).real))


def dn_weak(strip, f, g, solutions=None):
    """ <Lambda_A f, g> = int_strip <A grad E_A f, grad E_A g>, evaluated as the scheme's form a_h. """
    u, v = solutions if solutions is not None else (strip.solve_dirichlet(f), strip.solve_dirichlet(g))
    return strip.energy_form(u, v)


@dataclass
class OperatorMatrix:
    """ Dense nodal realization of a boundary operator: column j is the operator applied to e_j. """
    grid: object
    matrix: np.ndarray
    label: str

    def apply(self, f):
        self.grid.require_same(f.grid)
        return GridFunction(self.grid, (self.matrix @ f.values.ravel()).reshape(self.grid.shape))

    def eigenvalues(self):
        from scipy import linalg
        return linalg.eigvals(self.matrix)


def assemble_operator_matrices(strip, which=('P', 'Lambda', 'Q')):
    """ Nodal matrices of P_A, Lambda_A and Q_A from one batch of strip solves. """
    grid = strip.grid
    if grid.size > MATRIX_NODES:
        raise GridError('operator matrices need N^d <= {}, got {}'.format(MATRIX_NODES, grid.size))
    identity = np.eye(grid.size, dtype=complex)
    levels = strip.trace_levels(identity)
    dn = strip.conormal(levels[0], levels[1])
    b = _flat_b(strip, 2)
    built = {'Lambda': dn, 'P': (dn + _drift_out(strip, identity)) / b, 'Q': (dn - _drift_in(strip, identity)) / b}
    return {label: OperatorMatrix(grid, np.asarray(built[label]), label) for label in which}


def assemble_operator_matrix(strip, which='P'):
    if which not in ('P', 'Lambda', 'Q'):
        raise ValueError('unknown operator {!r}'.format(which))
    return assemble_operator_matrices(strip, (which,))[which]


def u1_compute(strip, h, times=None, mu=None):
    """
    U_{A,1}(t) h = E_A h - chi(t) U_{A,0}(t) h. chi vanishes from t = 2 on, so the principal
    part is only evaluated below that. With `times`, the nearest levels are returned.
    """
    mu = principal_symbol(strip.field) if mu is None else mu
    extension = strip.solve_dirichlet(h)
    values = np.array(extension.values)
    chi = smooth_cutoff(strip.times)
    for n in np.flatnonzero(chi > 0):
        values[n] = values[n] - chi[n] * u0_apply(strip.field, strip.times[n], h, mu).values
    solution = StripSolution(strip.grid, strip.times, values, {'kind': 'remainder', 'cutoff': 'exp(-1/s) bump'},
                             extension.residual, extension.condition)
    return solution if times is None else solution.restrict(times)


def s1_apply(strip, h, mu=None, check=True, solution=None):
    """
    S_{A,1} h = -P_A h - i mu_A(., D) h. With `check`, the result is compared with the one-sided
    d/dt U_{A,1}(t) h at t = 0 and a mismatch is logged.
    """
    remainder, gap = _s1_with_gap(strip, h, mu, solution)
    if check and gap > CROSS_CHECK_RTOL:
        logger.warning('S_A,1 cross-check mismatch: relative gap %.3e against d/dt U_A,1 at t = 0', gap)
    return remainder


def s1_cross_check(strip, h, mu=None, solution=None):
    """ Relative gap between S_{A,1} h and d/dt U_{A,1} h at t = 0, normalized by max(||P_A h||, ||h||). """
    return _s1_with_gap(strip, h, mu, solution)[1]


def _s1_with_gap(strip, h, mu, solution=None):
    mu = principal_symbol(strip.field) if mu is None else mu
    extension = strip.solve_dirichlet(h) if solution is None else solution
    poisson = poisson_apply(strip, h, extension)
    remainder = -poisson - quantize(mu, h) * 1j
    early = [extension.values[n] - smooth_cutoff(strip.times[n]) * u0_apply(strip.field, strip.times[n], h, mu).values
             for n in range(3)]
    slope = (-3.0 * early[0] + 4.0 * early[1] - early[2]) / (2.0 * strip.dt)
    scale = max(l2_norm(poisson), l2_norm(h), 1e-300)
    return remainder, l2_norm(GridFunction(h.grid, slope) - remainder) / scale


def separable_source(field, f, g, dg, d2g, times):
    """
    A(f g) for u(x, t) = f(x) g(t) with spectral x-derivatives:

        -[g sum_i d_i(sum_j a_ij d_j f) + g' sum_i d_i(r1_i f)] - [g' sum_j r2_j d_j f + b f g'']
    """
    grid = field.grid
    d = grid.dimension
    times = np.asarray(times, dtype=float)
    grad_f = [derivative(f, j).values for j in range(d)]
    flux = sum(derivative(GridFunction(grid, sum(field.aprime[i, j] * grad_f[j] for j in range(d))), i).values
               for i in range(d))
    drift_in = sum(derivative(GridFunction(grid, field.r1[i] * f.values), i).values for i in range(d))
    drift_out = sum(field.r2[j] * grad_f[j] for j in range(d))
    shape = (-1,) + (1,) * d
    g, dg, d2g = (np.asarray(fn(times)).reshape(shape) for fn in (g, dg, d2g))
    return -(g * flux + dg * drift_in) - (dg * drift_out + d2g * field.b * f.values)


def strip_norm(solution):
    """ L2 norm over the strip, trapezoidal in t. """
    return float(np.sqrt(strip_integral(solution, np.abs(solution.values) ** 2).real))
