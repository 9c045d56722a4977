"""
The principal symbol mu_A and the companion symbols lambda_A and q_A.

mu_A(x, xi) is the root with positive imaginary part of
    b mu^2 + (r1 + r2).xi mu + <A' xi, xi> = 0,
written as -(v.xi)/2 + i sqrt(<A' xi, xi>/b - (v.xi)^2/4) with v = (r1 + r2)/b and the
principal square root (nonnegative real part).
"""
import itertools
import logging
import weakref

import numpy as np

from base.base_report import EstimateReport
from utils import SymbolError

from .table import SymbolTable, x_field, xi_field

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10


def _contract(grid, vectors, xi):
    """ sum_i v_i(x) xi_i as a symbol-shaped array. """
    return sum(x_field(grid, v) * xi_field(grid, k) for v, k in zip(vectors, xi))


def quadratic_form(field):
    """ <A'(x) xi, xi> on grid x lattice. """
    grid = field.grid
    xi = grid.lattice.xi
    d = grid.dimension
    return sum(x_field(grid, field.aprime[i, j]) * xi_field(grid, xi[i] * xi[j])
               for i in range(d) for j in range(d))


def quadratic_residual(mu, field):
    """ Relative residual of the defining quadratic at every (x, xi != 0). """
    grid = field.grid
    values = mu.values if isinstance(mu, SymbolTable) else mu
    b = x_field(grid, field.b)
    linear = _contract(grid, field.r1 + field.r2, grid.lattice.xi)
    form = quadratic_form(field)
    residual = b * values ** 2 + linear * values + form
    scale = np.abs(b) * np.abs(values) ** 2 + np.abs(linear * values) + np.abs(form)
    nonzero = xi_field(grid, grid.lattice.nonzero)
    rel = np.zeros(residual.shape)
    mask = np.broadcast_to(nonzero, residual.shape)
    rel[mask] = np.abs(residual[mask]) / scale[mask]
    return rel


def mu_of(field):
    grid = field.grid
    xi = grid.lattice.xi
    b = x_field(grid, field.b)
    v_xi = _contract(grid, field.drift, xi)
    radicand = quadratic_form(field) / b - 0.25 * v_xi ** 2
    values = -0.5 * v_xi + 1j * np.sqrt(radicand)
    values[(Ellipsis,) + grid.lattice.zero_index] = 0.0

    rel = quadratic_residual(values, field)
    if rel.max() > RESIDUAL_TOL:
        raise SymbolError('root residual {:.3e} exceeds {:.0e} for {}'.format(rel.max(), RESIDUAL_TOL, field.name))
    imag = values.imag[np.broadcast_to(xi_field(grid, grid.lattice.nonzero), values.shape)]
    if imag.size and imag.min() <= 0:
        raise SymbolError('Im mu_A vanishes for {}; the principal branch is degenerate'.format(field.name))
    logger.debug('mu_A(%s): max root residual %.3e', field.name, rel.max())
    return SymbolTable(grid, values, degree=1, provenance='mu', name='mu({})'.format(field.name))


def lambda_of(field, mu=None):
    """ lambda_A = b mu_A + r2.xi """
    grid = field.grid
    mu = mu_of(field) if mu is None else mu
    values = x_field(grid, field.b) * mu.values + _contract(grid, field.r2, grid.lattice.xi)
    return SymbolTable(grid, values, degree=1, provenance='lambda', name='lambda({})'.format(field.name))


def q_of(field, mu=None):
    """ q_A = mu_A + v.xi """
    grid = field.grid
    mu = mu_of(field) if mu is None else mu
    values = mu.values + _contract(grid, field.drift, grid.lattice.xi)
    return SymbolTable(grid, values, degree=1, provenance='q', name='q({})'.format(field.name))


def symbol_bounds(table):
    """ (C, C') = (max |sigma|/|xi|, min Im sigma/|xi|) over xi != 0. """
    grid = table.grid
    norm = np.broadcast_to(xi_field(grid, grid.lattice.norm), table.values.shape)
    mask = norm > 0
    ratio = table.values[mask] / norm[mask]
    return float(np.abs(ratio).max()), float(ratio.imag.min())


def check_symbol_bounds(table, field, nu1=None):
    """
    Empirical constants of |sigma| <= C|xi| and Im sigma >= C'|xi|, together with the pointwise
    inequality Re(<A' xi, xi> - (b/4)(v.xi)^2) >= nu1 (|xi|^2 + |v.xi|^2/4).
    """
    if table.degree != 1:
        raise SymbolError('symbol bounds apply to degree-1 symbols, got {}'.format(table.name))
    grid = field.grid
    nu1 = field.ellipticity.nu1 if nu1 is None else nu1
    big_c, small_c = symbol_bounds(table)

    v_xi = _contract(grid, field.drift, grid.lattice.xi)
    lhs = (quadratic_form(field) - 0.25 * x_field(grid, field.b) * v_xi ** 2).real
    rhs = nu1 * (xi_field(grid, grid.lattice.norm ** 2) + 0.25 * np.abs(v_xi) ** 2)
    scale = np.maximum(np.abs(rhs), 1e-300)
    mask = np.broadcast_to(xi_field(grid, grid.lattice.nonzero), lhs.shape)
    margin = float(((lhs - rhs) / scale)[mask].min())

    report = EstimateReport(
        name='symbol-bounds:{}'.format(table.name),
        statement='|sigma| <= C|xi|, Im sigma >= C\'|xi|, Re(<A\'xi,xi> - b(v.xi)^2/4) >= nu1(|xi|^2 + |v.xi|^2/4)',
        grid=grid.describe(),
        constants={'C': big_c, 'C_prime': small_c, 'nu1': nu1, 'min_relative_margin': margin},
        tolerance={'margin': -1e-10},
        notes=['xi = 0 is excluded; sigma(x, 0) = 0 by convention'],
    )
    if table.provenance == 'mu':
        report.constants['root_residual'] = float(quadratic_residual(table, field).max())
        report.require('root residual', report.constants['root_residual'], '<', RESIDUAL_TOL)
    report.require("C'", small_c, '>', 0.0)
    report.require('pointwise ellipticity margin', margin, '>=', -1e-10)
    return report


def symbol_x_gradient(table):
    """ Spectral x-derivatives of x -> sigma(x, xi_k), one table per axis. """
    grid = table.grid
    x_axes = table.x_axes
    coeffs = np.fft.fftn(table.values, axes=x_axes)
    gradient = []
    for axis in range(grid.dimension):
        multiplier = x_field(grid, 1j * grid.lattice.xi[axis])
        values = np.fft.ifftn(multiplier * coeffs, axes=x_axes)
        gradient.append(SymbolTable(grid, values, degree=table.degree,
                                    name='d_x{} {}'.format(axis, table.name)))
    return gradient


def symbol_xi_derivatives(table, order=1):
    """
    All xi-derivatives of total order `order` (<= d + 1), keyed by multi-index.
    Second-order differences on the lattice, one-sided at its edge; values whose stencil
    reaches xi = 0 are NaN because homogeneous symbols are not differentiable there.
    """
    grid = table.grid
    d = grid.dimension
    if not 1 <= order <= d + 1:
        raise SymbolError('xi-derivatives of order {} are unsupported (1 <= order <= {})'.format(order, d + 1))
    step = grid.lattice.spacing
    xi_axes = table.xi_axes
    shifted = np.fft.fftshift(table.values, axes=xi_axes)
    origin = np.zeros(grid.shape, dtype=bool)
    origin[(grid.points // 2,) * d] = True

    out = {}
    for combo in itertools.combinations_with_replacement(range(d), order):
        values, bad = shifted, origin
        for axis in combo:
            values = np.gradient(values, step, axis=d + axis, edge_order=2)
            bad = bad | np.roll(bad, 1, axis=axis) | np.roll(bad, -1, axis=axis)
        values = np.array(values)
        values[np.broadcast_to(xi_field(grid, bad), values.shape)] = np.nan
        multi = tuple(combo.count(axis) for axis in range(d))
        out[multi] = SymbolTable(grid, np.fft.ifftshift(values, axes=xi_axes),
                                 name='d_xi{} {}'.format(multi, table.name))
    return out


_MU_CACHE = weakref.WeakKeyDictionary()


def principal_symbol(field):
    """ mu_of(field), computed once per field. """
    try:
        return _MU_CACHE[field]
    except KeyError:
        mu = _MU_CACHE[field] = mu_of(field)
        return mu
