"""
Left (Kohn-Nirenberg) quantization on the torus,

    (sigma(., D) f)(x_m) = N^(-d/2) sum_k sigma(x_m, xi_k) f_hat_k exp(i x_m . xi_k),

and the operators built from it: U_0(t), G_p(t), their commutator with the gradient and the
square function of G_p.
"""
import logging
from functools import lru_cache

import numpy as np
from tqdm import tqdm

from grid import GridFunction, derivative, from_spectral, has_zero_mean, l2_norm
from symbol import SymbolTable, principal_symbol, symbol_bounds
from utils import GridMismatchError, ZeroModeError

logger = logging.getLogger(__name__)

# dense phase matrices are cached up to this many nodes; larger grids are processed in row blocks
CACHE_NODES = 1024
BLOCK_ENTRIES = 1 << 22


def _integer_nodes(grid):
    m = np.meshgrid(*([np.arange(grid.points)] * grid.dimension), indexing='ij')
    return np.stack([a.ravel() for a in m], axis=1)


def _integer_wavenumbers(grid):
    k = np.meshgrid(*([np.fft.fftfreq(grid.points, d=1.0 / grid.points).astype(int)] * grid.dimension),
                    indexing='ij')
    return np.stack([a.ravel() for a in k], axis=1)


def _phases(grid, rows):
    """ exp(i x_m . xi_k) = exp(2 pi i (m . k mod N) / N) for the given node rows. """
    products = np.mod(_integer_nodes(grid)[rows] @ _integer_wavenumbers(grid).T, grid.points)
    return np.exp(2j * np.pi * products / grid.points)


@lru_cache(maxsize=8)
def _phase_matrix(grid):
    return _phases(grid, slice(None))


def synthesize(grid, weights, coeffs):
    """
    N^(-d/2) sum_k w(x_m, xi_k) c_k exp(i x_m . xi_k) for weights of shape (*x, *xi).
    Weights without x-dependence (leading axes of length 1) reduce to a Fourier multiplier.
    """
    d = grid.dimension
    weights = np.asarray(weights)
    if weights.shape[:d] == (1,) * d:
        return from_spectral(grid, weights.reshape(grid.shape) * coeffs)
    size = grid.size
    w = np.broadcast_to(weights, grid.shape + grid.shape).reshape(size, size)
    c = np.asarray(coeffs).reshape(size)
    if size <= CACHE_NODES:
        out = (w * _phase_matrix(grid)) @ c
    else:
        out = np.empty(size, dtype=complex)
        step = max(1, BLOCK_ENTRIES // size)
        for start in range(0, size, step):
            rows = slice(start, min(start + step, size))
            out[rows] = (w[rows] * _phases(grid, rows)) @ c
    return GridFunction(grid, out / np.sqrt(size))


def quantize(table, f):
    """ sigma(., D_x) f """
    if isinstance(table, SymbolTable):
        if table.grid != f.grid:
            raise GridMismatchError('symbol and function live on different grids')
        values = table.values
    else:
        values = table
    return synthesize(f.grid, values, f.spectral)


def modal_factor(field, t, mu=None):
    """ exp(i t mu_A(x, xi)) on grid x lattice. """
    mu = principal_symbol(field) if mu is None else mu
    return np.exp(1j * t * mu.values)


def u0_apply(field, t, h, mu=None):
    """ U_0(t) h = sum_k exp(i t mu_A(x, xi_k)) h_hat_k exp(i x.xi_k); U_0(0) = I. """
    field.grid.require_same(h.grid)
    if t == 0:
        return h
    return synthesize(h.grid, modal_factor(field, t, mu), h.spectral)


def gp_apply(weight, field, t, h, mu=None):
    """ G_p(t) h for a WeightFamily p. """
    field.grid.require_same(h.grid)
    return synthesize(h.grid, weight(t) * modal_factor(field, t, mu), h.spectral)


def commutator_u0(field, t, h, mu=None):
    """ [U_0(t), grad_x] h = grad_x U_0(t) h - U_0(t) grad_x h, one GridFunction per axis. """
    u = u0_apply(field, t, h, mu)
    return [derivative(u, axis) - u0_apply(field, t, derivative(h, axis), mu)
            for axis in range(h.grid.dimension)]


def time_grid(grid, ratio=2.0 ** 0.125, lower=None, upper=None):
    """ Geometric samples t_j = t_min rho^j covering [1e-3 L/N, 10 L]. """
    lower = 1e-3 * grid.spacing if lower is None else lower
    upper = 10.0 * grid.period if upper is None else upper
    count = int(np.ceil(np.log(upper / lower) / np.log(ratio))) + 1
    return lower * ratio ** np.arange(count)


def square_function(weight, field, h, ratio=2.0 ** 0.125, lower=None, upper=None, progress=False):
    """
    int_0^inf ||G_p(t) h||^2 dt/t by the rectangle rule in log t, returned with the ratio to
    ||h||^2 and the truncation bound of the upper end. p must satisfy the G_p.2 hypothesis and h
    must have zero mean.
    """
    weight.require_tag('G_p.2')
    if not has_zero_mean(h):
        raise ZeroModeError('square function needs a zero-mean function: zero-mode undefined')
    mu = principal_symbol(field)
    times = time_grid(field.grid, ratio, lower, upper)
    total = 0.0
    for t in tqdm(times, desc='square function', disable=not progress, leave=False):
        total += l2_norm(gp_apply(weight, field, t, h, mu)) ** 2
    total *= np.log(ratio)

    norm2 = l2_norm(h) ** 2
    _, c_prime = symbol_bounds(mu)
    xi_min = h.grid.lattice.spacing
    truncation = float(np.exp(-2.0 * c_prime * times[-1] * xi_min))
    logger.debug('square function of %s: %.6g (%d time samples)', weight.name, total, times.size)
    return {'integral': float(total), 'ratio': float(total / norm2) if norm2 > 0 else float('nan'),
            'samples': int(times.size), 't_min': float(times[0]), 't_max': float(times[-1]),
            'truncation_bound': truncation}


def quantization_matrix(table):
    """ Dense nodal matrix of sigma(., D): column n is sigma(., D) applied to the n-th nodal basis function. """
    grid = table.grid
    size = grid.size
    weights = np.broadcast_to(table.values, grid.shape + grid.shape).reshape(size, size)
    phases = _phase_matrix(grid) if size <= CACHE_NODES else _phases(grid, slice(None))
    basis = np.eye(size, dtype=complex).reshape((size,) + grid.shape)
    transform = np.fft.fftn(basis, axes=tuple(range(1, grid.dimension + 1)), norm='ortho').reshape(size, size).T
    return (weights * phases) @ transform / np.sqrt(size)
