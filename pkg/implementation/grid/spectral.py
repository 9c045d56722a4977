"""
Discrete Fourier analysis on the torus.

Spectral coefficients use the orthonormal FFT, and every inner product or norm carries the
cell volume h^d, so that <f, g> = h^d sum f conj(g) equals h^d sum f_hat conj(g_hat).
"""
import numpy as np

from utils import GridError, ZeroModeError

from .torus import GridFunction

ZERO_MODE_RTOL = 1e-10


def to_spectral(f):
    return f.spectral


def from_spectral(grid, coeffs):
    return GridFunction(grid, np.fft.ifftn(np.asarray(coeffs).reshape(grid.shape), norm='ortho'))


def inner(f, g, spectral=False):
    f.grid.require_same(g.grid)
    if spectral:
        return complex(f.grid.cell_volume * np.vdot(g.spectral, f.spectral))
    return complex(f.grid.cell_volume * np.vdot(g.values, f.values))


def l2_norm(f):
    return float(np.sqrt(f.grid.cell_volume) * np.linalg.norm(f.values))


def has_zero_mean(f):
    scale = np.linalg.norm(f.spectral)
    return abs(f.spectral[f.grid.lattice.zero_index]) <= ZERO_MODE_RTOL * scale + 1e-300


def apply_multiplier(f, multiplier):
    """ Spectral multiplication by an array defined on the frequency lattice. """
    return from_spectral(f.grid, np.asarray(multiplier) * f.spectral)


def derivative(f, axis=0):
    lattice = f.grid.lattice
    if not 0 <= axis < f.grid.dimension:
        raise GridError('axis {} out of range for dimension {}'.format(axis, f.grid.dimension))
    return apply_multiplier(f, 1j * lattice.xi[axis])


def gradient(f):
    return [derivative(f, axis) for axis in range(f.grid.dimension)]


def divergence(components):
    total = derivative(components[0], 0)
    for axis, component in enumerate(components[1:], start=1):
        total = total + derivative(component, axis)
    return total


def sobolev_norm(f, s, homogeneous=False):
    """
    Inhomogeneous: (h^d sum_k (1 + |xi_k|^2)^s |f_hat_k|^2)^(1/2).
    Homogeneous: the same sum over k != 0 with weight |xi_k|^(2s); for s < 0 the zero mode
    must vanish.
    """
    if not -2.0 <= s <= 2.0:
        raise GridError('Sobolev order must lie in [-2, 2], got {}'.format(s))
    lattice = f.grid.lattice
    power = np.abs(f.spectral) ** 2
    if homogeneous:
        if s < 0 and not has_zero_mean(f):
            raise ZeroModeError()
        nonzero = lattice.nonzero
        weight = np.zeros(lattice.shape)
        weight[nonzero] = lattice.norm[nonzero] ** (2.0 * s)
    else:
        weight = (1.0 + lattice.norm ** 2) ** s
    return float(np.sqrt(f.grid.cell_volume * np.sum(weight * power)))


def fractional_multiplier(f, symbol, annihilates_mean=False):
    """
    Apply the Fourier multiplier m(xi). `symbol` is either an array on the lattice or a
    callable m(*xi). With annihilates_mean the multiplier is undefined at xi = 0: m(0) is
    set to 0 and f must have zero mean.
    """
    lattice = f.grid.lattice
    if callable(symbol):
        with np.errstate(divide='ignore', invalid='ignore'):
            multiplier = np.array(np.broadcast_to(symbol(*lattice.xi), lattice.shape), dtype=complex)
    else:
        multiplier = np.array(symbol, dtype=complex).reshape(lattice.shape)
    if annihilates_mean:
        if not has_zero_mean(f):
            raise ZeroModeError()
        multiplier[lattice.zero_index] = 0.0
    if not np.all(np.isfinite(multiplier)):
        raise GridError('multiplier is not finite on the lattice')
    return apply_multiplier(f, multiplier)


def laplacian_power(f, s):
    """ (-Delta)^(s/2) """
    norm = f.grid.lattice.norm
    if s < 0:
        return fractional_multiplier(f, lambda *xi: norm ** s, annihilates_mean=True)
    return fractional_multiplier(f, norm ** s)
