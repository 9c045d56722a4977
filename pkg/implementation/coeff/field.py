from functools import cached_property

import numpy as np

from grid import GridFunction, divergence
from utils import GridError


class CoefficientField:
    """
    Matrix field A(x) = (a_ij(x)), 1 <= i, j <= d + 1, sampled on the nodes of a TorusGrid.

    entries has shape (d + 1, d + 1, *grid.shape). The blocks follow the splitting
        A = [[A', r1], [r2^T, b]]
    with r1 the last column and r2 the last row. `sampler`, when given, evaluates the entries at
    arbitrary coordinates and is used for the half-cell values of the strip stencil.
    """
    def __init__(self, grid, entries, sampler=None, name='field'):
        n = grid.dimension + 1
        entries = np.array(entries, dtype=complex)
        if entries.shape[:2] != (n, n):
            raise GridError('coefficient entries must be {0}x{0} matrices, got {1}'.format(n, entries.shape[:2]))
        entries = np.array(np.broadcast_to(entries, (n, n) + grid.shape))
        if not np.all(np.isfinite(entries)):
            raise GridError('coefficient entries must be finite')
        entries.setflags(write=False)
        self.grid = grid
        self.entries = entries
        self.sampler = sampler
        self.name = name

    @classmethod
    def from_matrix(cls, grid, matrix, name='constant'):
        matrix = np.array(matrix, dtype=complex)
        sampler = lambda *coords: _broadcast_matrix(matrix, np.shape(coords[0]))
        return cls(grid, _broadcast_matrix(matrix, grid.shape), sampler=sampler, name=name)

    @property
    def size(self):
        return self.grid.dimension + 1

    @property
    def aprime(self):
        d = self.grid.dimension
        return self.entries[:d, :d]

    @property
    def b(self):
        return self.entries[-1, -1]

    @property
    def r1(self):
        return self.entries[:-1, -1]

    @property
    def r2(self):
        return self.entries[-1, :-1]

    @property
    def drift(self):
        """ v = (r1 + r2) / b """
        return (self.r1 + self.r2) / self.b

    def entry(self, i, j):
        return GridFunction(self.grid, self.entries[i, j])

    def matrix_at(self, index):
        return self.entries[(slice(None), slice(None)) + tuple(index)]

    def node_matrices(self):
        """ Entries as a stack of (grid.size, d + 1, d + 1) matrices in C order of the nodes. """
        n = self.size
        return np.moveaxis(self.entries.reshape(n, n, -1), -1, 0)

    @cached_property
    def divergence_r1(self):
        return divergence([GridFunction(self.grid, component) for component in self.r1]).values

    def midpoint(self, axis):
        """ Entries at x + (h/2) e_axis, from the analytic sampler or a spectral half-cell shift. """
        if self.sampler is not None:
            coords = list(self.grid.nodes)
            coords[axis] = coords[axis] + 0.5 * self.grid.spacing
            return np.array(np.broadcast_to(self.sampler(*coords), self.entries.shape), dtype=complex)
        lattice = self.grid.lattice
        shift = np.exp(0.5j * self.grid.spacing * lattice.xi[axis])
        axes = tuple(range(2, 2 + self.grid.dimension))
        return np.fft.ifftn(shift * np.fft.fftn(self.entries, axes=axes), axes=axes)

    @cached_property
    def ellipticity(self):
        from .ellipticity import validate
        return validate(self)

    @cached_property
    def lipschitz(self):
        from .ellipticity import lipschitz_estimate
        return lipschitz_estimate(self)

    @property
    def is_constant(self):
        return self.lipschitz == 0.0

    def with_grid(self, grid):
        """ The same field resampled on another grid; requires an analytic sampler. """
        if self.sampler is None:
            raise GridError('field {!r} has no sampler and cannot be resampled'.format(self.name))
        values = np.broadcast_to(self.sampler(*grid.nodes), (self.size, self.size) + grid.shape)
        return CoefficientField(grid, values, sampler=self.sampler, name=self.name)

    def describe(self):
        nu1, nu2 = self.ellipticity
        return {'name': self.name, 'nu1': nu1, 'nu2': nu2, 'lipschitz': self.lipschitz}

    def __repr__(self):
        return 'CoefficientField(name={!r}, grid={})'.format(self.name, self.grid)


def _broadcast_matrix(matrix, shape):
    n = matrix.shape[0]
    return np.broadcast_to(matrix.reshape((n, n) + (1,) * len(shape)), (n, n) + tuple(shape))
