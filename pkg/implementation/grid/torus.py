from dataclasses import dataclass
from functools import cached_property

import numpy as np

from utils import GridError, GridMismatchError


@dataclass(frozen=True)
class TorusGrid:
    """
    Uniform periodic grid on the torus [0, L)^d with N points per axis.

    Nodes are x_m = m * h with h = L / N; arrays are indexed with numpy's 'ij' convention
    so that array axis a is coordinate a.
    """
    dimension: int
    period: float
    points: int

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise GridError('dimension must be 1 or 2, got {}'.format(self.dimension))
        if self.points < 8 or self.points % 2:
            raise GridError('points per axis must be even and at least 8, got {}'.format(self.points))
        if not np.isfinite(self.period) or self.period <= 0:
            raise GridError('period must be positive, got {}'.format(self.period))
        object.__setattr__(self, 'period', float(self.period))

    @property
    def spacing(self):
        return self.period / self.points

    @property
    def shape(self):
        return (self.points,) * self.dimension

    @property
    def size(self):
        return self.points ** self.dimension

    @property
    def cell_volume(self):
        return self.spacing ** self.dimension

    @cached_property
    def axis_nodes(self):
        return np.arange(self.points) * self.spacing

    @cached_property
    def nodes(self):
        return tuple(np.meshgrid(*([self.axis_nodes] * self.dimension), indexing='ij'))

    @cached_property
    def lattice(self):
        return FrequencyLattice(self)

    def refine(self, factor=2):
        return TorusGrid(self.dimension, self.period, self.points * factor)

    def centered_offsets(self):
        """ Periodic offsets y in [-L/2, L/2) per axis, in fft storage order. """
        k = np.fft.fftfreq(self.points, d=1.0 / self.points)
        return k * self.spacing

    def require_same(self, other):
        if other != self:
            raise GridMismatchError('grid mismatch: {} vs {}'.format(self, other))

    def describe(self):
        return {'dimension': self.dimension, 'period': self.period, 'points': self.points, 'spacing': self.spacing}


class FrequencyLattice:
    """
    Dual lattice xi_k = 2 pi k / L, k in {-N/2, ..., N/2 - 1}^d, stored in fft order
    (the zero frequency sits at index 0 on every axis).
    """
    def __init__(self, grid):
        self.grid = grid
        self.wavenumbers = np.fft.fftfreq(grid.points, d=1.0 / grid.points)
        self.axis_xi = 2.0 * np.pi * self.wavenumbers / grid.period
        self.xi = tuple(np.meshgrid(*([self.axis_xi] * grid.dimension), indexing='ij'))
        self.norm = np.sqrt(sum(component ** 2 for component in self.xi))
        self.spacing = 2.0 * np.pi / grid.period

    @property
    def shape(self):
        return self.grid.shape

    @property
    def zero_index(self):
        return (0,) * self.grid.dimension

    @property
    def nonzero(self):
        mask = np.ones(self.shape, dtype=bool)
        mask[self.zero_index] = False
        return mask

    def index_of(self, *k):
        """ Storage index of the integer wavenumber vector k. """
        n = self.grid.points
        return tuple(int(kk) % n for kk in k)


class GridFunction:
    """
    Complex function sampled on a TorusGrid. Immutable: the value array is copied and frozen,
    and the spectral coefficients (orthonormal FFT) are computed once on demand.
    """
    def __init__(self, grid, values):
        values = np.array(values, dtype=complex)
        if values.shape != grid.shape:
            if values.size == grid.size:
                values = values.reshape(grid.shape)
            else:
                raise GridMismatchError('values of shape {} do not fit grid {}'.format(values.shape, grid.shape))
        values.setflags(write=False)
        self._grid = grid
        self._values = values

    @classmethod
    def from_callable(cls, grid, fn):
        return cls(grid, np.broadcast_to(fn(*grid.nodes), grid.shape))

    @classmethod
    def constant(cls, grid, value):
        return cls(grid, np.full(grid.shape, value, dtype=complex))

    @classmethod
    def mode(cls, grid, *k):
        """ Plane wave exp(i xi_k . x) for the integer wavenumber vector k. """
        phase = sum(2.0 * np.pi * kk / grid.period * x for kk, x in zip(k, grid.nodes))
        return cls(grid, np.exp(1j * phase))

    @property
    def grid(self):
        return self._grid

    @property
    def values(self):
        return self._values

    @cached_property
    def spectral(self):
        coeffs = np.fft.fftn(self._values, norm='ortho')
        coeffs.setflags(write=False)
        return coeffs

    def mean(self):
        return complex(self._values.mean())

    def conj(self):
        return GridFunction(self._grid, np.conj(self._values))

    def _operand(self, other):
        if isinstance(other, GridFunction):
            self._grid.require_same(other.grid)
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self._grid, self._values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self._grid, self._values - self._operand(other))

    def __rsub__(self, other):
        return GridFunction(self._grid, self._operand(other) - self._values)

    def __mul__(self, other):
        return GridFunction(self._grid, self._values * self._operand(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return GridFunction(self._grid, self._values / self._operand(other))

    def __neg__(self):
        return GridFunction(self._grid, -self._values)

    def __repr__(self):
        return 'GridFunction(grid={}, norm={:.6g})'.format(self._grid, float(np.linalg.norm(self._values)))
