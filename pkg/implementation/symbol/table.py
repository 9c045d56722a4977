import numpy as np

from utils import GridMismatchError, SymbolError

PROVENANCES = ('mu', 'lambda', 'q', 'weight')


class SymbolTable:
    """
    Complex function sigma(x_m, xi_k) on grid x frequency lattice.

    values has shape (*grid.shape, *grid.shape): the first d axes index x, the last d index xi
    in fft order. degree is 1 for the homogeneous symbols mu, lambda, q and None otherwise.
    """
    def __init__(self, grid, values, degree=None, provenance='weight', name=None):
        if provenance not in PROVENANCES:
            raise SymbolError('unknown provenance {!r}'.format(provenance))
        values = np.array(np.broadcast_to(values, grid.shape + grid.shape), dtype=complex)
        values.setflags(write=False)
        self.grid = grid
        self.values = values
        self.degree = degree
        self.provenance = provenance
        self.name = name or provenance

    @property
    def lattice(self):
        return self.grid.lattice

    @property
    def x_axes(self):
        return tuple(range(self.grid.dimension))

    @property
    def xi_axes(self):
        d = self.grid.dimension
        return tuple(range(d, 2 * d))

    def at_zero_frequency(self):
        return self.values[(Ellipsis,) + self.lattice.zero_index]

    @property
    def x_independent(self):
        reference = self.values[(0,) * self.grid.dimension]
        return bool(np.all(self.values == reference))

    def _operand(self, other):
        if isinstance(other, SymbolTable):
            if other.grid != self.grid:
                raise GridMismatchError('symbol tables live on different grids')
            return other.values
        return other

    def __add__(self, other):
        return SymbolTable(self.grid, self.values + self._operand(other))

    __radd__ = __add__

    def __sub__(self, other):
        return SymbolTable(self.grid, self.values - self._operand(other))

    def __mul__(self, other):
        return SymbolTable(self.grid, self.values * self._operand(other))

    __rmul__ = __mul__

    def __neg__(self):
        return SymbolTable(self.grid, -self.values)

    def __repr__(self):
        return 'SymbolTable(name={!r}, degree={}, grid={})'.format(self.name, self.degree, self.grid)


def x_field(grid, values):
    """ Broadcast an x-dependent array (*grid.shape) against the xi axes of a symbol table. """
    return np.reshape(values, grid.shape + (1,) * grid.dimension)


def xi_field(grid, values):
    """ Broadcast a lattice array (*grid.shape) against the x axes of a symbol table. """
    return np.reshape(values, (1,) * grid.dimension + grid.shape)
