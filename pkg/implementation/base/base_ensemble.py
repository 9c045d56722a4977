from abc import abstractmethod
from collections import OrderedDict
from functools import cached_property

import numpy as np

from grid import from_spectral, sobolev_norm
from utils import GridError


class BaseEnsemble:
    """
    Base class for all ensembles

    Members are stored as integer wavenumbers with complex amplitudes, drawn once from a seeded
    generator, so that the same functions can be sampled on every grid of a refinement series.
    """
    def __init__(self, dimension, size, seed=0, sobolev=None, name=None):
        if size < 1:
            raise GridError('an ensemble needs at least one member, got {}'.format(size))
        self.dimension = int(dimension)
        self.size = int(size)
        self.seed = int(seed)
        self.sobolev = sobolev
        self.name = name or type(self).__name__

    @abstractmethod
    def _coefficients(self, rng, index):
        """
        Spectrum of member `index`

        :return: (wavenumbers of shape (m, d), amplitudes of shape (m,))
        """
        raise NotImplementedError

    @cached_property
    def spectra(self):
        rng = np.random.default_rng(self.seed)
        return [self._coefficients(rng, index) for index in range(self.size)]

    @property
    def max_wavenumber(self):
        return max(int(np.abs(k).max()) for k, _ in self.spectra)

    def __len__(self):
        return self.size

    def member(self, grid, index):
        if grid.dimension != self.dimension:
            raise GridError('ensemble of dimension {} sampled on a {}-d grid'.format(self.dimension, grid.dimension))
        if 2 * self.max_wavenumber >= grid.points:
            raise GridError('wavenumber {} is not resolved by N = {}'.format(self.max_wavenumber, grid.points))
        wavenumbers, amplitudes = self.spectra[index]
        coeffs = np.zeros(grid.shape, dtype=complex)
        for k, c in zip(wavenumbers, amplitudes):
            coeffs[grid.lattice.index_of(*k)] += c * np.sqrt(grid.size)
        f = from_spectral(grid, coeffs)
        if self.sobolev is not None:
            norm = sobolev_norm(f, self.sobolev)
            if norm > 0:
                f = f / norm
        return f

    def members(self, grid):
        return [self.member(grid, index) for index in range(self.size)]

    def pairs(self, grid):
        """ (f, g) pairs from the first and second half of the members. """
        members = self.members(grid)
        half = max(1, self.size // 2)
        return list(zip(members[:half], members[half:] or members[:half]))

    def describe(self):
        return OrderedDict(name=self.name, dimension=self.dimension, size=self.size, seed=self.seed,
                           sobolev=self.sobolev, max_wavenumber=self.max_wavenumber)
