import itertools

import numpy as np

from base import BaseEnsemble
from utils import GridError


class BandLimitedEnsemble(BaseEnsemble):
    """
    Random trigonometric polynomials with |k|_inf <= band and complex Gaussian amplitudes damped
    by (1 + |k|^2)^(-decay/2). With `sobolev` set, every member has unit H^s norm.
    """
    def __init__(self, dimension=1, size=8, seed=0, band=8, decay=4.0, sobolev=None, zero_mean=False, name=None):
        if band < 1:
            raise GridError('band must be at least 1, got {}'.format(band))
        self.band = int(band)
        self.decay = float(decay)
        self.zero_mean = bool(zero_mean)
        super().__init__(dimension, size, seed, sobolev, name or 'band-limited')

    def _coefficients(self, rng, index):
        axis = range(-self.band, self.band + 1)
        wavenumbers = np.array(list(itertools.product(axis, repeat=self.dimension)), dtype=int)
        if self.zero_mean:
            wavenumbers = wavenumbers[np.any(wavenumbers != 0, axis=1)]
        damping = (1.0 + np.sum(wavenumbers ** 2, axis=1)) ** (-self.decay / 2.0)
        amplitudes = (rng.standard_normal(len(wavenumbers)) + 1j * rng.standard_normal(len(wavenumbers))) * damping
        return wavenumbers, amplitudes

    def describe(self):
        out = super().describe()
        out.update(band=self.band, decay=self.decay, zero_mean=self.zero_mean)
        return out


class ModeEnsemble(BaseEnsemble):
    """ Single plane waves exp(i k x_1) for the listed wavenumbers; no randomness. """
    def __init__(self, dimension=1, modes=(1,), sobolev=None, name=None):
        self.modes = [int(k) for k in modes]
        if any(k == 0 for k in self.modes):
            raise GridError('mode sweeps exclude the zero mode')
        super().__init__(dimension, len(self.modes), 0, sobolev, name or 'modes')

    def _coefficients(self, rng, index):
        k = np.zeros((1, self.dimension), dtype=int)
        k[0, 0] = self.modes[index]
        return k, np.ones(1, dtype=complex)

    def describe(self):
        out = super().describe()
        out.update(modes=self.modes)
        return out


def dyadic_modes(points, fraction=4):
    """ 2, 4, 8, ... up to N / fraction """
    top = max(2, points // fraction)
    return [2 ** j for j in range(1, int(np.log2(top)) + 1)]


def even_modes(points, fraction=4):
    """ 2, 4, 6, ... up to N / fraction """
    return list(range(2, max(2, points // fraction) + 1, 2))
