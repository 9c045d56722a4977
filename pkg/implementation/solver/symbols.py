"""
Frozen-coefficient symbols of the strip scheme.

With the coefficients frozen at a node x, the interior rows map rho^n e^{i x.xi} to zero when

    (b + i alpha) rho^2 - (2 b + sigma' dt^2) rho + (b - i alpha) = 0,

where sigma'(x, xi) = sum_i a_ii 4 sin^2(xi_i h / 2) / h^2 + sum_{i != j} a_ij s_i s_j is the
symbol of A'_h, s_i = sin(xi_i h) / h that of D_i, and alpha = dt sum_i (r1_i + r2_i) s_i / 2.
The decaying root gives the discrete counterparts of mu_A: one read off the conormal trace,
one off the propagation rho^n = exp(i t_n mu).
"""
from functools import cached_property

import numpy as np

from symbol import SymbolTable, x_field, xi_field


class SchemeSymbol:
    def __init__(self, strip):
        self.strip = strip
        self.field = strip.field
        self.grid = strip.grid
        self.dt = strip.dt

    def _parts(self):
        grid, field = self.grid, self.field
        d, h = grid.dimension, grid.spacing
        xi = grid.lattice.xi
        sines = [np.sin(component * h) / h for component in xi]
        sigma = 0.0
        for i in range(d):
            mid = field.midpoint(i)[i, i]
            frozen = 0.5 * (mid + np.roll(mid, 1, axis=i))
            sigma = sigma + x_field(grid, frozen) * xi_field(grid, (2.0 * np.sin(0.5 * xi[i] * h) / h) ** 2)
            for j in range(d):
                if j != i:
                    sigma = sigma + x_field(grid, field.aprime[i, j]) * xi_field(grid, sines[i] * sines[j])
        cross = sum(x_field(grid, field.r1[i] + field.r2[i]) * xi_field(grid, sines[i]) for i in range(d))
        skew = sum(x_field(grid, field.r1[i] - field.r2[i]) * xi_field(grid, sines[i]) for i in range(d))
        drift = sum(x_field(grid, field.r2[i]) * xi_field(grid, sines[i]) for i in range(d))
        return sigma, cross, skew, drift

    @cached_property
    def _evaluated(self):
        sigma, cross, skew, drift = self._parts()
        shape = self.grid.shape + self.grid.shape
        b = np.broadcast_to(x_field(self.grid, self.field.b), shape)
        alpha = 0.5 * self.dt * np.broadcast_to(cross, shape)
        lead, middle, last = b + 1j * alpha, 2.0 * b + np.broadcast_to(sigma, shape) * self.dt ** 2, b - 1j * alpha
        disc = np.sqrt(middle ** 2 - 4.0 * lead * last)
        # the larger-modulus combination avoids cancellation; the other root follows from the product
        sign = np.where(np.real(np.conj(middle) * disc) >= 0, 1.0, -1.0)
        big = 0.5 * (middle + sign * disc)
        roots = np.stack([big / lead, last / big])
        pick = np.argmin(np.abs(roots), axis=0)
        rho = np.take_along_axis(roots, pick[None], axis=0)[0]
        trace = (0.5 * self.dt * sigma - b * (rho - 1.0) / self.dt - 0.5j * cross * rho + 0.5j * skew
                 + 1j * drift) / b
        return rho, trace

    @property
    def root(self):
        return self._evaluated[0]

    @cached_property
    def trace(self):
        """ mu_h = i P_h: S_h = -P_h - i mu_h(., D) vanishes for constant coefficients. """
        values = 1j * self._evaluated[1]
        values[(Ellipsis,) + self.grid.lattice.zero_index] = 0.0
        return SymbolTable(self.grid, values, degree=1, provenance='mu', name='mu_h({})'.format(self.field.name))

    @cached_property
    def propagation(self):
        """ -i log(rho) / dt, so that U_0(t_n) built from it is rho^n. """
        values = -1j * np.log(self.root) / self.dt
        values[(Ellipsis,) + self.grid.lattice.zero_index] = 0.0
        return SymbolTable(self.grid, values, degree=1, provenance='mu', name='mu_rho({})'.format(self.field.name))

    def _mode(self, values, k):
        index = self.grid.lattice.index_of(*([k] + [0] * (self.grid.dimension - 1)))
        return values[(Ellipsis,) + index]

    def root_modulus(self, modes):
        """ max_x |rho(x, xi_k e_1)| per mode; below 1 when the discrete extension decays. """
        return [float(np.abs(self._mode(self.root, k)).max()) for k in modes]

    def relative_gap(self, mu, modes):
        """ max_x |mu_h - mu| / |mu| per mode, the discretization error of the principal symbol. """
        out = []
        for k in modes:
            exact = self._mode(mu.values, k)
            out.append(float((np.abs(self._mode(self.trace.values, k) - exact) / np.abs(exact)).max()))
        return out
