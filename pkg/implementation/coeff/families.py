"""
Builtin coefficient families. Each family is instantiated from the `coefficient` section of a
run configuration ({"type": ..., "args": {...}}) and produces a CoefficientField on any grid.

Variable families are I plus Hermitian trigonometric perturbations whose spectral norms add
up to at most MAX_AMPLITUDE, so nu1 >= 1 - MAX_AMPLITUDE = 0.2 by construction; the general
family adds a skew-Hermitian part, which leaves Re<A eta, eta> unchanged.
"""
import logging

import numpy as np
import sympy

from utils import ConfigError, parse_number

from .field import CoefficientField

logger = logging.getLogger(__name__)

MAX_AMPLITUDE = 0.8


class CoefficientFamily:
    tag = None

    def __init__(self, dimension=1, name=None):
        if dimension not in (1, 2):
            raise ConfigError('coefficient dimension must be 1 or 2, got {}'.format(dimension))
        self.dimension = dimension
        self.name = name or self.tag

    @property
    def size(self):
        return self.dimension + 1

    def evaluate(self, *coords):
        """ Entries at the given coordinate arrays, shape (d + 1, d + 1, *coords[0].shape). """
        raise NotImplementedError

    def field(self, grid, validate=True):
        if grid.dimension != self.dimension:
            raise ConfigError('family {!r} is {}-dimensional but the grid is {}-dimensional'.format(
                self.name, self.dimension, grid.dimension))
        period = grid.period
        sampler = lambda *coords: self.evaluate(*coords, period=period)
        field = CoefficientField(grid, sampler(*grid.nodes), sampler=sampler, name=self.name)
        if validate:
            nu1, nu2 = field.ellipticity
            logger.info('%s: nu1 = %.6g, nu2 = %.6g, Lip(A) = %.6g', self.name, nu1, nu2, field.lipschitz)
        return field

    def parameters(self):
        return {'family': self.tag}


class ConstantFamily(CoefficientFamily):
    tag = 'constant'

    def __init__(self, matrix, name=None):
        matrix = np.array([[parse_number(value, complex) for value in row] for row in matrix])
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] not in (2, 3):
            raise ConfigError('constant coefficient matrix must be 2x2 or 3x3')
        super().__init__(matrix.shape[0] - 1, name)
        self.matrix = matrix

    def evaluate(self, *coords, period=None):
        shape = np.shape(coords[0])
        n = self.size
        return np.broadcast_to(self.matrix.reshape((n, n) + (1,) * len(shape)), (n, n) + shape)

    def parameters(self):
        return {'family': self.tag, 'matrix': self.matrix}


class TrigonometricFamily(CoefficientFamily):
    """
    A(x) = A_0 + sum_j H_j phi_j(x) + sum_j S_j psi_j(x), with phi_j, psi_j in
    {sin, cos}(2 pi m_j . x / L), H_j Hermitian and S_j skew-Hermitian random matrices.
    """
    def __init__(self, dimension=1, amplitude=0.5, skew_amplitude=0.0, terms=2, max_mode=2, seed=0,
                 real=False, mask=None, name=None):
        super().__init__(dimension, name)
        amplitude = parse_number(amplitude)
        if not 0 <= amplitude <= MAX_AMPLITUDE:
            raise ConfigError('amplitude must lie in [0, {}], got {}'.format(MAX_AMPLITUDE, amplitude))
        self.amplitude = amplitude
        self.skew_amplitude = parse_number(skew_amplitude)
        self.terms = int(terms)
        self.max_mode = int(max_mode)
        self.seed = int(seed)
        self.real = bool(real)
        self.mask = np.ones((self.size, self.size)) if mask is None else np.asarray(mask, dtype=float)
        self.base = np.eye(self.size, dtype=complex)

        rng = np.random.default_rng(self.seed)
        self.hermitian_terms = [self._term(rng, hermitian=True) for _ in range(self.terms)]
        self.skew_terms = [self._term(rng, hermitian=False) for _ in range(self.terms)] \
            if self.skew_amplitude else []

    def _term(self, rng, hermitian):
        n = self.size
        g = rng.standard_normal((n, n))
        if not self.real:
            g = g + 1j * rng.standard_normal((n, n))
        g = g * self.mask
        h = 0.5 * (g + g.conj().T) if hermitian else 0.5 * (g - g.conj().T)
        norm = np.linalg.norm(h, 2)
        h = h / norm if norm > 0 else h
        scale = (self.amplitude if hermitian else self.skew_amplitude) / self.terms
        mode = rng.integers(1, self.max_mode + 1, size=self.dimension)
        kind = rng.choice(['sin', 'cos'])
        return scale * h, mode, kind

    def evaluate(self, *coords, period=2 * np.pi):
        shape = np.shape(coords[0])
        n = self.size
        out = np.array(np.broadcast_to(self.base.reshape((n, n) + (1,) * len(shape)), (n, n) + shape))
        for matrix, mode, kind in self.hermitian_terms + self.skew_terms:
            phase = 2.0 * np.pi / period * sum(m * x for m, x in zip(mode, coords))
            profile = np.sin(phase) if kind == 'sin' else np.cos(phase)
            out = out + matrix.reshape((n, n) + (1,) * len(shape)) * profile
        return out

    def parameters(self):
        return {'family': self.tag, 'dimension': self.dimension, 'amplitude': self.amplitude,
                'skew_amplitude': self.skew_amplitude, 'terms': self.terms, 'max_mode': self.max_mode,
                'seed': self.seed, 'real': self.real}


class BlockFamily(TrigonometricFamily):
    """ r1 = r2 = 0; A' and b vary. """
    tag = 'block'

    def __init__(self, dimension=1, amplitude=0.5, terms=2, max_mode=2, seed=0, real=False, name=None):
        n = dimension + 1
        mask = np.zeros((n, n))
        mask[:-1, :-1] = 1.0
        mask[-1, -1] = 1.0
        super().__init__(dimension, amplitude, 0.0, terms, max_mode, seed, real, mask, name)


class HermitianFamily(TrigonometricFamily):
    tag = 'hermitian'

    def __init__(self, dimension=1, amplitude=0.5, terms=2, max_mode=2, seed=0, real=False, name=None):
        super().__init__(dimension, amplitude, 0.0, terms, max_mode, seed, real, None, name)


class LipschitzFamily(TrigonometricFamily):
    """ General complex non-Hermitian Lipschitz coefficients (r1 != r2). """
    tag = 'general-lipschitz'

    def __init__(self, dimension=1, amplitude=0.5, skew_amplitude=0.4, terms=2, max_mode=2, seed=0, name=None):
        super().__init__(dimension, amplitude, skew_amplitude, terms, max_mode, seed, False, None, name)


class ExpressionFamily(CoefficientFamily):
    """
    Entries given as sympy expressions in x (and y when d = 2), e.g.
        {"entries": [["2 + 0.5*sin(x)", "0"], ["0", "1"]]}
    Expressions must be L-periodic; `parameters` supplies named constants.
    """
    tag = 'user-config'

    def __init__(self, entries, parameters=None, name=None):
        size = len(entries)
        if size not in (2, 3) or any(len(row) != size for row in entries):
            raise ConfigError('coefficient expressions must form a 2x2 or 3x3 matrix')
        super().__init__(size - 1, name)
        self.symbols = sympy.symbols('x y')[:self.dimension]
        local = {str(k): sympy.sympify(v) for k, v in (parameters or {}).items()}
        local.update({str(s): s for s in self.symbols})
        self.expressions = []
        for row in entries:
            parsed = []
            for text in row:
                try:
                    expr = sympy.sympify(str(text), locals=local)
                except (sympy.SympifyError, TypeError) as err:
                    raise ConfigError('cannot parse coefficient expression {!r}'.format(text)) from err
                unknown = expr.free_symbols - set(self.symbols)
                if unknown:
                    raise ConfigError('unknown symbols {} in {!r}'.format(sorted(map(str, unknown)), text))
                parsed.append(expr)
            self.expressions.append(parsed)
        self.functions = [[sympy.lambdify(self.symbols, expr, modules='numpy') for expr in row]
                          for row in self.expressions]

    def evaluate(self, *coords, period=None):
        shape = np.shape(coords[0])
        n = self.size
        out = np.empty((n, n) + shape, dtype=complex)
        for i in range(n):
            for j in range(n):
                out[i, j] = np.broadcast_to(self.functions[i][j](*coords), shape)
        return out

    def field(self, grid, validate=True):
        shifted = [x + grid.period for x in grid.nodes]
        if not np.allclose(self.evaluate(*shifted), self.evaluate(*grid.nodes), atol=1e-10):
            logger.warning('coefficient expressions of %r are not %g-periodic', self.name, grid.period)
        return super().field(grid, validate)

    def parameters(self):
        return {'family': self.tag, 'entries': [[str(e) for e in row] for row in self.expressions]}


FAMILIES = {cls.tag: cls for cls in (ConstantFamily, BlockFamily, HermitianFamily, LipschitzFamily, ExpressionFamily)}


def family_from_tag(tag, **kwargs):
    try:
        return FAMILIES[tag](**kwargs)
    except KeyError:
        raise ConfigError('unknown coefficient family {!r}; expected one of {}'.format(tag, sorted(FAMILIES)))
