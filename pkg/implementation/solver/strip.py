"""
Finite-difference oracle for -div(A grad u) on the strip T^d_L x [0, T].

Nodes t_n = n dt, n = 0..Nt, dt = T / Nt, are combined with the periodic spatial grid; the
unknown at (x_m, t_n) has index n * N^d + m. The interior rows are

    A_h = I_t (x) A'_h - D_tt (x) M_b - D_t (x) C_h
    A'_h = -sum_i D_i^- M_{a_ii at x + h/2 e_i} D_i^+ - sum_{i != j} D_i M_{a_ij} D_j
    C_h = sum_i (D_i M_{r1_i} + M_{r2_i} D_i),    K_h = sum_i (D_i M_{r1_i} - M_{r2_i} D_i)

with centred differences D_i, D_t and the usual three-point D_tt; it is the standard discrete
Laplacian for A = I. The rows are the Euler-Lagrange equations of the discrete form

    a_h(u, v) = dt sum_n w_n <A'_h u_n, v_n> + dt sum_n <b d+u_n, d+v_n>
                + 1/2 sum_n (<C_h u_n, v_n+1> - <C_h u_n+1, v_n>) + 1/2 <K_h u_0, v_0> - 1/2 <K_h u_Nt, v_Nt>

(trapezoidal weights w_n, forward differences d+). Dirichlet data at t = 0 is eliminated and the
row at t = T is the natural condition of a_h, zero conormal flux, so that the solution settles
to its own limit constant as on the half-space. The conormal derivative at t = 0 is the
t = 0 row of a_h, which makes <Lambda_h f, g> = a_h(E_h f, v) for every v with v_0 = g.
"""
import logging
from dataclasses import dataclass, field as dataclass_field
from functools import cached_property
from typing import Any, Dict

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from grid import GridFunction
from utils import GridError, SolverError

logger = logging.getLogger(__name__)

CONDITION_LIMIT = 1e14


def periodic_difference(n, h, kind):
    """ Periodic first differences on n points: 'forward', 'backward' or 'central'. """
    if kind == 'forward':
        return sparse.diags([-1.0, 1.0, 1.0], [0, 1, -(n - 1)], shape=(n, n)) / h
    if kind == 'backward':
        return sparse.diags([1.0, -1.0, -1.0], [0, -1, n - 1], shape=(n, n)) / h
    if kind == 'central':
        return sparse.diags([1.0, -1.0, -1.0, 1.0], [1, -1, n - 1, -(n - 1)], shape=(n, n)) / (2.0 * h)
    raise ValueError('unknown difference {!r}'.format(kind))


def axis_operator(grid, kind, axis):
    """ The 1-D difference acting along `axis` of the flattened (C order) grid. """
    n = grid.points
    ops = [sparse.identity(n, format='csr')] * grid.dimension
    ops[axis] = periodic_difference(n, grid.spacing, kind)
    out = ops[0]
    for op in ops[1:]:
        out = sparse.kron(out, op)
    return sparse.csr_matrix(out, dtype=complex)


def assemble_aprime(field):
    """ Conservative discretization of A' = -div_x(A' grad_x) on the boundary grid. """
    grid = field.grid
    d = grid.dimension
    total = sparse.csr_matrix((grid.size, grid.size), dtype=complex)
    for i in range(d):
        midpoint = field.midpoint(i)[i, i].ravel()
        total = total - axis_operator(grid, 'backward', i) @ sparse.diags(midpoint) @ axis_operator(grid, 'forward', i)
        for j in range(d):
            if j != i:
                total = total - axis_operator(grid, 'central', i) @ sparse.diags(field.aprime[i, j].ravel()) \
                    @ axis_operator(grid, 'central', j)
    return total.tocsr()


def assemble_cross(field, sign=1.0):
    """ sum_i (D_i M_{r1_i} + sign M_{r2_i} D_i); sign -1 gives K_h. """
    grid = field.grid
    total = sparse.csr_matrix((grid.size, grid.size), dtype=complex)
    for i in range(grid.dimension):
        central = axis_operator(grid, 'central', i)
        total = total + central @ sparse.diags(field.r1[i].ravel()) + sign * sparse.diags(field.r2[i].ravel()) @ central
    return total.tocsr()


def _apply_levels(matrix, values):
    """ A boundary matrix applied to every level of an array (levels, N^d, ...). """
    flat = values.reshape(values.shape[0], values.shape[1], -1)
    out = np.stack([matrix @ level for level in flat])
    return out.reshape(values.shape)


@dataclass
class StripSolution:
    """ Discrete u(x_m, t_n) with the descriptor of the problem it solves. """
    grid: Any
    times: np.ndarray
    values: np.ndarray
    problem: Dict[str, Any] = dataclass_field(default_factory=dict)
    residual: float = 0.0
    condition: float = float('nan')

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else float('nan')

    def level(self, n):
        return GridFunction(self.grid, self.values[n])

    def nearest_level(self, t):
        return int(np.argmin(np.abs(self.times - t)))

    def at_time(self, t):
        return self.level(self.nearest_level(t))

    def restrict(self, times):
        index = [self.nearest_level(t) for t in times]
        return StripSolution(self.grid, self.times[index], self.values[index], dict(self.problem),
                             self.residual, self.condition)


class StripDiscretization:
    """
    Sparse system on T^d_L x [0, T] for one coefficient field. The LU factorization of the
    block of levels 1..Nt is computed once and shared by every solve.
    """
    def __init__(self, field, height, levels, permc_spec='MMD_AT_PLUS_A', refinement_steps=3):
        grid = field.grid
        if levels < 4:
            raise GridError('at least 4 vertical intervals are required, got {}'.format(levels))
        if height <= 0:
            raise GridError('strip height must be positive, got {}'.format(height))
        if height < 4.0 * grid.period:
            logger.warning('strip height %.4g is below 4L = %.4g; truncation error of slow modes may be visible',
                           height, 4.0 * grid.period)
        self.field = field
        self.grid = grid
        self.height = float(height)
        self.levels = int(levels)
        self.permc_spec = permc_spec
        self.refinement_steps = int(refinement_steps)
        self.condition = float('nan')

    @classmethod
    def for_field(cls, field, height=None, levels=None, **kwargs):
        """ Default strip: T = 4L and dt close to the spatial spacing. """
        grid = field.grid
        height = 4.0 * grid.period if height is None else float(height)
        levels = int(np.ceil(height / grid.spacing)) if levels is None else int(levels)
        return cls(field, height, levels, **kwargs)

    @property
    def dt(self):
        return self.height / self.levels

    @cached_property
    def times(self):
        return np.arange(self.levels + 1) * self.dt

    def describe(self):
        return {'height': self.height, 'levels': self.levels, 'dt': self.dt, 'permc_spec': self.permc_spec,
                'top': 'natural'}

    @cached_property
    def aprime_matrix(self):
        return assemble_aprime(self.field)

    @cached_property
    def cross_matrix(self):
        return assemble_cross(self.field)

    @cached_property
    def skew_matrix(self):
        return assemble_cross(self.field, sign=-1.0)

    @cached_property
    def central(self):
        return [axis_operator(self.grid, 'central', i) for i in range(self.grid.dimension)]

    @cached_property
    def matrix(self):
        """
        Operator on all Nt + 1 levels. Row 0 is not used; the row at t = T is the natural
        condition of a_h scaled by 2 / dt.
        """
        n_levels = self.levels + 1
        top = self.levels
        dt = self.dt
        d_tt = sparse.lil_matrix(sparse.diags([1.0, -2.0, 1.0], [-1, 0, 1], shape=(n_levels, n_levels)) / dt ** 2)
        d_tt[top, top - 1] = 2.0 / dt ** 2
        d_tt[top, top] = -2.0 / dt ** 2
        d_t = sparse.lil_matrix(sparse.diags([-1.0, 1.0], [-1, 1], shape=(n_levels, n_levels)) / (2.0 * dt))
        d_t[top, top - 1] = -1.0 / dt
        corner = sparse.csr_matrix(([1.0], ([top], [top])), shape=(n_levels, n_levels))
        b = sparse.diags(self.field.b.ravel())
        full = sparse.kron(sparse.identity(n_levels), self.aprime_matrix) - sparse.kron(d_tt.tocsr(), b) \
            - sparse.kron(d_t.tocsr(), self.cross_matrix) - sparse.kron(corner, self.skew_matrix) / dt
        return sparse.csr_matrix(full, dtype=complex)

    @cached_property
    def _blocks(self):
        p = self.grid.size
        rows = self.matrix[p:]
        return rows[:, p:].tocsc(), rows[:, :p].tocsr()

    @cached_property
    def factor(self):
        interior, _ = self._blocks
        try:
            lu = splinalg.splu(interior, permc_spec=self.permc_spec)
        except RuntimeError as err:
            raise SolverError('strip factorization failed: {}'.format(err), condition=float('inf')) from err
        condition = self._condition(interior, lu)
        if not np.isfinite(condition) or condition > CONDITION_LIMIT:
            raise SolverError('strip system is ill-conditioned (estimate {:.3e})'.format(condition), condition=condition)
        logger.debug('strip factorization: %d unknowns, condition estimate %.3e', interior.shape[0], condition)
        self.condition = condition
        return lu

    @staticmethod
    def _condition(matrix, lu):
        n = matrix.shape[0]
        inverse = splinalg.LinearOperator((n, n), matvec=lu.solve, rmatvec=lambda x: lu.solve(x, trans='H'),
                                          dtype=complex)
        return float(splinalg.norm(matrix, 1) * splinalg.onenormest(inverse))

    def _solve(self, rhs):
        """ LU solve with iterative refinement; stops when the residual no longer decreases. """
        interior = self._blocks[0]
        lu = self.factor
        x = lu.solve(rhs)
        scale = max(np.linalg.norm(rhs), 1e-300)
        res = rhs - interior @ x
        resnorm = np.linalg.norm(res)
        for _ in range(self.refinement_steps):
            if resnorm <= 1e-14 * scale:
                break
            candidate = x + lu.solve(res)
            newres = rhs - interior @ candidate
            newnorm = np.linalg.norm(newres)
            if newnorm >= resnorm:
                break
            x, res, resnorm = candidate, newres, newnorm
        return x, float(resnorm / scale)

    def _assemble(self, upper_values, bottom):
        p = self.grid.size
        values = np.empty((self.levels + 1, p) + upper_values.shape[1:], dtype=complex)
        values[0] = bottom
        values[1:] = upper_values.reshape((self.levels, p) + upper_values.shape[1:])
        return values

    def solve_dirichlet(self, f):
        """ Discrete E_A f: A_h u = 0, u(., 0) = f, zero conormal flux at t = T. """
        self.grid.require_same(f.grid)
        _, bottom_block = self._blocks
        bottom = f.values.ravel()
        x, residual = self._solve(-(bottom_block @ bottom))
        if residual > 1e-10:
            logger.warning('Dirichlet solve left a relative residual of %.3e', residual)
        values = self._assemble(x, bottom).reshape((self.levels + 1,) + self.grid.shape)
        return StripSolution(self.grid, self.times, values, {'kind': 'dirichlet', 'top': 'natural'},
                             residual, self.condition)

    def solve_inhomogeneous(self, source):
        """ A_h u = F on levels 1..Nt, u = 0 at t = 0. source has shape (Nt + 1, *grid.shape). """
        source = np.asarray(source, dtype=complex)
        if source.shape != (self.levels + 1,) + self.grid.shape:
            raise GridError('source must have shape {}, got {}'.format((self.levels + 1,) + self.grid.shape,
                                                                      source.shape))
        late = self.times > 0.5 * self.height
        if np.abs(source[late]).max(initial=0.0) > 0:
            logger.warning('source is not supported in t <= T/2; the top boundary may pollute the solution')
        x, residual = self._solve(source[1:].reshape(-1))
        zeros = np.zeros(self.grid.size, dtype=complex)
        values = self._assemble(x, zeros).reshape((self.levels + 1,) + self.grid.shape)
        return StripSolution(self.grid, self.times, values, {'kind': 'inhomogeneous', 'top': 'natural'},
                             residual, self.condition)

    def conormal(self, bottom, first):
        """
        Lambda_h f = dt/2 A'_h u_0 - b (u_1 - u_0) / dt - 1/2 C_h u_1 + 1/2 K_h u_0, the t = 0 row
        of a_h. bottom and first are levels 0 and 1, flattened to (N^d, ...).
        """
        b = self.field.b.reshape((-1,) + (1,) * (bottom.ndim - 1))
        return (0.5 * self.dt * (self.aprime_matrix @ bottom) - b * (first - bottom) / self.dt
                - 0.5 * (self.cross_matrix @ first) + 0.5 * (self.skew_matrix @ bottom))

    def conormal_trace(self, solution):
        """ Lambda_h f for a Dirichlet solution u = E_h f. """
        p = self.grid.size
        values = self.conormal(solution.values[0].reshape(p), solution.values[1].reshape(p))
        return GridFunction(self.grid, values.reshape(self.grid.shape))

    def energy_form(self, u, v):
        """ a_h(u, v) on two strip solutions. """
        dt = self.dt
        p = self.grid.size
        uu = u.values.reshape(self.levels + 1, p)
        vv = np.conj(v.values.reshape(self.levels + 1, p))
        weights = np.ones(self.levels + 1)
        weights[[0, -1]] = 0.5
        aprime = _apply_levels(self.aprime_matrix, uu)
        total = dt * np.einsum('n,nm,nm->', weights, aprime, vv)
        b = self.field.b.ravel()
        total += np.sum(b * np.diff(uu, axis=0) * np.diff(vv, axis=0)) / dt
        cross = _apply_levels(self.cross_matrix, uu)
        total += 0.5 * (np.sum(cross[:-1] * vv[1:]) - np.sum(cross[1:] * vv[:-1]))
        total += 0.5 * (np.sum((self.skew_matrix @ uu[0]) * vv[0]) - np.sum((self.skew_matrix @ uu[-1]) * vv[-1]))
        return complex(total * self.grid.cell_volume)

    def trace_levels(self, boundary, count=2, chunk=32):
        """
        Levels 0..count-1 of the Dirichlet solutions for the columns of `boundary`
        (shape (N^d, m)), reusing the factorization. Returns shape (count, N^d, m).
        """
        _, bottom_block = self._blocks
        boundary = np.asarray(boundary, dtype=complex)
        p, m = boundary.shape
        out = np.empty((count, p, m), dtype=complex)
        for start in range(0, m, chunk):
            cols = slice(start, min(start + chunk, m))
            bottom = boundary[:, cols]
            rhs = -(bottom_block @ bottom)
            x = self.factor.solve(rhs)
            x = x + self.factor.solve(rhs - self._blocks[0] @ x)
            out[0, :, cols] = bottom
            out[1:, :, cols] = x[:(count - 1) * p].reshape(count - 1, p, -1)
        return out
