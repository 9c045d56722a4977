import numpy as np

from .field import CoefficientField


def adjoint_entries(entries):
    return np.conj(np.swapaxes(entries, 0, 1))


def closure_entries(entries):
    """
    Entry arrays of the matrices M and N with mu(M) = lambda_A and mu(N) = q_A:
        M = [[|b|^2 a_ij - conj(b) (r2)_i (r1)_j, conj(b) r1], [-conj(b) r2, conj(b)]]
        N = [[A', -r1], [-r2, b]]
    """
    b = entries[-1, -1]
    r1 = entries[:-1, -1]
    r2 = entries[-1, :-1]
    bbar = np.conj(b)

    m = np.empty_like(entries)
    m[:-1, :-1] = np.abs(b) ** 2 * entries[:-1, :-1] - bbar * r2[:, None] * r1[None, :]
    m[:-1, -1] = bbar * r1
    m[-1, :-1] = -bbar * r2
    m[-1, -1] = bbar

    n = np.array(entries, copy=True)
    n[:-1, -1] = -r1
    n[-1, :-1] = -r2
    return m, n


def adjoint(field):
    """ Pointwise conjugate transpose A*. """
    sampler = None
    if field.sampler is not None:
        sampler = lambda *coords: adjoint_entries(field.sampler(*coords))
    return CoefficientField(field.grid, adjoint_entries(field.entries), sampler=sampler,
                            name='{}*'.format(field.name))


def phi_closure_matrices(field, validate=True):
    """ The pair (M, N); both are checked for uniform ellipticity unless validate is False. """
    m, n = closure_entries(field.entries)
    m_sampler = n_sampler = None
    if field.sampler is not None:
        m_sampler = lambda *coords: closure_entries(np.asarray(field.sampler(*coords), dtype=complex))[0]
        n_sampler = lambda *coords: closure_entries(np.asarray(field.sampler(*coords), dtype=complex))[1]
    closure_m = CoefficientField(field.grid, m, sampler=m_sampler, name='M({})'.format(field.name))
    closure_n = CoefficientField(field.grid, n, sampler=n_sampler, name='N({})'.format(field.name))
    if validate:
        closure_m.ellipticity
        closure_n.ellipticity
    return closure_m, closure_n
