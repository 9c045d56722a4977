"""
Ellipticity and Lipschitz estimates of coefficient fields.

The direction set is a scrambled Sobol sample of the unit sphere in C^(d+1) together with the
canonical directions; at each node it is augmented with the extremal eigenvector of the
Hermitian part and the top singular pair, so both constants are exact up to rounding.
"""
import logging
from collections import namedtuple

import numpy as np
from scipy import stats
from scipy.stats import qmc

from utils import ConfigError, EllipticityError

logger = logging.getLogger(__name__)

Ellipticity = namedtuple('Ellipticity', 'nu1 nu2')

MIN_SAMPLES = 100


def sample_directions(size, samples=256, seed=0):
    """ Unit vectors in C^size: canonical directions followed by Sobol points mapped to the sphere. """
    m = int(np.ceil(np.log2(max(samples, MIN_SAMPLES))))
    sobol = qmc.Sobol(d=2 * size, scramble=True, seed=seed)
    points = np.clip(sobol.random_base2(m), 1e-12, 1.0 - 1e-12)
    gauss = stats.norm.ppf(points)
    eta = gauss[:, :size] + 1j * gauss[:, size:]
    eta /= np.linalg.norm(eta, axis=1, keepdims=True)
    return np.concatenate([np.eye(size, dtype=complex), eta])


def validate(field, samples=256, seed=0):
    """
    Estimate (nu1, nu2) of Re<A(x) eta, eta> >= nu1 |eta|^2, |<A(x) eta, zeta>| <= nu2 |eta||zeta|.
    Raises EllipticityError with the witness (node, eta) when nu1 <= 0.
    """
    if samples < MIN_SAMPLES:
        raise ConfigError('at least {} direction samples are required, got {}'.format(MIN_SAMPLES, samples))
    mats = field.node_matrices()
    eta = sample_directions(field.size, samples, seed)

    # sampled quadratic form, shape (nodes, directions)
    a_eta = np.einsum('pij,mj->pmi', mats, eta)
    forms = np.einsum('pmi,mi->pm', a_eta, eta.conj())
    sampled_re = forms.real
    half = eta.shape[0] // 2
    pairs = np.abs(np.einsum('pmi,mi->pm', a_eta[:, :half], eta[half:2 * half].conj()))

    hermitian = 0.5 * (mats + np.conj(np.swapaxes(mats, 1, 2)))
    eigvals, eigvecs = np.linalg.eigh(hermitian)
    exact_min = eigvals[:, 0]
    exact_max = np.linalg.svd(mats, compute_uv=False)[:, 0]

    node = int(np.argmin(exact_min))
    nu1 = float(min(exact_min[node], sampled_re.min()))
    nu2 = float(max(exact_max.max(), pairs.max(), np.abs(forms).max()))
    if nu1 <= 0:
        index = np.unravel_index(node, field.grid.shape)
        raise EllipticityError('not uniformly elliptic: Re<A(x)eta, eta> = {:.6g} at node {}'.format(nu1, index),
                               node=index, direction=eigvecs[node, :, 0], value=nu1)

    b_min = float(np.abs(field.b).min())
    if b_min < nu1 * (1.0 - 1e-10):
        logger.warning('|b| = %.6g falls below nu1 = %.6g', b_min, nu1)
    logger.debug('%s: nu1 = %.6g, nu2 = %.6g (sampled min %.6g)', field.name, nu1, nu2, sampled_re.min())
    return Ellipticity(nu1, nu2)


def lipschitz_estimate(field):
    """
    Sum over entries (i, j) of the largest adjacent-node difference quotient of a_ij,
    taken over all axes and periodic neighbours.
    """
    h = field.grid.spacing
    axes = range(2, 2 + field.grid.dimension)
    slopes = np.zeros(field.entries.shape[:2])
    for axis in axes:
        quotient = np.abs(np.roll(field.entries, -1, axis=axis) - field.entries) / h
        slopes = np.maximum(slopes, quotient.reshape(quotient.shape[:2] + (-1,)).max(axis=-1))
    # rounding noise of constant entries
    slopes[slopes < 1e-12] = 0.0
    return float(slopes.sum())
