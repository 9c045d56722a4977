"""
Weights p(x, xi, t) of the operators
    (G_p(t) h)(x) = (2 pi)^(-d/2) int p(x, xi, t) exp(i t mu_A(x, xi) + i x.xi) h_hat(xi) dxi.

A weight may carry one of two hypothesis tags, checked on the k = 0 term:
    'G_p.1': sup_{0 < t < T} (1 + t|xi|)^(-l) |p| < inf       (uniform bound on (0, T))
    'G_p.2': sup_{t > 0} (t|xi|)^(-l) (1 + t|xi|)^(-g) |p| < inf   (square-function bound)
g is a polynomial growth absorbed by |exp(i t mu_A)| <= exp(-C' t |xi|).
"""
import logging

import numpy as np

from base.base_report import EstimateReport
from grid import GridFunction, derivative
from symbol import principal_symbol, symbol_x_gradient, x_field, xi_field
from utils import HypothesisError

logger = logging.getLogger(__name__)

TAGS = (None, 'G_p.1', 'G_p.2')


class WeightFamily:
    """
    Evaluator t -> p(., ., t) on grid x lattice together with its hypothesis data.
    Values at xi = 0 that are undefined are replaced by 0.
    """
    def __init__(self, name, evaluator, field, tag=None, exponent=0.0, growth=0.0, horizon=np.inf,
                 description=''):
        if tag not in TAGS:
            raise HypothesisError('unknown hypothesis tag {!r}'.format(tag))
        self.name = name
        self.evaluator = evaluator
        self.field = field
        self.tag = tag
        self.exponent = float(exponent)
        self.growth = float(growth)
        self.horizon = float(horizon)
        self.description = description

    @property
    def grid(self):
        return self.field.grid

    def __call__(self, t):
        grid = self.grid
        with np.errstate(divide='ignore', invalid='ignore'):
            values = np.array(np.broadcast_to(self.evaluator(t), grid.shape + grid.shape), dtype=complex)
        values[~np.isfinite(values)] = 0.0
        return values

    def require_tag(self, tag):
        if self.tag != tag:
            raise HypothesisError(
                'weight {!r} is tagged {!r}; this estimate needs a weight satisfying the {} hypothesis '
                '(with l > 0)'.format(self.name, self.tag, tag))
        if tag == 'G_p.2' and self.exponent <= 0:
            raise HypothesisError('weight {!r} has exponent l = {} but l > 0 is required'.format(self.name, self.exponent))

    def describe(self):
        return {'name': self.name, 'tag': self.tag, 'exponent': self.exponent, 'growth': self.growth,
                'horizon': self.horizon, 'description': self.description}

    def __repr__(self):
        return 'WeightFamily(name={!r}, tag={!r})'.format(self.name, self.tag)


def _norm(grid):
    return xi_field(grid, grid.lattice.norm)


def _x_gradient_mu(field):
    return [table.values for table in symbol_x_gradient(principal_symbol(field))]


def unit_weight(field):
    return WeightFamily('unit', lambda t: 1.0, field, tag='G_p.1', exponent=0.0, description='p = 1')


def t_xi_weight(field, power=1.0):
    norm = _norm(field.grid)
    return WeightFamily('t|xi|^{:g}'.format(power), lambda t: (t * norm) ** power, field,
                        tag='G_p.2', exponent=power, description='p = (t|xi|)^{:g}'.format(power))


def time_derivative_weight(field, order=1):
    """ (i t mu_A)^k, so that t^k (d/dt)^k U_0(t) = G_p(t). """
    mu = principal_symbol(field).values
    return WeightFamily('(it mu)^{}'.format(order), lambda t: (1j * t * mu) ** order, field,
                        tag='G_p.2', exponent=order, description='p = (i t mu_A)^{}'.format(order))


def pi_prime_weight(field, component=0):
    """ Component of i t A' grad_x mu_A. """
    d = field.grid.dimension
    grad = _x_gradient_mu(field)
    aprime = field.aprime
    vector = sum(x_field(field.grid, aprime[component, j]) * grad[j] for j in range(d))
    return WeightFamily('pi-prime', lambda t: 1j * t * vector, field, tag='G_p.2', exponent=1.0,
                        description="p = i t (A' grad_x mu_A)_{}".format(component))


def pi_drift_weight(field):
    """ i t (r1 + r2).grad_x mu_A, the differentiated part of the last component of Pi. """
    grid = field.grid
    grad = _x_gradient_mu(field)
    r = field.r1 + field.r2
    scalar = sum(x_field(grid, r[j]) * grad[j] for j in range(grid.dimension))
    return WeightFamily('pi-drift', lambda t: 1j * t * scalar, field, tag='G_p.2', exponent=1.0,
                        description='p = i t (r1 + r2).grad_x mu_A')


def divergence_r1_weight(field):
    """ div_x r1; a bounded multiplier without decay, so it carries no square-function tag. """
    values = x_field(field.grid, field.divergence_r1)
    return WeightFamily('div-r1', lambda t: values, field, tag=None, description='p = div_x r1')


def _zeta_parts(field):
    """ zeta = zeta0 + t zeta1 with zeta0 = i(r1 + r2).grad mu + i a'.xi, zeta1 = -(A'xi).grad mu """
    grid = field.grid
    d = grid.dimension
    grad = _x_gradient_mu(field)
    xi = [xi_field(grid, k) for k in grid.lattice.xi]
    r = field.r1 + field.r2
    aprime = field.aprime
    # a'_j = sum_k d_k a_kj
    div_aprime = [sum(derivative(GridFunction(grid, aprime[k, j]), k).values for k in range(d)) for j in range(d)]
    zeta0 = 1j * sum(x_field(grid, r[j]) * grad[j] for j in range(d)) \
        + 1j * sum(x_field(grid, div_aprime[j]) * xi[j] for j in range(d))
    aprime_xi = [sum(x_field(grid, aprime[i, j]) * xi[j] for j in range(d)) for i in range(d)]
    zeta1 = -sum(aprime_xi[i] * grad[i] for i in range(d))
    return zeta0, zeta1


def zeta_weight(field):
    """ t zeta(x, xi, t). """
    zeta0, zeta1 = _zeta_parts(field)
    return WeightFamily('zeta', lambda t: t * (zeta0 + t * zeta1), field, tag='G_p.2', exponent=1.0, growth=1.0,
                        description='p = t zeta, zeta = i(r1 + r2 + i t A\'xi).grad_x mu_A + i a\'.xi')


def zeta_tilde_weight(field):
    """ t^(1/2) (zeta |xi|^(1/2) / (i mu_A) + d_t zeta |xi|^(1/2) / mu_A^2). """
    zeta0, zeta1 = _zeta_parts(field)
    mu = principal_symbol(field).values
    root = np.sqrt(_norm(field.grid))

    def evaluate(t):
        return np.sqrt(t) * ((zeta0 + t * zeta1) * root / (1j * mu) + zeta1 * root / mu ** 2)
    return WeightFamily('zeta-tilde', evaluate, field, tag='G_p.2', exponent=0.5, growth=1.0,
                        description='p = t^(1/2) zeta~')


def bessel_weight(field):
    """ t^(1/2) <xi>^(1/2), for U_0(t) = t^(-1/2) G_p (I - Delta)^(-1/4). """
    bracket = np.sqrt(np.sqrt(1.0 + _norm(field.grid) ** 2))
    return WeightFamily('bessel', lambda t: np.sqrt(t) * bracket, field, tag='G_p.1', exponent=0.5, horizon=1.0,
                        description='p = t^(1/2) <xi>^(1/2)')


def q_weight(field, epsilon=0.5, component=0):
    """ i (1 + |xi|^2)^(-(1 + eps)/2) (1 + i t mu_A) (A' grad_x mu_A) """
    grid = field.grid
    d = grid.dimension
    grad = _x_gradient_mu(field)
    mu = principal_symbol(field).values
    vector = sum(x_field(grid, field.aprime[component, j]) * grad[j] for j in range(d))
    damping = (1.0 + _norm(grid) ** 2) ** (-(1.0 + epsilon) / 2.0)
    return WeightFamily('q-weight', lambda t: 1j * damping * (1.0 + 1j * t * mu) * vector, field,
                        tag='G_p.1', exponent=1.0, horizon=2.0,
                        description='p = i<xi>^(-(1+eps)) (1 + i t mu_A) A\'grad_x mu_A, eps = {:g}'.format(epsilon))


WEIGHTS = {
    'unit': unit_weight,
    't-xi': t_xi_weight,
    'sqrt-t-xi': lambda field: t_xi_weight(field, 0.5),
    'dt1': lambda field: time_derivative_weight(field, 1),
    'dt2': lambda field: time_derivative_weight(field, 2),
    'pi-prime': pi_prime_weight,
    'pi-drift': pi_drift_weight,
    'div-r1': divergence_r1_weight,
    'zeta': zeta_weight,
    'zeta-tilde': zeta_tilde_weight,
    'bessel': bessel_weight,
    'q-weight': q_weight,
}


def weight_from_tag(tag, field, **kwargs):
    try:
        builder = WEIGHTS[tag]
    except KeyError:
        raise HypothesisError('unknown weight {!r}; expected one of {}'.format(tag, sorted(WEIGHTS)))
    return builder(field, **kwargs)


def check_weight_hypothesis(weight, times):
    """ Sampled k = 0 term of the tagged hypothesis; untagged weights are refused. """
    if weight.tag is None:
        raise HypothesisError('weight {!r} carries no hypothesis tag'.format(weight.name))
    grid = weight.grid
    norm = _norm(grid)
    nonzero = np.broadcast_to(xi_field(grid, grid.lattice.nonzero), grid.shape + grid.shape)
    sup = 0.0
    used = []
    for t in times:
        if weight.tag == 'G_p.1' and t >= weight.horizon:
            continue
        scaled = t * norm
        values = np.abs(weight(t))
        with np.errstate(divide='ignore', invalid='ignore'):
            if weight.tag == 'G_p.1':
                bound = values * (1.0 + scaled) ** (-weight.exponent)
            else:
                bound = values * scaled ** (-weight.exponent) * (1.0 + scaled) ** (-weight.growth)
        bound = np.broadcast_to(bound, nonzero.shape)[nonzero]
        sup = max(sup, float(np.nanmax(bound)))
        used.append(float(t))

    report = EstimateReport(
        name='hypothesis:{}'.format(weight.name),
        statement='k = 0 term of the {} hypothesis'.format(weight.tag),
        grid=grid.describe(),
        constants={'sup': sup},
        samples=used,
        tolerance={'finite_bound': 1e8},
        notes=[weight.description],
    )
    report.require('sampled supremum', sup, '<', 1e8)
    return report
