import numpy as np

from symbol import principal_symbol
from utils import GridError, loglog_slope


def kernel_slice(weight, field, node, t, mu=None):
    """
    G_p(x, y, t) = (2 pi)^(-d/2) sum_k p(x, xi_k, t) exp(i t mu_A(x, xi_k)) exp(i y.xi_k) dxi^d
    at the frozen node x, for periodic offsets y in [-L/2, L/2)^d (fft order).

    Returns (offsets, values): offsets is a tuple of coordinate arrays.
    """
    if t <= 0:
        raise GridError('kernel slices need t > 0, got {}'.format(t))
    grid = field.grid
    mu = principal_symbol(field) if mu is None else mu
    node = tuple(node)
    symbol = weight(t)[node] * np.exp(1j * t * mu.values[node])
    d = grid.dimension
    scale = (2.0 * np.pi) ** (-d / 2.0) * grid.lattice.spacing ** d * grid.size
    values = scale * np.fft.ifftn(symbol)
    offsets = np.meshgrid(*([grid.centered_offsets()] * d), indexing='ij')
    return tuple(offsets), values


def kernel_mass(grid, values):
    """ (2 pi)^(-d/2) h^d sum_y G(x, y, t); equals 1 for the unit weight. """
    return complex((2.0 * np.pi) ** (-grid.dimension / 2.0) * grid.cell_volume * values.sum())


def kernel_apply(grid, values, h, node):
    """ (2 pi)^(-d/2) h^d sum_j G(x, y_j, t) h(x - y_j) """
    node = np.asarray(node)
    index = np.meshgrid(*([np.fft.fftfreq(grid.points, d=1.0 / grid.points).astype(int)] * grid.dimension),
                        indexing='ij')
    shifted = tuple(np.mod(node[a] - index[a], grid.points) for a in range(grid.dimension))
    return complex((2.0 * np.pi) ** (-grid.dimension / 2.0) * grid.cell_volume * np.sum(values * h.values[shifted]))


def poisson_kernel_reference(y, t, period):
    """ Periodized Poisson kernel of the half-line, (1/L) sinh(a) / (cosh(a) - cos(2 pi y / L)), a = 2 pi t / L. """
    a = 2.0 * np.pi * t / period
    return np.sinh(a) / (np.cosh(a) - np.cos(2.0 * np.pi * np.asarray(y) / period)) / period


def decay_profile(offsets, values, t, period):
    """
    Outer envelope max_{|y'| >= |y|} |G(x, y', t)| on t <= |y| <= L/4, sorted by |y|.
    Returns (radius, magnitude, envelope).
    """
    radius = np.sqrt(sum(o ** 2 for o in offsets)).ravel()
    magnitude = np.abs(values).ravel()
    keep = (radius >= t) & (radius <= 0.25 * period)
    order = np.argsort(radius[keep], kind='stable')
    radius, magnitude = radius[keep][order], magnitude[keep][order]
    envelope = np.maximum.accumulate(magnitude[::-1])[::-1]
    return radius, magnitude, envelope


def fit_decay(offsets, values, t, period):
    """ Least-squares slope of log envelope against log(1 + |y|/t), with the fitted envelope. """
    radius, magnitude, envelope = decay_profile(offsets, values, t, period)
    if radius.size < 2:
        return {'slope': float('nan'), 'radius': radius, 'magnitude': magnitude, 'envelope': envelope,
                'fitted': envelope}
    scaled = 1.0 + radius / t
    slope = loglog_slope(scaled, envelope)
    positive = envelope > 0
    intercept = np.mean(np.log(envelope[positive]) - slope * np.log(scaled[positive])) if positive.any() else 0.0
    fitted = np.exp(intercept) * scaled ** slope
    return {'slope': slope, 'radius': radius, 'magnitude': magnitude, 'envelope': envelope, 'fitted': fitted}
