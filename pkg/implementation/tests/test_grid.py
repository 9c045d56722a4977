import numpy as np
import pytest

from grid import (GridFunction, TorusGrid, derivative, divergence, fractional_multiplier, from_spectral, has_zero_mean,
                  inner, l2_norm, laplacian_power, sobolev_norm, to_spectral)
from utils import GridError, GridMismatchError, ZeroModeError


@pytest.mark.parametrize('points', [7, 6, 9])
def test_grid_rejects_bad_points(points):
    with pytest.raises(GridError):
        TorusGrid(1, 2 * np.pi, points)


def test_grid_rejects_bad_dimension_and_period():
    with pytest.raises(GridError):
        TorusGrid(3, 2 * np.pi, 16)
    with pytest.raises(GridError):
        TorusGrid(1, -1.0, 16)


def test_lattice_layout(grid16):
    lattice = grid16.lattice
    assert lattice.zero_index == (0,)
    assert lattice.axis_xi[1] == pytest.approx(1.0)
    assert lattice.axis_xi[-1] == pytest.approx(-1.0)
    assert lattice.axis_xi.min() == pytest.approx(-8.0)
    assert lattice.index_of(-1) == (15,)
    assert not lattice.nonzero[0] and lattice.nonzero.sum() == 15


def test_grid_function_is_immutable(grid16):
    f = GridFunction.mode(grid16, 2)
    with pytest.raises(ValueError):
        f.values[0] = 0.0


def test_grid_mismatch(grid16, grid32):
    with pytest.raises(GridMismatchError):
        GridFunction.mode(grid16, 1) + GridFunction.mode(grid32, 1)
    with pytest.raises(GridMismatchError):
        GridFunction(grid16, np.zeros(10))


def test_parseval(grid32):
    rng = np.random.default_rng(0)
    f = GridFunction(grid32, rng.standard_normal(32) + 1j * rng.standard_normal(32))
    g = GridFunction(grid32, rng.standard_normal(32))
    assert inner(f, g, spectral=True) == pytest.approx(inner(f, g), rel=1e-12)
    assert np.allclose(from_spectral(grid32, f.spectral).values, f.values)
    assert np.allclose(to_spectral(g), np.fft.fft(g.values, norm='ortho'))


@pytest.mark.parametrize('k', [1, 3, 7])
@pytest.mark.parametrize('s', [-1.0, 0.0, 0.5, 1.0, 2.0])
def test_sobolev_norm_of_modes(grid32, k, s):
    f = GridFunction.mode(grid32, k)
    expected = np.sqrt(2 * np.pi) * (1.0 + k ** 2) ** (s / 2)
    assert sobolev_norm(f, s) == pytest.approx(expected, rel=1e-12)
    assert sobolev_norm(f, s, homogeneous=True) == pytest.approx(np.sqrt(2 * np.pi) * k ** s, rel=1e-12)


def test_sobolev_norm_range_and_zero_mode(grid16):
    constant = GridFunction.constant(grid16, 1.0)
    assert has_zero_mean(GridFunction.mode(grid16, 1))
    assert not has_zero_mean(constant)
    with pytest.raises(ZeroModeError):
        sobolev_norm(constant, -0.5, homogeneous=True)
    with pytest.raises(GridError):
        sobolev_norm(constant, 2.5)


def test_derivatives_of_modes():
    grid = TorusGrid(2, 2 * np.pi, 16)
    f = GridFunction.mode(grid, 2, -3)
    assert np.allclose(derivative(f, 0).values, 2j * f.values)
    assert np.allclose(derivative(f, 1).values, -3j * f.values)
    assert np.allclose(divergence([f, f]).values, -1j * f.values)
    with pytest.raises(GridError):
        derivative(f, 2)


def test_fractional_powers(grid32):
    f = GridFunction.mode(grid32, 4) + 2.0 * GridFunction.mode(grid32, -1)
    expected = 4.0 * GridFunction.mode(grid32, 4) + 2.0 * GridFunction.mode(grid32, -1)
    assert np.allclose(laplacian_power(f, 1.0).values, expected.values)
    # (-Delta)^(-1/2) inverts (-Delta)^(1/2) on zero-mean functions
    assert np.allclose(laplacian_power(laplacian_power(f, -1.0), 1.0).values, f.values)
    with pytest.raises(ZeroModeError):
        fractional_multiplier(f + 1.0, lambda xi: 1.0 / np.abs(xi), annihilates_mean=True)
    assert l2_norm(f) == pytest.approx(np.sqrt(2 * np.pi * 5))


def test_derivative_commutes_with_multipliers(grid32):
    f = GridFunction.mode(grid32, 3) - 0.5j * GridFunction.mode(grid32, -6) + 0.25 * GridFunction.mode(grid32, 0)

    def bessel(xi):
        return (1.0 + xi ** 2) ** 0.25

    left = derivative(fractional_multiplier(f, bessel), 0)
    right = fractional_multiplier(derivative(f, 0), bessel)
    assert np.allclose(left.values, right.values, atol=1e-12)
    assert not np.allclose(left.values, 0.0)
