import numpy as np
import pytest

from coeff import adjoint
from grid import GridFunction, inner, l2_norm, sobolev_norm
from solver import (SchemeSymbol, StripDiscretization, StripSolution, aprime_apply, assemble_operator_matrices,
                    assemble_operator_matrix, dn_apply, dn_weak, poisson_apply, q_apply, s1_apply, s1_cross_check,
                    separable_source, solve_dirichlet, strip_gradient_norm, u1_compute)
from symbol import principal_symbol
from utils import GridError

from conftest import RUNNING_MU


def test_default_strip(running_family, grid32):
    strip = StripDiscretization.for_field(running_family.field(grid32))
    assert strip.height == pytest.approx(8 * np.pi)
    assert strip.levels == 128
    assert strip.times[-1] == pytest.approx(strip.height)
    with pytest.raises(GridError):
        StripDiscretization(running_family.field(grid32), 1.0, 3)


def test_dirichlet_solution_of_identity(identity_family, grid32):
    strip = StripDiscretization.for_field(identity_family.field(grid32))
    f = GridFunction.mode(grid32, 1)
    solution = solve_dirichlet(strip, f)
    assert solution.residual < 1e-10
    assert np.isfinite(solution.condition)
    assert np.allclose(solution.level(0).values, f.values)
    assert np.allclose(solution.values[-1], 0.0)
    exact = np.exp(-strip.times)[:, None] * f.values
    assert np.abs(solution.values - exact).max() < 1e-2


def test_running_example_boundary_operators(running_family, grid64):
    field = running_family.field(grid64)
    strip = StripDiscretization.for_field(field)
    f = GridFunction.mode(grid64, 1)
    modal = {label: inner(op, f) / inner(f, f) for label, op in
             (('P', poisson_apply(strip, f)), ('Lambda', dn_apply(strip, f)), ('Q', q_apply(strip, f)))}
    assert modal['P'] == pytest.approx(-1j * RUNNING_MU, rel=2e-2)
    assert modal['Lambda'] == pytest.approx(complex(np.sqrt(1.84), 0.1), rel=2e-2)
    assert modal['Q'] == pytest.approx(complex(np.sqrt(1.84), -0.4), rel=2e-2)


def test_poisson_operator_converges_at_second_order(running_family, grid32, grid64):
    errors = []
    for grid in (grid32, grid64):
        strip = StripDiscretization.for_field(running_family.field(grid))
        f = GridFunction.mode(grid, 1)
        errors.append(l2_norm(poisson_apply(strip, f) - (-1j * RUNNING_MU) * f) / l2_norm(f))
    # first order would give a ratio of 2
    assert errors[1] < errors[0] / 2.5


def test_aprime_stencil_of_identity(identity_family, grid32):
    field = identity_family.field(grid32)
    h = grid32.spacing
    for k in (1, 4, 9):
        f = GridFunction.mode(grid32, k)
        symbol = (2.0 * np.sin(0.5 * k * h) / h) ** 2
        assert np.allclose(aprime_apply(field, f).values, symbol * f.values)


def test_inhomogeneous_solve_rejects_bad_shapes(running_family, grid32):
    strip = StripDiscretization.for_field(running_family.field(grid32))
    with pytest.raises(GridError):
        strip.solve_inhomogeneous(np.zeros((strip.levels, 32)))


def test_separable_source_round_trip(lipschitz_family, grid64):
    field = lipschitz_family.field(grid64)
    strip = StripDiscretization.for_field(field)
    centre, width = 0.25 * strip.height, strip.height / 24.0

    def g(t):
        return np.exp(-0.5 * ((t - centre) / width) ** 2)

    def dg(t):
        return -(t - centre) / width ** 2 * g(t)

    def d2g(t):
        return (((t - centre) / width ** 2) ** 2 - 1.0 / width ** 2) * g(t)

    f = GridFunction.mode(grid64, 1)
    source = separable_source(field, f, g, dg, d2g, strip.times)
    source[strip.times > 0.5 * strip.height] = 0.0
    solution = strip.solve_inhomogeneous(source)
    exact = g(strip.times)[:, None] * f.values
    assert np.abs(solution.values - exact).max() / np.abs(exact).max() < 5e-2


def test_weak_and_trace_dirichlet_to_neumann(lipschitz_family, grid64):
    field = lipschitz_family.field(grid64)
    strip = StripDiscretization.for_field(field)
    f, g = GridFunction.mode(grid64, 1), GridFunction.mode(grid64, 1) + 0.5 * GridFunction.mode(grid64, -1)
    weak = dn_weak(strip, f, g)
    trace = inner(dn_apply(strip, f), g)
    assert abs(weak - trace) / abs(trace) < 1e-9


def test_green_identity_with_adjoint(lipschitz_family, grid64):
    field = lipschitz_family.field(grid64)
    strip = StripDiscretization.for_field(field)
    strip_adjoint = StripDiscretization.for_field(adjoint(field))
    f, g = GridFunction.mode(grid64, 1), GridFunction.mode(grid64, 1) + GridFunction.mode(grid64, -1)
    forward = dn_weak(strip, f, g)
    backward = np.conj(dn_weak(strip_adjoint, g, f))
    assert abs(forward - backward) / (sobolev_norm(f, 0.5) * sobolev_norm(g, 0.5)) < 1e-9


def test_energy_of_identity_extension(identity_family, grid64):
    strip = StripDiscretization.for_field(identity_family.field(grid64))
    f = GridFunction.mode(grid64, 1)
    energy = strip_gradient_norm(strip.solve_dirichlet(f)) ** 2
    # <|D| f, f> = 2 pi
    assert energy == pytest.approx(2 * np.pi, rel=2e-2)


def test_operator_matrices(running_family, grid16):
    strip = StripDiscretization.for_field(running_family.field(grid16))
    matrices = assemble_operator_matrices(strip)
    f = GridFunction.mode(grid16, 1) + GridFunction.mode(grid16, -3)
    assert np.allclose(matrices['P'].apply(f).values, poisson_apply(strip, f).values, atol=1e-8)
    assert np.allclose(matrices['Lambda'].apply(f).values, dn_apply(strip, f).values, atol=1e-8)
    assert np.allclose(matrices['Q'].apply(f).values, q_apply(strip, f).values, atol=1e-8)
    eigenvalues = assemble_operator_matrix(strip, 'P').eigenvalues()
    assert eigenvalues.real.min() > -1e-8
    with pytest.raises(ValueError):
        assemble_operator_matrix(strip, 'S')


def test_operator_matrices_are_limited_in_size(running_family):
    from grid import TorusGrid

    strip = StripDiscretization.for_field(running_family.field(TorusGrid(1, 2 * np.pi, 1024)), levels=8)
    with pytest.raises(GridError):
        assemble_operator_matrices(strip)


def test_remainders_of_identity(identity_family, grid64):
    field = identity_family.field(grid64)
    strip = StripDiscretization.for_field(field)
    h = GridFunction.mode(grid64, 1)
    # E_A h = U_0(t) h exactly for the identity, so both remainders only carry discretization error
    assert l2_norm(s1_apply(strip, h)) / l2_norm(h) < 2e-2
    assert s1_cross_check(strip, h) < 5e-2
    remainder = u1_compute(strip, h, times=[0.5, 1.0, 3.0])
    assert remainder.values.shape == (3, 64)
    assert np.abs(remainder.values[:2]).max() < 2e-2
    # the cut-off vanishes from t = 2 on
    assert np.allclose(remainder.values[2], strip.solve_dirichlet(h).at_time(3.0).values)


def test_conormal_row_matches_the_form_for_any_extension(lipschitz_family, grid32):
    field = lipschitz_family.field(grid32)
    strip = StripDiscretization.for_field(field)
    f = GridFunction.mode(grid32, 1) + 0.5 * GridFunction.mode(grid32, -3)
    g = GridFunction.mode(grid32, 2) - 0.25j * GridFunction.mode(grid32, 5)
    u = strip.solve_dirichlet(f)
    # E_A f satisfies the interior rows, so only the values of v at t = 0 matter
    damped = StripSolution(grid32, strip.times, np.exp(-strip.times)[:, None] * g.values)
    trace = inner(dn_apply(strip, f, u), g)
    assert abs(strip.energy_form(u, damped) - trace) / abs(trace) < 1e-9


def test_adjoint_relation_is_exact(lipschitz_family, grid32):
    field = lipschitz_family.field(grid32)
    strip = StripDiscretization.for_field(field)
    strip_adjoint = StripDiscretization.for_field(adjoint(field))
    f = GridFunction.mode(grid32, 1) + 0.5 * GridFunction.mode(grid32, -3)
    g = GridFunction.mode(grid32, 2) - 0.25j * GridFunction.mode(grid32, 5)
    left = inner(q_apply(strip, f) * field.b, g)
    right = inner(f, poisson_apply(strip_adjoint, g) * np.conj(field.b))
    assert abs(left - right) / (sobolev_norm(f, 1.0) * sobolev_norm(g, 1.0)) < 1e-9


def test_top_row_keeps_constants(lipschitz_family, grid32):
    strip = StripDiscretization.for_field(lipschitz_family.field(grid32))
    one = GridFunction(grid32, np.ones(grid32.shape))
    solution = strip.solve_dirichlet(one)
    assert np.allclose(solution.values, 1.0)
    assert strip.describe()['top'] == 'natural'
    assert l2_norm(poisson_apply(strip, one, solution)) < 1e-9


def test_scheme_symbol_of_running_example(running_family, grid32):
    field = running_family.field(grid32)
    strip = StripDiscretization.for_field(field)
    scheme = SchemeSymbol(strip)
    modes = list(range(1, 16))
    assert max(scheme.root_modulus(modes)) < 1.0
    # S_{A,1} built from the scheme's own symbol vanishes for constant coefficients
    for k in (1, 5, 12, -7):
        h = GridFunction.mode(grid32, k)
        assert l2_norm(s1_apply(strip, h, scheme.trace, check=False)) / l2_norm(h) < 1e-8
    gaps = scheme.relative_gap(principal_symbol(field), modes)
    assert len(gaps) == len(modes)
    assert gaps[0] < 2e-2 and gaps[0] < gaps[-1]


def test_propagation_symbol_reproduces_the_levels(running_family, grid32):
    strip = StripDiscretization.for_field(running_family.field(grid32))
    scheme = SchemeSymbol(strip)
    h = GridFunction.mode(grid32, 3)
    remainder = u1_compute(strip, h, mu=scheme.propagation)
    # below t = 1 the cut-off is one and E_A h = U_0(t) h level by level
    early = strip.times < 1.0
    assert np.abs(remainder.values[early]).max() < 1e-8


def test_scheme_symbol_of_lipschitz_field(lipschitz_family, grid32):
    scheme = SchemeSymbol(StripDiscretization.for_field(lipschitz_family.field(grid32)))
    modes = list(range(1, 16))
    assert max(scheme.root_modulus(modes)) < 1.0
    assert scheme.trace.values.shape == grid32.shape + grid32.shape
    assert np.all(np.isfinite(scheme.propagation.values))
