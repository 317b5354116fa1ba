import numpy as np
import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from hlab.errors import ResolutionError
from hlab.riesz import gamma_form
from hlab.transport import (ConstantPotential, GaussianPotential, SpacetimeModel, TransportSolver, rho_apply,
                            shift_coefficients, solve_transport, transport_residual)

POINTS = [[0.4, 0.1, 0.0], [0.3, -0.1, 0.2], [-0.5, 0.2, 0.1]]


def test_free_operator_has_trivial_coefficients():
    table = solve_transport(SpacetimeModel.flat(3), np.zeros(3), max_k=3, points=POINTS)
    assert np.all(table.values[0] == 1)
    assert np.all(table.values[1:] == 0)


@pytest.mark.parametrize("mu", [0.7, -1.3])
def test_constant_potential_powers(mu):
    table = solve_transport(SpacetimeModel.flat(3, ConstantPotential(mu)), np.zeros(3), max_k=3, points=POINTS)
    for k in range(4):
        assert np.allclose(table.values[k].astype(float), (-mu) ** k, rtol=1e-12)


def test_table_lookup():
    table = solve_transport(SpacetimeModel.flat(2, ConstantPotential(2.0)), np.zeros(2), max_k=1, points=[[0.1, 0.0]])
    assert float(table[1, [0.1, 0.0]]) == pytest.approx(-2.0)
    with pytest.raises(KeyError):
        table.value(1, [0.2, 0.0])


@pytest.mark.parametrize("z", [0.3, -0.45])
def test_shift_consistency_gaussian(z):
    model = SpacetimeModel.flat(2, GaussianPotential())
    x = np.array([0.1, -0.2])
    pts = [[0.5, 0.1], [-0.3, 0.1]]
    direct = solve_transport(model.shifted(z), x, max_k=3, points=pts).values
    shifted = shift_coefficients(solve_transport(model, x, max_k=3, points=pts), z).values
    assert np.max(np.abs(direct - shifted)) < 1e-9


def test_diagonal_value_of_first_coefficient():
    # V^1 is -c at the base point for any potential
    model = SpacetimeModel.flat(3, GaussianPotential(amplitude=0.8, width=0.9))
    x = np.array([0.2, 0.1, -0.1])
    table = solve_transport(model, x, max_k=1, points=[x])
    assert float(table.values[1, 0]) == pytest.approx(-0.8 * np.exp(-(0.06) / 0.81), rel=1e-14)


def test_gaussian_derivatives_against_mpmath():
    pot = GaussianPotential(amplitude=0.5, width=0.8, center=[0.1, -0.2])
    y = np.array([[0.3, 0.25]], dtype=np.longdouble)
    f = lambda a, b: 0.5 * mp.exp(-((a - 0.1) ** 2 + (b + 0.2) ** 2) / mp.mpf(0.8) ** 2)
    for orders in [(0, 0), (1, 0), (0, 2), (2, 2), (3, 1), (0, 4)]:
        ref = mp.diff(f, (mp.mpf(0.3), mp.mpf(0.25)), orders)
        assert float(pot.derivative(orders, y)[0]) == pytest.approx(float(ref), rel=1e-13, abs=1e-16)
    with pytest.raises(ValueError):
        pot.derivative((3, 2), y)


def test_rho_on_gamma():
    model = SpacetimeModel.flat(4)
    x = np.array([0.1, 0.0, 0.2, -0.1])
    Y = np.array([[0.6, 0.1, 0.0, 0.3], [0.0, 0.5, 0.2, -0.1]])
    out = rho_apply(model, x, lambda P: gamma_form(P - x), Y)
    assert np.allclose(out.astype(float), -4 * gamma_form(Y - x), atol=1e-12)


def test_rho_on_constant_vanishes():
    model = SpacetimeModel.flat(2)
    out = rho_apply(model, np.zeros(2), lambda P: np.full(P.shape[:-1], 3.0), np.array([[0.3, 0.1]]))
    assert np.all(np.abs(out) < 1e-14)


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_rho_is_linear(a, b):
    model = SpacetimeModel.flat(2)
    x = np.zeros(2)
    Y = np.array([[0.3, 0.1], [-0.2, 0.4]])
    f = lambda P: np.sin(P[..., 0]) * P[..., 1]
    g = lambda P: gamma_form(P) ** 2
    lhs = rho_apply(model, x, lambda P: a * f(P) + b * g(P), Y)
    rhs = a * rho_apply(model, x, f, Y) + b * rho_apply(model, x, g, Y)
    assert np.allclose(lhs.astype(float), rhs.astype(float), atol=1e-14)


def test_first_transport_equation_via_rho():
    # checks the ray integral against the coordinate form of rho: (rho - 2) V^1 = 2 c
    model = SpacetimeModel.flat(3, GaussianPotential())
    x = np.zeros(3)
    solver = TransportSolver(model, x)
    Y = np.array([[0.5, 0.2, 0.1], [0.3, 0.4, -0.2]])
    res = rho_apply(model, x, lambda P: solver.V(1, P), Y) - 2 * solver.V(1, Y) \
        - 2 * model.potential(Y.astype(np.longdouble))
    assert np.max(np.abs(res)) < 1e-7


@pytest.mark.parametrize("k, samples", [(1, 5), (2, 5), (3, 3)])
def test_transport_residual(k, samples):
    model = SpacetimeModel.flat(2, GaussianPotential())
    res = transport_residual(model, np.zeros(2), k, rays=[[0.5, 0.2]], samples=samples)
    assert res < 1e-6


def test_stencil_leaving_box_is_reported():
    model = SpacetimeModel.flat(2, GaussianPotential(), box_halfwidth=0.5)
    with pytest.raises(ResolutionError):
        solve_transport(model, np.zeros(2), max_k=2, points=[[0.49, 0.0]])
