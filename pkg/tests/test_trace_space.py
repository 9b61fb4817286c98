"""Tests for the Fourier-Sobolev trace calculus and arc index maps"""

import warnings

import numpy as np
import pytest

from krein_layers.boundary.geometry import ArcSpec, CurveParam, composite_arc_grid, discretize_curve
from krein_layers.core.exceptions import AliasingWarning, TraceOrderError
from krein_layers.core.trace_space import (
    ArcIndexSet,
    TraceVector,
    arc_include,
    arc_restrict,
    duality_pairing,
    grid_to_modes,
    lambda_power,
    modes_to_grid,
    sobolev_norm,
)


def _random_vector(rng, n_max=6, order=0.0, radius=1.0):
    coeffs = rng.standard_normal(2 * n_max + 1) + 1j * rng.standard_normal(2 * n_max + 1)
    return TraceVector(coeffs=coeffs, sobolev_order=order, radius=radius)


def test_trace_vector_validation():
    with pytest.raises(ValueError, match="2N\\+1"):
        TraceVector(coeffs=np.ones(4))
    with pytest.raises(ValueError, match="finite"):
        TraceVector(coeffs=np.array([0.0, np.nan, 0.0]))


def test_lambda_power_examples(rng):
    v = _random_vector(rng, n_max=4)
    assert np.array_equal(lambda_power(v, 0.0).coeffs, v.coeffs), "r = 0 must be the identity"
    scaled = lambda_power(v, 2.0)
    assert scaled.coefficient(0) == v.coefficient(0), "Mode 0 is unchanged for every r"
    assert abs(scaled.coefficient(3) - 10.0 * v.coefficient(3)) <= 1e-13, "c_3 should be multiplied by 10"
    assert scaled.sobolev_order == -2.0


def test_lambda_power_inverts(rng):
    v = _random_vector(rng, order=0.5, radius=1.7)
    back = lambda_power(lambda_power(v, 1.3), -1.3)
    assert np.max(np.abs(back.coeffs - v.coeffs)) <= 1e-13
    assert back.sobolev_order == pytest.approx(0.5)


def test_sobolev_norm_examples():
    constant = TraceVector(coeffs=np.array([0.0, np.sqrt(2 * np.pi), 0.0]))
    for s in [-1.0, 0.0, 0.5, 2.0]:
        assert sobolev_norm(constant, s) == pytest.approx(np.sqrt(2 * np.pi), abs=1e-14)
    first = TraceVector.basis(1, 3)
    assert sobolev_norm(first, 0.5) == pytest.approx(2 ** 0.25, abs=1e-14)


def test_sobolev_norm_monotone_and_interpolation(rng):
    epsilon = 0.1
    for _ in range(20):
        v = _random_vector(rng, n_max=8, radius=0.8)
        assert sobolev_norm(v, -0.5) <= sobolev_norm(v, 0.0) <= sobolev_norm(v, 1.0)
        bound = epsilon * sobolev_norm(v, 2.0) + sobolev_norm(v, 0.0) / (4 * epsilon)
        assert sobolev_norm(v, 1.0) <= bound + 1e-12, "Interpolation inequality violated"


def test_duality_pairing_examples_and_errors(rng):
    phi0 = TraceVector.basis(0, 3, order=-0.5)
    assert duality_pairing(phi0, TraceVector.basis(0, 3, order=0.5)) == 1.0
    assert duality_pairing(TraceVector.basis(1, 3, order=-0.5), TraceVector.basis(2, 3, order=0.5)) == 0.0

    g = _random_vector(rng, order=0.5)
    assert abs(duality_pairing(lambda_power(g, 1.0), g) - sobolev_norm(g, 0.5) ** 2) <= 1e-13

    f = _random_vector(rng, order=-0.5)
    assert abs(duality_pairing(f, g)) <= sobolev_norm(f, -0.5) * sobolev_norm(g, 0.5) + 1e-12

    with pytest.raises(TraceOrderError):
        duality_pairing(_random_vector(rng, order=0.5), g)
    with pytest.raises(TraceOrderError):
        duality_pairing(_random_vector(rng, n_max=5, order=-0.5), g)


def test_trace_vector_arithmetic_requires_matching_order(rng):
    a = _random_vector(rng, order=0.5)
    b = _random_vector(rng, order=0.5)
    assert np.allclose((a + 2.0 * b).coeffs, a.coeffs + 2.0 * b.coeffs)
    with pytest.raises(TraceOrderError):
        a + _random_vector(rng, order=1.0)


def test_grid_modes_round_trip_and_parseval(rng):
    grid = discretize_curve(CurveParam.circle(1.3), 32)
    v = _random_vector(rng, n_max=10, radius=1.3)
    samples = modes_to_grid(v, grid)
    back = grid_to_modes(samples, grid, 10)
    assert np.max(np.abs(back.coeffs - v.coeffs)) <= 1e-12, "Band-limited round trip must be exact"
    quadrature = np.sum(grid.weights * np.abs(samples) ** 2)
    assert abs(quadrature - np.sum(np.abs(v.coeffs) ** 2)) <= 1e-12


def test_grid_to_modes_constant_and_aliasing(circle_grid):
    constant = grid_to_modes(np.full(circle_grid.n_nodes, 2.0), circle_grid, 5)
    assert abs(constant.coefficient(0) - 2.0 * np.sqrt(2 * np.pi)) <= 1e-13
    assert np.max(np.abs(np.delete(constant.coeffs, 5))) <= 1e-14, "Only c_0 may be nonzero"

    with warnings.catch_warnings():
        warnings.simplefilter("error")
        grid_to_modes(np.cos(3 * circle_grid.params), circle_grid, 5)
    with pytest.warns(AliasingWarning):
        grid_to_modes(np.cos(20 * circle_grid.params), circle_grid, 5)


def test_arc_index_maps():
    grid = composite_arc_grid(CurveParam.circle(), ArcSpec(0.2, 2.5, m=16), m_complement=24)
    arc = grid.arc
    assert arc.sigma.size == 16 and arc.complement.size == 24
    values = np.arange(arc.sigma.size, dtype=float) + 1.0
    assert np.array_equal(arc_restrict(arc_include(values, arc), arc), values)

    full = np.linspace(-1.0, 1.0, arc.n_nodes)
    once = arc_include(arc_restrict(full, arc), arc)
    assert np.array_equal(arc_include(arc_restrict(once, arc), arc), once), "include o restrict is idempotent"

    g = np.cos(grid.params)
    lhs = np.sum(grid.weights * arc_include(values, arc) * g)
    rhs = np.sum(grid.weights[arc.sigma] * values * arc_restrict(g, arc))
    assert abs(lhs - rhs) <= 1e-14

    outside = np.zeros(arc.n_nodes)
    outside[arc.complement] = 1.0
    assert np.sum(grid.weights * arc_include(values, arc) * outside) == 0.0


def test_arc_index_set_validation():
    with pytest.raises(ValueError, match="disjoint"):
        ArcIndexSet(sigma=[0, 1], complement=[1, 2])
    with pytest.raises(ValueError, match="cover"):
        ArcIndexSet(sigma=[0, 1], complement=[3])
