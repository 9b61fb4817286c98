"""Tests for boundary-condition families and their Theta blocks"""

import numpy as np
import pytest

from krein_layers.boundary.geometry import ArcSpec, CurveParam, composite_arc_grid, discretize_curve
from krein_layers.boundary.layer_ops import LayerSet
from krein_layers.core.exceptions import CoefficientDegeneracyError
from krein_layers.extensions.boundary_conditions import (
    CoefficientFunction,
    ExtensionSpec,
    ThetaBlock,
    birman_block,
    build_theta,
    coefficient_block,
    compress_theta,
    krein_block,
)


@pytest.fixture
def small_circle():
    return discretize_curve(CurveParam.circle(), 16)


def test_coefficient_grammar():
    constant = CoefficientFunction("2.5")
    assert constant.kind == "const" and np.all(constant(np.linspace(0, 1, 5)) == 2.5)

    cosine = CoefficientFunction("1.0 + 0.5*cos(2*t)")
    assert (cosine.c0, cosine.c1, cosine.m, cosine.kind) == (1.0, 0.5, 2.0, "cos")
    assert cosine(np.array([0.0]))[0] == pytest.approx(1.5)

    sine = CoefficientFunction("1 - 3*sin(1*t)")
    assert sine.c1 == -3.0
    assert sine(np.array([np.pi / 2]))[0] == pytest.approx(-2.0)

    assert CoefficientFunction.from_value(3).c0 == 3.0
    assert CoefficientFunction.from_value(cosine) is cosine
    assert CoefficientFunction.from_value(-4.0).to_dict() == "-4.0"


@pytest.mark.parametrize("expression", ["exp(t)", "1 + cos(t)", "", "2*t"])
def test_coefficient_grammar_rejects(expression):
    with pytest.raises(ValueError, match="Invalid coefficient expression"):
        CoefficientFunction(expression)


def test_extension_spec_validation():
    with pytest.raises(ValueError, match="Must be one of"):
        ExtensionSpec(family="transmission")
    with pytest.raises(ValueError, match="Must be one of"):
        ExtensionSpec(family="dirichlet", region="half")
    with pytest.raises(ValueError, match="ArcSpec"):
        ExtensionSpec(family="dirichlet", region="arc")
    with pytest.raises(ValueError, match="alpha is required"):
        ExtensionSpec(family="delta")
    with pytest.raises(ValueError, match="b_minus is required"):
        ExtensionSpec(family="robin", b_plus=1.0)
    with pytest.raises(ValueError, match="must be positive"):
        ExtensionSpec(family="neumann", V0=1.0, lambda0=-1.0)

    spec = ExtensionSpec(family="delta", alpha="-4")
    assert isinstance(spec.alpha, CoefficientFunction)
    assert spec.components == (0,)
    assert spec.to_dict()["coefficients"] == {"alpha": "-4"}


def test_coefficient_sampling(small_circle):
    spec = ExtensionSpec(family="robin", b_plus="1.0 + 0.5*cos(2*t)", b_minus=-1.0)
    expected = 1.0 + 0.5 * np.cos(2 * small_circle.params)
    assert np.allclose(spec.sample("b_plus", small_circle), expected, rtol=0, atol=1e-15)
    with pytest.raises(ValueError, match="not set"):
        spec.sample("alpha", small_circle)


def test_b_theta_per_family(small_circle):
    n = small_circle.n_nodes
    cases = {
        "dirichlet": ExtensionSpec(family="dirichlet"),
        "neumann": ExtensionSpec(family="neumann"),
        "delta": ExtensionSpec(family="delta", alpha=2.0),
        "delta_prime": ExtensionSpec(family="delta_prime", beta=4.0),
    }
    blocks = {name: coefficient_block(spec, small_circle) for name, spec in cases.items()}

    assert np.array_equal(blocks["dirichlet"][0], np.arange(n))
    assert np.array_equal(blocks["neumann"][0], n + np.arange(n))
    assert np.max(np.abs(blocks["dirichlet"][1])) == 0.0
    assert np.allclose(blocks["delta"][1], -0.5 * np.eye(n))
    assert np.allclose(blocks["delta_prime"][1], 0.25 * np.eye(n))

    robin = ExtensionSpec(family="robin", b_plus=3.0, b_minus=1.0)
    selector, b_theta = coefficient_block(robin, small_circle)
    assert selector.size == 2 * n
    identity = np.eye(n)
    expected = -np.block([[0.5 * identity, identity], [identity, 1.5 * identity]])
    assert np.allclose(b_theta, expected, rtol=0, atol=1e-15)


def test_robin_reduces_to_delta(kite_grid):
    alpha = -4.0
    robin = ExtensionSpec(family="robin", b_plus=alpha / 2, b_minus=-alpha / 2)
    delta = ExtensionSpec(family="delta", alpha=alpha)
    layers = LayerSet(kite_grid, robin.lambda0_config)
    compressed = compress_theta(build_theta(robin, kite_grid, layers), 0)
    direct = build_theta(delta, kite_grid, layers)
    assert compressed.components == (0,)
    assert np.max(np.abs(compressed.theta_matrix - direct.theta_matrix)) <= 1e-12
    assert np.max(np.abs(compressed.b_theta - direct.b_theta)) <= 1e-12


def test_robin_reduces_to_delta_prime(circle_grid):
    beta = 0.5
    robin = ExtensionSpec(family="robin", b_plus=2 / beta, b_minus=-2 / beta)
    delta_prime = ExtensionSpec(family="delta_prime", beta=beta)
    layers = LayerSet(circle_grid, robin.lambda0_config)
    compressed = compress_theta(build_theta(robin, circle_grid, layers), 1)
    direct = build_theta(delta_prime, circle_grid, layers)
    assert np.max(np.abs(compressed.theta_matrix - direct.theta_matrix)) <= 1e-12
    assert np.array_equal(compressed.selector, direct.selector)

    with pytest.raises(ValueError, match="Must be one of"):
        compress_theta(direct, 0)


def test_compressed_form_interlaces(kite_grid):
    robin = ExtensionSpec(family="robin", b_plus="1.0 + 0.5*cos(2*t)", b_minus=-1.0)
    theta = build_theta(robin, kite_grid)
    full = np.linalg.eigvalsh(0.5 * (theta.symmetrized() + theta.symmetrized().conj().T))
    scale = max(1.0, float(np.max(np.abs(full))))
    for component in (0, 1):
        compressed = compress_theta(theta, component)
        assert compressed.hermitian_defect() <= 1e-12 * scale, "compressed form is not weighted Hermitian"
        values = np.linalg.eigvalsh(compressed.symmetrized())
        assert values[0] >= full[0] - 1e-10 * scale, f"component {component} undershoots the full form"
        assert values[-1] <= full[-1] + 1e-10 * scale, f"component {component} overshoots the full form"
        assert np.allclose(compressed.m_circ_lambda0, compressed.b_theta - compressed.theta_matrix, rtol=0, atol=1e-14)


def test_compress_theta_requires_hermitian_form(rng):
    size = 4
    matrix = rng.standard_normal((2 * size, 2 * size))
    theta = ThetaBlock(
        components=(0, 1),
        nodes=np.arange(size),
        selector=np.arange(2 * size),
        theta_matrix=matrix,
        b_theta=np.zeros((2 * size, 2 * size)),
        m_circ_lambda0=-matrix,
        weights=np.ones(2 * size),
    )
    with pytest.raises(ValueError, match="must be Hermitian"):
        compress_theta(theta, 0)


def test_degenerate_coefficients(small_circle):
    with pytest.raises(CoefficientDegeneracyError):
        build_theta(ExtensionSpec(family="robin", b_plus=1.0, b_minus=1.0), small_circle)
    # cos(t) vanishes at t = pi/2, a node of the 16-point grid
    with pytest.raises(CoefficientDegeneracyError):
        build_theta(ExtensionSpec(family="delta", alpha="0 + 0.5*cos(1*t)"), small_circle)
    with pytest.raises(CoefficientDegeneracyError):
        birman_block(ExtensionSpec(family="delta_prime", beta=0.0), small_circle, 1.0 + 1.0j)

    arc = ArcSpec(0.5, 2.0, m=16)
    with pytest.raises(CoefficientDegeneracyError, match="b_plus - b_minus < 0"):
        arc_spec = ExtensionSpec(family="robin", region="arc", arc=arc, b_plus=1.0, b_minus=-1.0)
        build_theta(arc_spec, arc_spec.build_grid(CurveParam.circle(), 16))


def test_theta_is_weighted_hermitian(kite_grid):
    robin = ExtensionSpec(family="robin", b_plus="1.0 + 0.5*cos(2*t)", b_minus=-1.0)
    theta = build_theta(robin, kite_grid)
    assert theta.hermitian_defect() <= 1e-10
    delta = build_theta(ExtensionSpec(family="delta", alpha=-4.0), kite_grid)
    assert delta.hermitian_defect() <= 1e-10


@pytest.mark.parametrize("spec", [
    ExtensionSpec(family="dirichlet"),
    ExtensionSpec(family="delta", alpha=-4.0),
    ExtensionSpec(family="robin", b_plus="1.0 + 0.5*cos(2*t)", b_minus=-1.0),
])
def test_krein_block_forms_agree(spec, kite_grid):
    layers_z = LayerSet(kite_grid, spec.kernel_at(2.0 + 1.0j))
    theta = build_theta(spec, kite_grid)
    c1 = krein_block(theta, layers_z, "c1")
    t1 = krein_block(theta, layers_z, "t1")
    assert np.max(np.abs(c1 - t1)) <= 1e-12
    with pytest.raises(ValueError, match="Must be one of"):
        krein_block(theta, layers_z, "t2")


def test_birman_blocks(circle_grid):
    z = 2.0 + 1.0j
    layers = LayerSet(circle_grid, ExtensionSpec(family="dirichlet").kernel_at(z))
    n = circle_grid.n_nodes

    assert np.array_equal(birman_block(ExtensionSpec(family="dirichlet"), circle_grid, z, layers), layers.S)
    assert np.array_equal(birman_block(ExtensionSpec(family="neumann"), circle_grid, z, layers), layers.T)
    delta = birman_block(ExtensionSpec(family="delta", alpha=-4.0), circle_grid, z, layers)
    assert np.allclose(delta, -0.25 * np.eye(n) + layers.S, rtol=0, atol=1e-15)
    delta_prime = birman_block(ExtensionSpec(family="delta_prime", beta=0.5), circle_grid, z, layers)
    assert np.allclose(delta_prime, 2.0 * np.eye(n) - layers.T, rtol=0, atol=1e-15)

    robin = ExtensionSpec(family="robin", b_plus=3.0, b_minus=1.0)
    theta = build_theta(robin, circle_grid)
    assert np.allclose(birman_block(robin, circle_grid, z, layers), -krein_block(theta, layers, "c1"),
                       rtol=0, atol=1e-14)


def test_arc_region_nodes():
    arc = ArcSpec(0.5, 2.5, m=24)
    spec = ExtensionSpec(family="delta", region="arc", arc=arc, alpha=-2.0)
    graded = spec.build_grid(CurveParam.kite(), 128)
    assert graded.n_nodes == 24 and np.array_equal(spec.nodes(graded), np.arange(24))
    assert np.all((graded.params > arc.t0) & (graded.params < arc.t1))

    composite = composite_arc_grid(CurveParam.kite(), arc, m_complement=40)
    assert np.array_equal(spec.nodes(composite), np.arange(24))
    theta = build_theta(spec, composite)
    assert theta.theta_matrix.shape == (24, 24)

    layers = LayerSet(graded, spec.kernel_at(1.5))
    block = birman_block(spec, graded, 1.5, layers)
    assert np.allclose(block, np.eye(24) - 2.0 * layers.S, rtol=0, atol=1e-14)
