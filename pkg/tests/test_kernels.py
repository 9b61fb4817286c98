"""Tests for the fundamental solution and the Bessel wrappers"""

import numpy as np
import pytest
from scipy import special

from krein_layers.boundary.kernels import (
    KernelConfig,
    bessel_I,
    bessel_I_scaled,
    bessel_K,
    conormal_gradient,
    fundamental_solution,
)
from krein_layers.core.exceptions import CoincidenceError, KernelError

K0_AT_ONE = 0.42102443824070834


def test_kernel_config_branches():
    cfg = KernelConfig(V0=0.5, z=1.5 + 2j)
    assert abs(cfg.kappa ** 2 - (2.0 + 2j)) <= 1e-14
    assert cfg.kappa.real >= 0 and not cfg.oscillatory

    cut = KernelConfig(V0=0.0, z=-4.0)
    assert cut.oscillatory and cut.kappa == -2j
    assert cut.wavenumber == pytest.approx(2.0)
    assert KernelConfig.from_wavenumber(2.0, V0=1.0).kappa == -2j

    with pytest.raises(ValueError, match="must not vanish"):
        KernelConfig(V0=1.0, z=-1.0)
    with pytest.raises(ValueError, match="oscillatory"):
        KernelConfig(z=1.0).wavenumber


def test_kappa_along_limiting_absorption_paths():
    epsilons = np.logspace(0, -6, 61)
    upper = np.array([KernelConfig(z=-4.0 + 1j * eps).kappa for eps in epsilons])
    assert np.max(np.abs(np.diff(upper))) < 0.1, "kappa must vary continuously along z = lambda + i eps"
    assert np.all(upper.real >= 0)
    lower = KernelConfig(z=-4.0 - 1e-10j).kappa
    assert abs(lower - KernelConfig(z=-4.0).kappa) <= 1e-9, "z = -k^2 - i eps approaches the outgoing branch"


def test_fundamental_solution_values():
    cfg = KernelConfig(V0=0.0, z=1.0)
    x, y = np.array([0.3, -0.2]), np.array([1.3, -0.2])
    value = fundamental_solution(cfg, x, y)
    assert abs(value - K0_AT_ONE / (2 * np.pi)) <= 1e-15
    assert fundamental_solution(cfg, x, y) == fundamental_solution(cfg, y, x)
    with pytest.raises(CoincidenceError):
        fundamental_solution(cfg, x, x)


def test_fundamental_solution_outgoing_branch():
    cfg = KernelConfig.from_wavenumber(2.0)
    r = np.linspace(1.0, 100.0, 200)
    points = np.stack([r, np.zeros_like(r)], axis=-1)
    values = fundamental_solution(cfg, points, np.zeros(2))
    assert np.allclose(values, 0.25j * special.hankel1(0, 2.0 * r), rtol=1e-12, atol=0)
    assert np.max(np.abs(values) * np.sqrt(r)) < 0.2, "Outgoing kernel decays like r^(-1/2)"


def test_fundamental_solution_decays_for_real_kappa():
    cfg = KernelConfig(V0=0.0, z=2.0)
    r = np.linspace(0.1, 20.0, 100)
    values = fundamental_solution(cfg, np.stack([r, np.zeros_like(r)], axis=-1), np.zeros(2))
    assert np.all(np.diff(np.abs(values)) < 0) and abs(values[-1]) < 1e-10


def test_fundamental_solution_solves_helmholtz_equation():
    cfg = KernelConfig(V0=0.0, z=1.0)
    y = np.zeros(2)
    x = np.array([2.0, 0.0])
    h = 1e-3
    stencil = [x + np.array([h, 0]), x - np.array([h, 0]), x + np.array([0, h]), x - np.array([0, h])]
    center = fundamental_solution(cfg, x, y)
    laplacian = (sum(fundamental_solution(cfg, p, y) for p in stencil) - 4 * center) / h ** 2
    assert abs(-laplacian + center) <= 1e-6, "(-Delta + 1) g must vanish away from the source"


def test_conormal_gradient_orthogonal_and_finite_difference(rng):
    cfg = KernelConfig(V0=0.3, z=0.9)
    x, y = np.array([1.0, 0.5]), np.array([0.0, 0.5])
    assert conormal_gradient(cfg, x, y, np.array([0.0, 1.0])) == 0.0

    h = 1e-6
    for _ in range(100):
        x = rng.uniform(-2, 2, 2)
        y = rng.uniform(-2, 2, 2)
        if np.linalg.norm(x - y) < 0.2:
            continue
        angle = rng.uniform(0, 2 * np.pi)
        nu = np.array([np.cos(angle), np.sin(angle)])
        analytic = conormal_gradient(cfg, x, y, nu)
        difference = (fundamental_solution(cfg, x, y + h * nu) - fundamental_solution(cfg, x, y - h * nu)) / (2 * h)
        assert abs(analytic - difference) <= 1e-6, "Conormal gradient must match the directional derivative"


def test_conormal_gradient_sign_on_unit_circle():
    cfg = KernelConfig(V0=0.0, z=1.0)
    y = np.array([np.cos(0.4), np.sin(0.4)])
    outside = conormal_gradient(cfg, 2 * y, y, y)
    inside = conormal_gradient(cfg, 0.5 * y, y, y)
    assert outside.real > 0 and outside.imag == 0, "Moving y toward an outside x increases g"
    assert inside.real < 0


def test_bessel_wrappers():
    assert bessel_I(0, 0.0) == 1.0
    assert abs(bessel_K(0, 1.0) - K0_AT_ONE) <= 1e-15
    assert abs(bessel_I(0, 1.0) * bessel_K(0, 1.0) - special.i0(1.0) * special.k0(1.0)) <= 1e-14
    for x in [0.5, 1.0, 5.0]:
        for n in [0, 1, 5]:
            i_prime = 0.5 * (bessel_I(abs(n - 1), x) + bessel_I(n + 1, x))
            k_prime = -0.5 * (bessel_K(abs(n - 1), x) + bessel_K(n + 1, x))
            wronskian = bessel_I(n, x) * k_prime - i_prime * bessel_K(n, x)
            assert abs(wronskian + 1.0 / x) <= 1e-12, f"Wronskian off at n={n}, x={x}"


def test_bessel_K_on_negative_imaginary_axis():
    arg = np.array([-0.5j, -3.0j])
    expected = 0.5j * np.pi * special.hankel1(0, [0.5, 3.0])
    assert np.allclose(bessel_K(0, arg), expected, rtol=1e-13, atol=0)
    with pytest.raises(CoincidenceError):
        bessel_K(1, 0.0)


def test_bessel_I_overflow_guard():
    with pytest.raises(KernelError):
        bessel_I(0, 800.0)
    assert np.isfinite(bessel_I_scaled(0, 800.0))
    assert bessel_I_scaled(0, 800.0) == pytest.approx(special.ive(0, 800.0))
