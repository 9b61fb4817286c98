"""Fundamental solution of -Delta + V0 + z in the plane and Bessel wrappers"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Union

import numpy as np
from scipy.special import hankel1, iv, ive, kv

from ..core.exceptions import CoincidenceError, KernelError

logger = logging.getLogger(__name__)

COINCIDENCE_RADIUS = 1e-14
OVERFLOW_ARGUMENT = 700.0

ArrayLike = Union[float, complex, np.ndarray]


@dataclass
class KernelConfig:
    """Constant potential V0 and spectral parameter z, with kappa^2 = z + V0"""

    V0: float = 0.0
    z: complex = 1.0
    kappa: complex = field(init=False)
    oscillatory: bool = field(init=False)

    def __post_init__(self):
        self.V0 = float(self.V0)
        self.z = complex(self.z)
        shifted = self.z + self.V0
        if shifted == 0:
            raise ValueError(f"Invalid spectral parameter {self.z}. z + V0 must not vanish")
        if shifted.imag == 0.0 and shifted.real < 0.0:
            # outgoing branch: K0(-i k r) = (i pi / 2) H0(k r)
            self.kappa = -1j * np.sqrt(-shifted.real)
            self.oscillatory = True
        else:
            self.kappa = complex(np.sqrt(shifted))
            self.oscillatory = False

    @classmethod
    def from_wavenumber(cls, k: float, V0: float = 0.0) -> "KernelConfig":
        """Configuration on the limiting-absorption branch z = -k^2 - V0"""
        if k <= 0:
            raise ValueError(f"Invalid wavenumber {k}. Must be positive")
        return cls(V0=V0, z=-(k ** 2) - V0)

    def at(self, z: complex) -> "KernelConfig":
        return replace(self, z=z)

    @property
    def is_real(self) -> bool:
        """True when the kernel is real-valued"""
        return self.z.imag == 0.0 and not self.oscillatory

    @property
    def wavenumber(self) -> float:
        """k = i kappa on the oscillatory branch"""
        if not self.oscillatory:
            raise ValueError("Invalid request. Wavenumber is defined on the oscillatory branch only")
        return float((1j * self.kappa).real)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "V0": self.V0,
            "z": [self.z.real, self.z.imag],
            "kappa": [self.kappa.real, self.kappa.imag],
            "oscillatory": self.oscillatory,
        }


def bessel_K(n: int, arg: ArrayLike) -> np.ndarray:
    """K_n for Re(arg) >= 0; negative imaginary axis evaluated through H_n^(1)"""
    arg = np.asarray(arg, dtype=complex)
    if np.any(arg == 0):
        raise CoincidenceError("K_n is singular at zero argument")
    result = np.array(kv(n, arg), dtype=complex, ndmin=1)
    flat = np.atleast_1d(arg)
    on_axis = (flat.real == 0.0) & (flat.imag < 0.0)
    if np.any(on_axis):
        result[on_axis] = 0.5 * np.pi * (1j) ** (n + 1) * hankel1(n, (1j * flat[on_axis]).real)
    return result.reshape(arg.shape)


def bessel_I(n: int, arg: ArrayLike) -> np.ndarray:
    """I_n; raises KernelError where the unscaled value overflows"""
    arg = np.asarray(arg)
    if np.any(np.abs(np.real(arg)) > OVERFLOW_ARGUMENT):
        raise KernelError(f"I_{n} overflows beyond argument {OVERFLOW_ARGUMENT}; use bessel_I_scaled")
    if np.iscomplexobj(arg):
        return np.asarray(iv(n, arg), dtype=complex)
    return np.asarray(iv(n, arg), dtype=float)


def bessel_I_scaled(n: int, arg: ArrayLike) -> np.ndarray:
    """exp(-|Re arg|) I_n(arg)"""
    return np.asarray(ive(n, arg))


def _distance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), axis=-1)
    if np.any(r < COINCIDENCE_RADIUS):
        raise CoincidenceError(f"Kernel evaluated at coincident points (r = {np.min(r):.3e})")
    return r


def green_kernel(cfg: KernelConfig, r: ArrayLike) -> np.ndarray:
    """g as a function of distance, (1/2pi) K0(kappa r)"""
    return bessel_K(0, cfg.kappa * np.asarray(r)) / (2 * np.pi)


def green_gradient_factor(cfg: KernelConfig, r: ArrayLike) -> np.ndarray:
    """kappa K1(kappa r) / (2 pi r); grad_y g(x, y) = factor * (x - y)"""
    r = np.asarray(r)
    return cfg.kappa * bessel_K(1, cfg.kappa * r) / (2 * np.pi * r)


def fundamental_solution(cfg: KernelConfig, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Kernel of (-Delta + V0 + z)^{-1}"""
    r = _distance(x, y)
    value = green_kernel(cfg, r)
    return value[()] if value.ndim == 0 else value


def conormal_gradient(cfg: KernelConfig, x: np.ndarray, y: np.ndarray, normal_at_y: np.ndarray) -> np.ndarray:
    """nu(y) . grad_y g(x, y)"""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = _distance(x, y)
    projection = np.sum((x - y) * np.asarray(normal_at_y, dtype=float), axis=-1)
    value = green_gradient_factor(cfg, r) * projection
    return value[()] if value.ndim == 0 else value
