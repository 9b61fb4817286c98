"""Fourier-Sobolev calculus on a smooth closed curve

Trace data are expanded in the arc-length eigenfunctions
phi_n = exp(i n theta) / sqrt(2 pi R) of the Laplace-Beltrami operator, with
eigenvalues n^2 / R^2.  Lambda = (-Delta + 1)^{1/2} is therefore diagonal.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np

from .exceptions import AliasingWarning, TraceOrderError

logger = logging.getLogger(__name__)

ALIASING_THRESHOLD = 1e-8


@dataclass
class TraceVector:
    """Fourier coefficients c_n, n = -N..N, of an element of H^s(Gamma)"""

    coeffs: np.ndarray
    sobolev_order: float = 0.0
    radius: float = 1.0

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        if self.coeffs.size % 2 != 1:
            raise ValueError(f"Invalid coefficient count {self.coeffs.size}. Must be 2N+1")
        if not np.all(np.isfinite(self.coeffs)):
            raise ValueError("Invalid coefficients. Must be finite")
        if self.radius <= 0:
            raise ValueError(f"Invalid radius {self.radius}. Must be positive")
        self.sobolev_order = float(self.sobolev_order)
        self.radius = float(self.radius)

    @property
    def n_max(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        """Mode numbers -N..N aligned with coeffs"""
        return np.arange(-self.n_max, self.n_max + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        """Laplace-Beltrami eigenvalues n^2 / R^2"""
        return (self.modes / self.radius) ** 2

    @classmethod
    def basis(cls, n: int, n_max: int, radius: float = 1.0, order: float = 0.0) -> "TraceVector":
        """Single-mode vector phi_n"""
        if abs(n) > n_max:
            raise ValueError(f"Invalid mode {n}. Must satisfy |n| <= {n_max}")
        coeffs = np.zeros(2 * n_max + 1, dtype=complex)
        coeffs[n + n_max] = 1.0
        return cls(coeffs=coeffs, sobolev_order=order, radius=radius)

    def coefficient(self, n: int) -> complex:
        return complex(self.coeffs[n + self.n_max])

    def _check_compatible(self, other: "TraceVector") -> None:
        if self.n_max != other.n_max or not np.isclose(self.radius, other.radius, rtol=0, atol=1e-14):
            raise TraceOrderError(
                f"Trace vectors differ in size or radius: N={self.n_max}/{other.n_max}, "
                f"R={self.radius}/{other.radius}"
            )

    def __add__(self, other: "TraceVector") -> "TraceVector":
        self._check_compatible(other)
        if self.sobolev_order != other.sobolev_order:
            raise TraceOrderError(f"Cannot add orders {self.sobolev_order} and {other.sobolev_order}")
        return TraceVector(self.coeffs + other.coeffs, self.sobolev_order, self.radius)

    def __mul__(self, scalar: complex) -> "TraceVector":
        return TraceVector(scalar * self.coeffs, self.sobolev_order, self.radius)

    __rmul__ = __mul__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_max": self.n_max,
            "sobolev_order": self.sobolev_order,
            "radius": self.radius,
            "coeffs_real": self.coeffs.real.tolist(),
            "coeffs_imag": self.coeffs.imag.tolist(),
        }


def lambda_power(v: TraceVector, r: float) -> TraceVector:
    """Apply Lambda^r: H^s -> H^{s-r}"""
    factors = (v.eigenvalues + 1.0) ** (0.5 * r)
    return TraceVector(coeffs=factors * v.coeffs, sobolev_order=v.sobolev_order - r, radius=v.radius)


def sobolev_norm(v: TraceVector, s: float) -> float:
    """(sum_n (n^2/R^2 + 1)^s |c_n|^2)^{1/2}"""
    weights = (v.eigenvalues + 1.0) ** s
    return float(np.sqrt(np.sum(weights * np.abs(v.coeffs) ** 2)))


def duality_pairing(f: TraceVector, g: TraceVector) -> complex:
    """<f, g>_{-s,s} = sum_n conj(f_n) g_n, conjugate-linear in f"""
    f._check_compatible(g)
    if not np.isclose(f.sobolev_order, -g.sobolev_order, rtol=0, atol=1e-14):
        raise TraceOrderError(
            f"Pairing needs opposite orders, got {f.sobolev_order} and {g.sobolev_order}"
        )
    return complex(np.vdot(f.coeffs, g.coeffs))


def _require_periodic(grid) -> None:
    panels = getattr(grid, "panels", [])
    if len(panels) != 1 or panels[0].kind != "periodic":
        raise ValueError("Invalid grid. Mode transforms need a single uniform periodic panel")


def grid_to_modes(samples: np.ndarray, grid, n_max: int, order: float = 0.0) -> TraceVector:
    """Nodal values on a uniform periodic grid to Fourier coefficients up to |n| = n_max"""
    _require_periodic(grid)
    samples = np.asarray(samples, dtype=complex)
    n_nodes = samples.size
    if n_nodes != grid.n_nodes:
        raise ValueError(f"Invalid sample count {n_nodes}. Grid has {grid.n_nodes} nodes")
    if n_nodes < 2 * n_max + 1:
        raise ValueError(f"Invalid mode cutoff {n_max}. Needs at least {2 * n_max + 1} nodes")

    radius = grid.length / (2.0 * np.pi)
    spectrum = np.fft.fft(samples) / n_nodes
    frequencies = np.fft.fftfreq(n_nodes, d=1.0 / n_nodes).astype(int)

    kept = np.abs(frequencies) <= n_max
    total = float(np.sum(np.abs(spectrum) ** 2))
    dropped = float(np.sum(np.abs(spectrum[~kept]) ** 2))
    if total > 0.0 and dropped > ALIASING_THRESHOLD * total:
        warnings.warn(
            f"{dropped / total:.2e} of the sample energy lies above mode {n_max}",
            AliasingWarning,
            stacklevel=2,
        )

    coeffs = np.zeros(2 * n_max + 1, dtype=complex)
    for n in range(-n_max, n_max + 1):
        coeffs[n + n_max] = spectrum[n % n_nodes]
    coeffs *= np.sqrt(2.0 * np.pi * radius)
    return TraceVector(coeffs=coeffs, sobolev_order=order, radius=radius)


def modes_to_grid(v: TraceVector, grid) -> np.ndarray:
    """Evaluate sum_n c_n phi_n at the grid parameters"""
    _require_periodic(grid)
    if grid.n_nodes < 2 * v.n_max + 1:
        raise ValueError(f"Invalid grid. Needs at least {2 * v.n_max + 1} nodes for N={v.n_max}")
    phases = np.exp(1j * np.outer(grid.params, v.modes))
    return phases @ v.coeffs / np.sqrt(2.0 * np.pi * v.radius)


@dataclass
class ArcIndexSet:
    """Node indices on Sigma and on its complement"""

    sigma: np.ndarray
    complement: np.ndarray
    n_nodes: int = field(init=False)

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=int).ravel()
        self.complement = np.asarray(self.complement, dtype=int).ravel()
        self.n_nodes = self.sigma.size + self.complement.size
        joined = np.concatenate([self.sigma, self.complement])
        if np.unique(joined).size != joined.size:
            raise ValueError("Invalid arc index set. Sigma and complement must be disjoint")
        if joined.size and not np.array_equal(np.sort(joined), np.arange(self.n_nodes)):
            raise ValueError("Invalid arc index set. Sigma and complement must cover every node")

    @classmethod
    def from_grid(cls, grid) -> "ArcIndexSet":
        """Sigma is the first panel of a composite grid, the complement the rest"""
        if len(grid.panels) < 2:
            raise ValueError("Invalid grid. Arc index sets need a composite grid")
        first = grid.panels[0]
        sigma = np.arange(first.start, first.stop)
        complement = np.setdiff1d(np.arange(grid.n_nodes), sigma)
        return cls(sigma=sigma, complement=complement)

    def mask(self) -> np.ndarray:
        selected = np.zeros(self.n_nodes, dtype=bool)
        selected[self.sigma] = True
        return selected


def arc_restrict(samples: np.ndarray, arc: ArcIndexSet) -> np.ndarray:
    """R_Sigma: keep the Sigma entries"""
    samples = np.asarray(samples)
    if samples.shape[0] != arc.n_nodes:
        raise ValueError(f"Invalid sample count {samples.shape[0]}. Arc covers {arc.n_nodes} nodes")
    return samples[arc.sigma]


def arc_include(sigma_samples: np.ndarray, arc: ArcIndexSet) -> np.ndarray:
    """Pi'_Sigma: extend Sigma samples by zero"""
    sigma_samples = np.asarray(sigma_samples)
    if sigma_samples.shape[0] != arc.sigma.size:
        raise ValueError(f"Invalid sample count {sigma_samples.shape[0]}. Sigma has {arc.sigma.size} nodes")
    full = np.zeros((arc.n_nodes,) + sigma_samples.shape[1:], dtype=sigma_samples.dtype)
    full[arc.sigma] = sigma_samples
    return full
