"""Kreĭn resolvent evaluation: Green's functions, DtN maps, spectra, scattering and decay diagnostics

All corrections use the block B_Theta - Pi M circ_z Pi' on the selected trace
coordinates.  For a free field u with traces tau u = (gamma_0 u, gamma_1 u),
the correction is G_z Pi' (B_Theta - Pi M circ_z Pi')^{-1} Pi tau u, where
G_z (phi, varphi) = SL_z phi + DL_z varphi.
"""

import logging
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.optimize import minimize_scalar
from scipy.stats import linregress

from ..boundary.geometry import BoundaryGrid
from ..boundary.kernels import KernelConfig, green_gradient_factor, green_kernel
from ..boundary.layer_ops import (
    DEFAULT_PROXIMITY_FACTOR,
    LayerSet,
    eval_DL_field,
    eval_SL_field,
    far_field_DL,
    far_field_SL,
    layer_potential_gram,
)
from ..core.exceptions import BlockSingularError, ProximityError, ScanResolutionWarning, TrappedModeWarning
from ..core.extension import SINGULAR_RELATIVE_THRESHOLD
from .boundary_conditions import ExtensionSpec, birman_block, coefficient_block, selected_m_circ

logger = logging.getLogger(__name__)

TRAPPED_MODE_CONDITION = 1e10
HIT_RELATIVE_THRESHOLD = 1e-4
MULTIPLICITY_RELATIVE_THRESHOLD = 1e-3
REFINEMENT_TOLERANCE = 1e-10
REFINEMENT_WINDOW = 1e-7


class SpectralBranch(Enum):
    """How the scan variable s maps to the kernel parameter"""
    GAP = "gap"
    EMBEDDED = "embedded"


def _clearance(grid: BoundaryGrid, points: np.ndarray, proximity_factor: float) -> Tuple[np.ndarray, np.ndarray]:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    diff = points[:, None, :] - grid.nodes[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    limit = proximity_factor * grid.spacing
    if np.min(r) < limit:
        raise ProximityError(f"Point within {np.min(r):.3e} of the boundary (limit {limit:.3e})")
    return diff, r


def _field_operators(grid: BoundaryGrid, cfg: KernelConfig, points: np.ndarray, proximity_factor: float,
                     single_weights: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Quadrature matrices of SL_z and DL_z from nodal densities to points"""
    diff, r = _clearance(grid, points, proximity_factor)
    projection = np.sum(diff * grid.normals[None, :, :], axis=2)
    if single_weights is None:
        single_weights = grid.density_weights
    single = green_kernel(cfg, r) * single_weights[None, :]
    double = green_gradient_factor(cfg, r) * projection * grid.density_weights[None, :]
    return single, double


def source_traces(grid: BoundaryGrid, cfg: KernelConfig, sources: np.ndarray) -> np.ndarray:
    """(gamma_0, gamma_1) of g_z(., y) for each source y, stacked as a 2N x m array"""
    sources = np.atleast_2d(np.asarray(sources, dtype=float))
    diff = grid.nodes[:, None, :] - sources[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    dirichlet = green_kernel(cfg, r)
    neumann = -green_gradient_factor(cfg, r) * np.sum(diff * grid.normals[:, None, :], axis=2)
    return np.vstack([dirichlet, neumann])


def incident_traces(grid: BoundaryGrid, k: float, direction: Sequence[float]) -> np.ndarray:
    """(gamma_0, gamma_1) of the plane wave exp(i k d.x)"""
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    wave = np.exp(1j * k * grid.nodes @ direction)
    return np.concatenate([wave, 1j * k * (grid.normals @ direction) * wave])


class PerturbedResolvent:
    """Factorized boundary solve for one extension at one spectral parameter"""

    def __init__(self, spec: ExtensionSpec, grid: BoundaryGrid, z: complex,
                 on_singular: str = "raise", layers: Optional[LayerSet] = None):
        valid_policies = ["raise", "warn"]
        if on_singular not in valid_policies:
            raise ValueError(f"Invalid singular policy: {on_singular}. Must be one of: {valid_policies}")

        self.spec = spec
        self.grid = grid
        self.z = complex(z)
        self.cfg = spec.kernel_at(self.z)
        self.layers = layers if layers is not None else spec.layer_set(grid, self.z)

        self.selector, b_theta = coefficient_block(spec, grid)
        self.nodes = spec.nodes(grid)
        self.block = b_theta - selected_m_circ(self.layers, spec.components, self.nodes)

        singular_values = linalg.svdvals(self.block)
        self.sigma_max = float(singular_values[0])
        self.sigma_min = float(singular_values[-1])
        self.condition_number = self.sigma_max / self.sigma_min if self.sigma_min > 0 else np.inf
        if self.sigma_min <= SINGULAR_RELATIVE_THRESHOLD * self.sigma_max:
            message = (f"{spec.family} block is singular at z = {self.z} "
                       f"(condition number {self.condition_number:.3e})")
            if on_singular == "raise":
                raise BlockSingularError(message, sigma_min=self.sigma_min, sigma_max=self.sigma_max)
            warnings.warn(message, TrappedModeWarning, stacklevel=2)
        elif self.condition_number > TRAPPED_MODE_CONDITION:
            warnings.warn(f"Condition number {self.condition_number:.3e} at z = {self.z}",
                          TrappedModeWarning, stacklevel=2)

        self._lu = linalg.lu_factor(self.block)
        logger.debug("Factorized %s block of size %d at z=%s, cond=%.3e",
                     spec.family, self.block.shape[0], self.z, self.condition_number)

    def solve_block(self, rhs: np.ndarray) -> np.ndarray:
        """Block inverse applied to data on the selected trace coordinates"""
        return linalg.lu_solve(self._lu, np.asarray(rhs, dtype=complex))

    def densities(self, traces: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Single- and double-layer densities on all nodes for 2N trace data"""
        traces = np.asarray(traces, dtype=complex)
        n = self.grid.n_nodes
        solution = self.solve_block(traces[self.selector])
        full = np.zeros((2 * n,) + traces.shape[1:], dtype=complex)
        full[self.selector] = solution
        return full[:n], full[n:]

    def correction_from_traces(self, traces: np.ndarray, points: np.ndarray,
                               proximity_factor: float = DEFAULT_PROXIMITY_FACTOR) -> np.ndarray:
        single, double = _field_operators(self.grid, self.cfg, points, proximity_factor,
                                         single_weights=self.layers.density_weights(0))
        phi, varphi = self.densities(traces)
        return single @ phi + double @ varphi

    def correction_matrix(self, targets: np.ndarray, sources: np.ndarray,
                          proximity_factor: float = DEFAULT_PROXIMITY_FACTOR) -> np.ndarray:
        """G_spec - g_z on targets x sources"""
        sources = np.atleast_2d(np.asarray(sources, dtype=float))
        _clearance(self.grid, sources, proximity_factor)
        traces = source_traces(self.grid, self.cfg, sources)
        return self.correction_from_traces(traces, targets, proximity_factor)

    def green_matrix(self, targets: np.ndarray, sources: np.ndarray,
                     proximity_factor: float = DEFAULT_PROXIMITY_FACTOR) -> np.ndarray:
        """Perturbed Green's function on targets x sources"""
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        sources = np.atleast_2d(np.asarray(sources, dtype=float))
        r = np.linalg.norm(targets[:, None, :] - sources[None, :, :], axis=2)
        return green_kernel(self.cfg, r) + self.correction_matrix(targets, sources, proximity_factor)

    def green(self, x: Sequence[float], y: Sequence[float]) -> complex:
        return complex(self.green_matrix(np.asarray(x)[None, :], np.asarray(y)[None, :])[0, 0])

    def summary(self) -> Dict[str, Any]:
        return {
            "family": self.spec.family,
            "z": [self.z.real, self.z.imag],
            "block_size": int(self.block.shape[0]),
            "condition_number": self.condition_number,
        }


def perturbed_green(spec: ExtensionSpec, z: complex, x: Sequence[float], y: Sequence[float],
                    grid: BoundaryGrid) -> complex:
    """G_spec(z; x, y) = g_z(x, y) + Kreĭn correction"""
    return PerturbedResolvent(spec, grid, z).green(x, y)


def _checked_inverse(matrix: np.ndarray, name: str) -> np.ndarray:
    singular_values = linalg.svdvals(matrix)
    if singular_values[-1] <= SINGULAR_RELATIVE_THRESHOLD * singular_values[0]:
        raise BlockSingularError(f"{name} is singular", sigma_min=float(singular_values[-1]),
                                 sigma_max=float(singular_values[0]))
    return linalg.inv(matrix)


def dtn_difference(grid: BoundaryGrid, cfg: KernelConfig) -> np.ndarray:
    """(gamma_0 SL_z)^{-1}, the difference of interior and exterior DtN maps"""
    return _checked_inverse(LayerSet(grid, cfg).S, "gamma_0 SL_z")


def ntd_difference(grid: BoundaryGrid, cfg: KernelConfig) -> np.ndarray:
    """(gamma_1 DL_z)^{-1}, the difference of exterior and interior NtD maps"""
    return _checked_inverse(LayerSet(grid, cfg).T, "gamma_1 DL_z")


@dataclass
class SpectralHit:
    """Refined zero of the smallest singular value of the boundary block"""

    z_star: float
    residual: float
    block_norm: float
    multiplicity: int
    branch: str = SpectralBranch.GAP.value
    kernel_z: complex = 0.0

    @property
    def relative_residual(self) -> float:
        return self.residual / self.block_norm if self.block_norm > 0 else np.inf

    def to_dict(self) -> Dict[str, Any]:
        return {
            "z_star": self.z_star,
            "residual": self.residual,
            "relative_residual": self.relative_residual,
            "multiplicity": self.multiplicity,
            "branch": self.branch,
            "kernel_z": [complex(self.kernel_z).real, complex(self.kernel_z).imag],
        }


def kernel_parameter(spec: ExtensionSpec, s: float, branch: str) -> complex:
    """z fed to the kernel for scan value s"""
    if branch == SpectralBranch.GAP.value:
        return complex(s)
    return complex(-s - spec.V0)


def _spectral_block(spec: ExtensionSpec, grid: BoundaryGrid, s: float, branch: str) -> np.ndarray:
    return birman_block(spec, grid, kernel_parameter(spec, s, branch))


def _refine_minimum(objective, bounds: Tuple[float, float]) -> float:
    """Bounded Brent search in a variable centred on the bracket, then once more around the estimate"""
    center = 0.5 * (bounds[0] + bounds[1])
    half = 0.5 * (bounds[1] - bounds[0])
    first = minimize_scalar(lambda u: objective(center + u), bounds=(-half, half), method="bounded",
                            options={"xatol": REFINEMENT_TOLERANCE})
    offset = float(first.x)
    if half - abs(offset) < 10 * REFINEMENT_TOLERANCE:
        warnings.warn(f"Refinement stopped at the bracket edge near {center + offset:.6g}",
                      ScanResolutionWarning, stacklevel=3)
    estimate = center + offset
    window = min(REFINEMENT_WINDOW, half)
    second = minimize_scalar(lambda u: objective(estimate + u), bounds=(-window, window), method="bounded",
                             options={"xatol": REFINEMENT_TOLERANCE})
    if objective(estimate + float(second.x)) <= objective(estimate):
        return estimate + float(second.x)
    return estimate


def scan_spectrum(spec: ExtensionSpec, grid: BoundaryGrid, search_interval: Tuple[float, float],
                  n_scan: int = 200, branch: str = SpectralBranch.GAP.value) -> Tuple[pd.DataFrame, List[SpectralHit]]:
    """Scan sigma_min of the boundary block and refine its zeros"""
    valid_branches = [b.value for b in SpectralBranch]
    if branch not in valid_branches:
        raise ValueError(f"Invalid branch: {branch}. Must be one of: {valid_branches}")
    low, high = float(search_interval[0]), float(search_interval[1])
    if not low < high:
        raise ValueError(f"Invalid search interval [{low}, {high}]")
    if n_scan < 3:
        raise ValueError(f"Invalid scan size {n_scan}. Must be at least 3")

    def sigma_min(s: float) -> float:
        return float(linalg.svdvals(_spectral_block(spec, grid, s, branch))[-1])

    samples = np.linspace(low, high, n_scan)
    sigmas = np.array([sigma_min(s) for s in samples])
    scan = pd.DataFrame({"z": samples, "sigma_min": sigmas})
    median = float(np.median(sigmas))
    logger.info("Scanned %d points of %s on [%g, %g], median sigma_min %.3e",
                n_scan, spec.family, low, high, median)

    hits: List[SpectralHit] = []
    for i in range(1, n_scan - 1):
        if not (sigmas[i] <= sigmas[i - 1] and sigmas[i] <= sigmas[i + 1]):
            continue
        z_star = _refine_minimum(sigma_min, (samples[i - 1], samples[i + 1]))
        block_values = linalg.svdvals(_spectral_block(spec, grid, z_star, branch))
        residual = float(block_values[-1])
        if residual > HIT_RELATIVE_THRESHOLD * median:
            continue
        if any(abs(hit.z_star - z_star) < 1e-8 for hit in hits):
            continue
        multiplicity = int(np.sum(block_values <= MULTIPLICITY_RELATIVE_THRESHOLD * median))
        hits.append(SpectralHit(
            z_star=z_star,
            residual=residual,
            block_norm=float(block_values[0]),
            multiplicity=max(multiplicity, 1),
            branch=branch,
            kernel_z=kernel_parameter(spec, z_star, branch),
        ))
        logger.info("Spectral hit at %.12g (sigma_min %.3e, multiplicity %d)", z_star, residual, multiplicity)
    return scan, hits


def point_spectrum(spec: ExtensionSpec, grid: BoundaryGrid, search_interval: Tuple[float, float],
                   n_scan: int = 200, branch: str = SpectralBranch.GAP.value) -> List[SpectralHit]:
    """Eigenvalues of the extension detected as zeros of the boundary block"""
    return scan_spectrum(spec, grid, search_interval, n_scan, branch)[1]


def eigenfunction(hit: SpectralHit, spec: ExtensionSpec, grid: BoundaryGrid, points: np.ndarray,
                  weights: Optional[np.ndarray] = None) -> np.ndarray:
    """G_z applied to the null density, unit discrete L2 norm on the sample points"""
    cfg = spec.kernel_at(hit.kernel_z)
    layers = spec.layer_set(grid, hit.kernel_z)
    selector, b_theta = coefficient_block(spec, grid)
    block = b_theta - selected_m_circ(layers, spec.components, spec.nodes(grid))
    _, _, vh = linalg.svd(block)
    null_density = vh[-1].conj()

    n = grid.n_nodes
    full = np.zeros(2 * n, dtype=complex)
    full[selector] = null_density
    values = (eval_SL_field(grid, cfg, full[:n], points, weights=layers.density_weights(0))
              + eval_DL_field(grid, cfg, full[n:], points))

    points = np.atleast_2d(points)
    if weights is None:
        weights = np.full(points.shape[0], 1.0 / points.shape[0])
    norm = np.sqrt(np.sum(weights * np.abs(values) ** 2))
    return values / norm if norm > 0 else values


@dataclass
class ScatteringResult:
    """Far field, near field and limiting-absorption check of one scattering solve"""

    k: float
    direction: np.ndarray
    angles: np.ndarray
    far_field: np.ndarray
    near_points: Optional[np.ndarray] = None
    near_field: Optional[np.ndarray] = None
    epsilon_path: List[float] = field(default_factory=list)
    check_points: Optional[np.ndarray] = None
    epsilon_values: List[np.ndarray] = field(default_factory=list)
    epsilon_errors: List[float] = field(default_factory=list)
    converged: bool = True
    condition_number: float = 0.0

    def far_field_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "angle_rad": self.angles,
            "far_field_re": self.far_field.real,
            "far_field_im": self.far_field.imag,
        })

    def near_field_frame(self) -> Optional[pd.DataFrame]:
        if self.near_points is None:
            return None
        return pd.DataFrame({
            "x": self.near_points[:, 0],
            "y": self.near_points[:, 1],
            "u_sc_re": self.near_field.real,
            "u_sc_im": self.near_field.imag,
        })

    def summary(self) -> Dict[str, Any]:
        return {
            "k": self.k,
            "direction": self.direction.tolist(),
            "n_angles": int(self.angles.size),
            "epsilon_path": list(self.epsilon_path),
            "epsilon_errors": list(self.epsilon_errors),
            "converged": self.converged,
            "condition_number": self.condition_number,
        }


def scattered_field(spec: ExtensionSpec, grid: BoundaryGrid, k: float, incident_direction: Sequence[float],
                    angles: Optional[np.ndarray] = None, near_points: Optional[np.ndarray] = None,
                    epsilon_path: Sequence[float] = (1e-2, 1e-3, 1e-4),
                    check_points: Optional[np.ndarray] = None) -> ScatteringResult:
    """u_sc for the plane wave exp(i k d.x), on the outgoing branch z = -k^2"""
    if spec.V0 != 0.0:
        raise ValueError(f"Invalid potential V0 = {spec.V0}. Scattering needs V0 = 0")
    if k <= 0:
        raise ValueError(f"Invalid wavenumber {k}. Must be positive")

    direction = np.asarray(incident_direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    if angles is None:
        angles = 2 * np.pi * np.arange(64) / 64
    angles = np.asarray(angles, dtype=float)
    traces = incident_traces(grid, k, direction)

    on_branch = PerturbedResolvent(spec, grid, -(k ** 2), on_singular="warn")
    phi, varphi = on_branch.densities(traces)
    far = (far_field_SL(grid, k, phi, angles, weights=on_branch.layers.density_weights(0))
           + far_field_DL(grid, k, varphi, angles))

    near = None
    if near_points is not None:
        near_points = np.atleast_2d(np.asarray(near_points, dtype=float))
        near = on_branch.correction_from_traces(traces, near_points)

    if check_points is None:
        radius = 2.0 * float(np.max(np.linalg.norm(grid.nodes, axis=1))) + 1.0
        check_angles = np.array([0.3, 1.9, 3.5, 5.1])
        check_points = radius * np.stack([np.cos(check_angles), np.sin(check_angles)], axis=-1)
    check_points = np.atleast_2d(np.asarray(check_points, dtype=float))
    reference = on_branch.correction_from_traces(traces, check_points)

    values, errors = [], []
    for epsilon in epsilon_path:
        damped = PerturbedResolvent(spec, grid, -(k ** 2) - 1j * epsilon, on_singular="warn")
        value = damped.correction_from_traces(traces, check_points)
        values.append(value)
        errors.append(float(np.max(np.abs(value - reference))))
    converged = all(later < earlier for earlier, later in zip(errors, errors[1:]))
    logger.info("Scattering at k=%g: epsilon-path errors %s", k, ["%.2e" % e for e in errors])

    return ScatteringResult(
        k=float(k),
        direction=direction,
        angles=angles,
        far_field=far,
        near_points=near_points,
        near_field=near,
        epsilon_path=list(epsilon_path),
        check_points=check_points,
        epsilon_values=values,
        epsilon_errors=errors,
        converged=converged,
        condition_number=on_branch.condition_number,
    )


@dataclass
class SvdDiagnostic:
    """Singular values of the resolvent difference and their fitted decay"""

    singular_values: np.ndarray
    slope: float
    intercept: float
    r_value: float
    fit_range: Tuple[int, int]
    n_unknowns: int

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "index": np.arange(1, self.singular_values.size + 1),
            "singular_value": self.singular_values,
        })

    def summary(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_value": self.r_value,
            "fit_range": list(self.fit_range),
            "n_unknowns": self.n_unknowns,
        }


def _gram_root(gram: np.ndarray) -> np.ndarray:
    values, vectors = linalg.eigh(gram)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def resolvent_difference_svd(spec: ExtensionSpec, grid: BoundaryGrid, z: complex = 1.0,
                             fit_range: Tuple[int, int] = (10, 40)) -> SvdDiagnostic:
    """Singular values of G_spec - g_z as an operator on L2(R^2), with a log-log slope fit

    The difference factors as F C W^{-1} F^*, with F the layer potentials of the
    selected nodal densities, C the inverse boundary block and W the density
    weights.  Its nonzero singular values are those of G^{1/2} C W^{-1} G^{1/2},
    where G = F^* F is the layer-potential Gram matrix.
    """
    z = complex(z)
    if z.imag != 0.0 or z.real + spec.V0 <= 0.0:
        raise ValueError(f"Invalid z = {z}. The decay diagnostic needs real z with z + V0 > 0")

    layers = spec.layer_set(grid, z)
    resolvent = PerturbedResolvent(spec, grid, z, layers=layers)
    n_unknowns = int(resolvent.block.shape[0])
    low, high = int(fit_range[0]), int(fit_range[1])
    if not 1 <= low < high <= n_unknowns:
        raise ValueError(f"Invalid fit range [{low}, {high}]. Must satisfy 1 <= low < high <= {n_unknowns}")

    nodes = resolvent.nodes
    weights = np.concatenate([layers.density_weights(c)[nodes] for c in spec.components])
    root = _gram_root(layer_potential_gram(layers, spec.components, nodes))
    singular_values = linalg.svdvals(root @ resolvent.solve_block(root / weights[:, None]))

    index = np.arange(low, high + 1)
    values = singular_values[index - 1]
    positive = values > 0
    if np.sum(positive) >= 3:
        fit = linregress(np.log10(index[positive]), np.log10(values[positive]))
        slope, intercept, r_value = float(fit.slope), float(fit.intercept), float(fit.rvalue)
    else:
        slope = intercept = r_value = float("nan")
    logger.info("Singular-value slope %.3f over j in [%d, %d] for %s", slope, low, high, spec.family)

    return SvdDiagnostic(
        singular_values=singular_values,
        slope=slope,
        intercept=intercept,
        r_value=r_value,
        fit_range=(low, high),
        n_unknowns=n_unknowns,
    )
