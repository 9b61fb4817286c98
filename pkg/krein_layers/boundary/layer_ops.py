"""Nystrom discretization of single, double and hypersingular layer operators

Every weakly singular kernel is written as K = L log r + Q with smooth L and Q.
On periodic panels the log part is integrated with the Kress weights for
log(4 sin^2((t - s)/2)).  On cosine-graded panels the substitution
t = mid + h cos(theta) turns log|t - s| into the same periodic weights on the
doubled theta grid, folded back onto (0, pi).  That rule is exact for densities
with inverse-square-root or square-root endpoint behaviour ("edge" densities).
Densities that stay bounded and nonzero at the endpoints ("bounded" densities,
the single-layer densities of delta and Robin arcs) use Chebyshev product
integration with Fejer weights instead.

Traces use the convention that "plus" is the exterior side and the normal
points from minus to plus.  Jumps are [f] = f_plus - f_minus.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import circulant, toeplitz

from ..core.exceptions import LayerOperatorError, ProximityError
from .geometry import BoundaryGrid, GridPanel
from .kernels import KernelConfig, bessel_I, bessel_K, green_gradient_factor, green_kernel

logger = logging.getLogger(__name__)

DEFAULT_PROXIMITY_FACTOR = 3.0


class Side(Enum):
    """Side of Gamma a one-sided trace is taken from"""
    PLUS = "plus"
    MINUS = "minus"


class LayerTag(Enum):
    """Boundary operators a LayerMatrix can hold"""
    G0SL = "g0SL"
    G1SL_PLUS = "g1SL_plus"
    G1SL_MINUS = "g1SL_minus"
    G0DL_PLUS = "g0DL_plus"
    G0DL_MINUS = "g0DL_minus"
    G1DL = "g1DL"
    DOUBLE_LAYER = "K"
    ADJOINT_DOUBLE_LAYER = "K_prime"


class DensityClass(Enum):
    """Endpoint behaviour of a density on a graded panel"""
    EDGE = "edge"
    BOUNDED = "bounded"


def _side(side) -> Side:
    if isinstance(side, Side):
        return side
    valid_sides = [s.value for s in Side]
    if side not in valid_sides:
        raise ValueError(f"Invalid side: {side}. Must be one of: {valid_sides}")
    return Side(side)


@dataclass
class LayerMatrix:
    """Dense discretization of one boundary operator acting on nodal values"""

    entries: np.ndarray
    tag: str
    z: complex
    grid: BoundaryGrid

    def __post_init__(self):
        valid_tags = [tag.value for tag in LayerTag]
        if self.tag not in valid_tags:
            raise ValueError(f"Invalid operator tag: {self.tag}. Must be one of: {valid_tags}")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError(f"Invalid {self.tag} matrix. Entries must be finite")

    @property
    def shape(self):
        return self.entries.shape

    def apply(self, density: np.ndarray) -> np.ndarray:
        return self.entries @ np.asarray(density)

    def symmetrized(self) -> np.ndarray:
        """W^{1/2} A W^{-1/2}; Hermitian for real kernels"""
        return symmetrize(self.entries, self.grid.density_weights)

    def summary(self) -> Dict[str, Any]:
        return {"tag": self.tag, "z": [self.z.real, self.z.imag], "n_nodes": self.grid.n_nodes}


def symmetrize(matrix: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Conjugate a nodal operator by the square-root quadrature weights"""
    n = matrix.shape[0]
    root = np.sqrt(np.tile(weights, n // weights.size))
    return root[:, None] * matrix / root[None, :]


def kress_weights(n_nodes: int) -> np.ndarray:
    """Periodic weights R[d] for log(4 sin^2) at node offset d, N = 2n nodes"""
    n = n_nodes // 2
    offsets = 2 * np.pi * np.arange(n_nodes) / n_nodes
    m = np.arange(1, n)
    series = np.cos(np.outer(offsets, m)) / m
    return -(2 * np.pi / n) * series.sum(axis=1) - (np.pi / n ** 2) * np.cos(n * offsets)


def periodic_derivative(n_nodes: int) -> np.ndarray:
    """Spectral differentiation matrix on N equispaced periodic nodes"""
    k = np.arange(1, n_nodes)
    column = np.zeros(n_nodes)
    column[1:] = 0.5 * (-1.0) ** k / np.tan(np.pi * k / n_nodes)
    return toeplitz(column, -column)


@dataclass
class _SplitKernel:
    """Kernel values with their log coefficient and diagonal limits"""

    kernel: np.ndarray
    log_part: np.ndarray
    log_diagonal: np.ndarray
    smooth_diagonal: np.ndarray


def _pairwise(grid: BoundaryGrid):
    diff = grid.nodes[:, None, :] - grid.nodes[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(r, 1.0)
    return diff, r


def _single_layer_split(grid: BoundaryGrid, cfg: KernelConfig) -> _SplitKernel:
    _, r = _pairwise(grid)
    n = grid.n_nodes
    return _SplitKernel(
        kernel=green_kernel(cfg, r),
        log_part=-bessel_I(0, cfg.kappa * r) / (2 * np.pi),
        log_diagonal=np.full(n, -1.0 / (2 * np.pi), dtype=complex),
        smooth_diagonal=np.full(n, (-np.euler_gamma - np.log(cfg.kappa / 2)) / (2 * np.pi), dtype=complex),
    )


def _double_layer_split(grid: BoundaryGrid, cfg: KernelConfig, adjoint: bool) -> _SplitKernel:
    diff, r = _pairwise(grid)
    normals = grid.normals[:, None, :] if adjoint else grid.normals[None, :, :]
    projection = np.sum(diff * normals, axis=2)
    sign = -1.0 if adjoint else 1.0
    log_part = sign * cfg.kappa * bessel_I(1, cfg.kappa * r) * projection / (2 * np.pi * r)
    np.fill_diagonal(log_part, 0.0)
    return _SplitKernel(
        kernel=sign * green_gradient_factor(cfg, r) * projection,
        log_part=log_part,
        log_diagonal=np.zeros(grid.n_nodes, dtype=complex),
        smooth_diagonal=(grid.curvature_numerator / (4 * np.pi)).astype(complex),
    )


def _periodic_self_block(grid: BoundaryGrid, panel: GridPanel, split: _SplitKernel) -> np.ndarray:
    idx = panel.indices
    n = panel.size
    speeds = grid.speeds[idx]
    kernel = split.kernel[idx, idx]
    log_part = split.log_part[idx, idx]

    offsets = grid.params[idx][:, None] - grid.params[idx][None, :]
    log_sine = np.log(4 * np.sin(0.5 * offsets) ** 2 + np.eye(n))
    a = 0.5 * log_part * speeds[None, :]
    b = speeds[None, :] * (kernel - 0.5 * log_part * log_sine)
    diagonal = speeds * (split.log_diagonal[idx] * np.log(speeds) + split.smooth_diagonal[idx])
    np.fill_diagonal(b, diagonal)
    np.fill_diagonal(a, 0.5 * split.log_diagonal[idx] * speeds)
    return circulant(kress_weights(n)) * a + (2 * np.pi / n) * b


def _graded_self_block(grid: BoundaryGrid, panel: GridPanel, split: _SplitKernel) -> np.ndarray:
    idx = panel.indices
    m = panel.size
    speeds = grid.speeds[idx]
    theta = panel.theta
    jacobian = speeds * panel.half_width * np.sin(theta)
    kernel = split.kernel[idx, idx]
    log_part = split.log_part[idx, idx]

    cosines = np.cos(theta)
    log_cosine = np.log(np.abs(cosines[:, None] - cosines[None, :]) + np.eye(m))
    a = log_part * jacobian[None, :]
    b = jacobian[None, :] * (kernel - log_part * log_cosine)
    diagonal = jacobian * (split.log_diagonal[idx] * np.log(speeds * panel.half_width) + split.smooth_diagonal[idx])
    np.fill_diagonal(b, diagonal)
    np.fill_diagonal(a, split.log_diagonal[idx] * jacobian)

    doubled = kress_weights(2 * m)
    i, j = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    folded = doubled[(i - j) % (2 * m)] + doubled[(i + j + 1) % (2 * m)]
    step = np.pi / m
    return a * (0.5 * folded - step * np.log(2.0)) + step * b


def chebyshev_log_weights(theta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Product weights for log|x_s - y| and Fejer weights at x = cos(theta)

    theta holds the m angles pi (2s+1) / (2m) in any order.  Row s of the first
    matrix integrates log|x_s - y| f(y) over [-1, 1] for f interpolated at the
    nodes; the second array integrates f itself.
    """
    theta = np.asarray(theta, dtype=float)
    m = theta.size
    x = np.cos(theta)
    order = np.arange(m + 1)
    moments = np.zeros(m + 1)
    even = order[order % 2 == 0]
    moments[even] = 2.0 / (1.0 - even.astype(float) ** 2)

    # PV integrals of T_n(y) / (y - x) by the Chebyshev recurrence
    hilbert = np.empty((m + 1, m))
    hilbert[0] = np.log((1.0 - x) / (1.0 + x))
    hilbert[1] = 2.0 + x * hilbert[0]
    for n in range(1, m):
        hilbert[n + 1] = 2.0 * moments[n] + 2.0 * x * hilbert[n] - hilbert[n - 1]

    # log|x - y| against T_n'(y), by parts
    signs = (-1.0) ** order
    derivative = np.log(1.0 - x)[None, :] - signs[:, None] * np.log(1.0 + x)[None, :] - hilbert

    log_moments = np.empty((m, m))
    log_moments[0] = derivative[1]
    log_moments[1] = 0.25 * derivative[2]
    l = np.arange(2, m)
    log_moments[2:] = 0.5 * (derivative[l + 1] / (l + 1)[:, None] - derivative[l - 1] / (l - 1)[:, None])

    interpolation = (2.0 / m) * np.cos(np.outer(np.arange(m), theta))
    interpolation[0] *= 0.5
    return log_moments.T @ interpolation, moments[:m] @ interpolation


def _graded_bounded_block(grid: BoundaryGrid, panel: GridPanel, split: _SplitKernel) -> np.ndarray:
    idx = panel.indices
    m = panel.size
    scale = grid.speeds[idx] * panel.half_width
    kernel = split.kernel[idx, idx]
    log_part = split.log_part[idx, idx].copy()

    cosines = np.cos(panel.theta)
    log_cosine = np.log(np.abs(cosines[:, None] - cosines[None, :]) + np.eye(m))
    remainder = kernel - log_part * log_cosine
    np.fill_diagonal(remainder, split.log_diagonal[idx] * np.log(scale) + split.smooth_diagonal[idx])
    np.fill_diagonal(log_part, split.log_diagonal[idx])

    log_weights, fejer = chebyshev_log_weights(panel.theta)
    return (log_weights * log_part + fejer[None, :] * remainder) * scale[None, :]


def _assemble_split(grid: BoundaryGrid, split: _SplitKernel, bounded: bool = False) -> np.ndarray:
    weights = grid.weights if bounded else grid.density_weights
    matrix = split.kernel * weights[None, :]
    for panel in grid.panels:
        idx = panel.indices
        if panel.kind == "periodic":
            matrix[idx, idx] = _periodic_self_block(grid, panel, split)
        elif bounded:
            matrix[idx, idx] = _graded_bounded_block(grid, panel, split)
        else:
            matrix[idx, idx] = _graded_self_block(grid, panel, split)
    return matrix


def _single_layer_matrix(grid: BoundaryGrid, cfg: KernelConfig, bounded: bool = False) -> np.ndarray:
    return _assemble_split(grid, _single_layer_split(grid, cfg), bounded)


def _double_layer_matrix(grid: BoundaryGrid, cfg: KernelConfig, adjoint: bool = False,
                         bounded: bool = False) -> np.ndarray:
    return _assemble_split(grid, _double_layer_split(grid, cfg, adjoint), bounded)


def _normal_sandwich(grid: BoundaryGrid, single_layer: np.ndarray) -> np.ndarray:
    """sum_k diag(nu_k) S diag(nu_k)"""
    total = np.zeros_like(single_layer)
    for k in range(2):
        nu = grid.normals[:, k]
        total += nu[:, None] * single_layer * nu[None, :]
    return total


def _hypersingular_matrix(grid: BoundaryGrid, cfg: KernelConfig, single_layer: np.ndarray) -> np.ndarray:
    """Maue form: d/ds S d/ds - kappa^2 nu . S nu"""
    if len(grid.panels) != 1:
        raise LayerOperatorError("Hypersingular operator needs a single-panel grid")
    panel = grid.panels[0]
    if panel.kind == "periodic":
        arclength_derivative = periodic_derivative(grid.n_nodes) / grid.speeds[:, None]
        tangential = arclength_derivative @ single_layer @ arclength_derivative
    else:
        m = panel.size
        jacobian = grid.speeds * panel.half_width * np.sin(panel.theta)
        doubled = periodic_derivative(2 * m)
        mirrored = doubled[:m, m:][:, ::-1]
        even = doubled[:m, :m] + mirrored
        odd = doubled[:m, :m] - mirrored
        row_scale = -1.0 / jacobian[:, None]
        tangential = (row_scale * even) @ single_layer @ (row_scale * odd)
    return tangential - cfg.kappa ** 2 * _normal_sandwich(grid, single_layer)


def assemble_g0SL(grid: BoundaryGrid, cfg: KernelConfig) -> LayerMatrix:
    """gamma_0 SL_z, continuous across Gamma"""
    entries = _single_layer_matrix(grid, cfg)
    logger.debug("Assembled g0SL on %d nodes at z=%s", grid.n_nodes, cfg.z)
    return LayerMatrix(entries=entries, tag=LayerTag.G0SL.value, z=cfg.z, grid=grid)


def assemble_double_layer(grid: BoundaryGrid, cfg: KernelConfig) -> LayerMatrix:
    """Principal-value double layer K_z"""
    return LayerMatrix(entries=_double_layer_matrix(grid, cfg), tag=LayerTag.DOUBLE_LAYER.value, z=cfg.z, grid=grid)


def assemble_adjoint_double_layer(grid: BoundaryGrid, cfg: KernelConfig) -> LayerMatrix:
    """Principal-value normal derivative of the single layer K'_z"""
    entries = _double_layer_matrix(grid, cfg, adjoint=True)
    return LayerMatrix(entries=entries, tag=LayerTag.ADJOINT_DOUBLE_LAYER.value, z=cfg.z, grid=grid)


def assemble_g1SL(grid: BoundaryGrid, cfg: KernelConfig, side="plus") -> LayerMatrix:
    """gamma_1^{+-} SL_z = -+ 1/2 + K'_z"""
    side = _side(side)
    jump = -0.5 if side == Side.PLUS else 0.5
    entries = jump * np.eye(grid.n_nodes) + _double_layer_matrix(grid, cfg, adjoint=True)
    tag = LayerTag.G1SL_PLUS if side == Side.PLUS else LayerTag.G1SL_MINUS
    return LayerMatrix(entries=entries, tag=tag.value, z=cfg.z, grid=grid)


def assemble_g0DL(grid: BoundaryGrid, cfg: KernelConfig, side="plus") -> LayerMatrix:
    """gamma_0^{+-} DL_z = +- 1/2 + K_z"""
    side = _side(side)
    jump = 0.5 if side == Side.PLUS else -0.5
    entries = jump * np.eye(grid.n_nodes) + _double_layer_matrix(grid, cfg)
    tag = LayerTag.G0DL_PLUS if side == Side.PLUS else LayerTag.G0DL_MINUS
    return LayerMatrix(entries=entries, tag=tag.value, z=cfg.z, grid=grid)


def assemble_g1DL(grid: BoundaryGrid, cfg: KernelConfig, side: Optional[str] = None) -> LayerMatrix:
    """gamma_1 DL_z; both sides agree, so side is accepted and ignored"""
    if side is not None:
        _side(side)
    entries = _hypersingular_matrix(grid, cfg, _single_layer_matrix(grid, cfg))
    logger.debug("Assembled g1DL on %d nodes at z=%s", grid.n_nodes, cfg.z)
    return LayerMatrix(entries=entries, tag=LayerTag.G1DL.value, z=cfg.z, grid=grid)


class LayerSet:
    """Lazily assembled S, K, K' and T for one grid and one spectral parameter"""

    OPERATORS = ["S", "K", "K_prime", "T"]

    def __init__(self, grid: BoundaryGrid, cfg: KernelConfig, single_layer_density: str = DensityClass.EDGE.value):
        valid_classes = [c.value for c in DensityClass]
        if single_layer_density not in valid_classes:
            raise ValueError(f"Invalid density class: {single_layer_density}. Must be one of: {valid_classes}")
        self.grid = grid
        self.cfg = cfg
        self.single_layer_density = single_layer_density
        self._cache: Dict[str, np.ndarray] = {}

    @property
    def bounded(self) -> bool:
        """Whether single-layer densities use the bounded-density rule"""
        return self.single_layer_density == DensityClass.BOUNDED.value

    def density_weights(self, component: int) -> np.ndarray:
        """Nodal weights for densities of trace component 0 (single layer) or 1 (double layer)"""
        if component == 0 and self.bounded:
            return self.grid.weights
        return self.grid.density_weights

    def _edge_single_layer(self) -> np.ndarray:
        if not self.bounded:
            return self.operator("S")
        if "S_edge" not in self._cache:
            self._cache["S_edge"] = _single_layer_matrix(self.grid, self.cfg)
        return self._cache["S_edge"]

    def operator(self, name: str) -> np.ndarray:
        if name not in self.OPERATORS:
            raise ValueError(f"Invalid operator: {name}. Must be one of: {self.OPERATORS}")
        if name not in self._cache:
            if name == "S":
                self._cache[name] = _single_layer_matrix(self.grid, self.cfg, self.bounded)
            elif name == "K":
                self._cache[name] = _double_layer_matrix(self.grid, self.cfg)
            elif name == "K_prime":
                self._cache[name] = _double_layer_matrix(self.grid, self.cfg, adjoint=True, bounded=self.bounded)
            else:
                # the Maue form differentiates double-layer densities, which are edge densities
                self._cache[name] = _hypersingular_matrix(self.grid, self.cfg, self._edge_single_layer())
        return self._cache[name]

    @property
    def S(self) -> np.ndarray:
        return self.operator("S")

    @property
    def K(self) -> np.ndarray:
        return self.operator("K")

    @property
    def K_prime(self) -> np.ndarray:
        return self.operator("K_prime")

    @property
    def T(self) -> np.ndarray:
        return self.operator("T")

    def m_circ(self, components: Sequence[int] = (0, 1)) -> np.ndarray:
        """M circ_z = [[S, K], [K', T]] restricted to the given trace components"""
        layout = [["S", "K"], ["K_prime", "T"]]
        return np.block([[self.operator(layout[i][j]) for j in components] for i in components])


def _gram_split(grid: BoundaryGrid, cfg: KernelConfig, row: int, col: int) -> _SplitKernel:
    """L2(R^2) products of layer kernels at two nodes, from int g(x, a) g(x, b) dx = r K1(kappa r) / (4 pi kappa)"""
    diff, r = _pairwise(grid)
    n = grid.n_nodes
    kappa = cfg.kappa
    zeros = np.zeros(n, dtype=complex)
    row_projection = np.sum(diff * grid.normals[:, None, :], axis=2)
    col_projection = np.sum(diff * grid.normals[None, :, :], axis=2)

    if row == 0 and col == 0:
        log_part = r * bessel_I(1, kappa * r) / (4 * np.pi * kappa)
        np.fill_diagonal(log_part, 0.0)
        return _SplitKernel(
            kernel=r * bessel_K(1, kappa * r) / (4 * np.pi * kappa),
            log_part=log_part,
            log_diagonal=zeros,
            smooth_diagonal=np.full(n, 1.0 / (4 * np.pi * kappa ** 2), dtype=complex),
        )
    if row != col:
        projection = col_projection if row == 0 else -row_projection
        log_part = -bessel_I(0, kappa * r) * projection / (4 * np.pi)
        np.fill_diagonal(log_part, 0.0)
        return _SplitKernel(
            kernel=bessel_K(0, kappa * r) * projection / (4 * np.pi),
            log_part=log_part,
            log_diagonal=zeros,
            smooth_diagonal=zeros.copy(),
        )

    normal_product = grid.normals @ grid.normals.T
    transverse = row_projection * col_projection / r
    log_part = -(bessel_I(0, kappa * r) * normal_product + kappa * bessel_I(1, kappa * r) * transverse) / (4 * np.pi)
    np.fill_diagonal(log_part, -1.0 / (4 * np.pi))
    return _SplitKernel(
        kernel=(bessel_K(0, kappa * r) * normal_product - kappa * bessel_K(1, kappa * r) * transverse) / (4 * np.pi),
        log_part=log_part,
        log_diagonal=np.full(n, -1.0 / (4 * np.pi), dtype=complex),
        smooth_diagonal=np.full(n, (-np.euler_gamma - np.log(kappa / 2)) / (4 * np.pi), dtype=complex),
    )


def layer_potential_gram(layers: LayerSet, components: Sequence[int] = (0, 1),
                         nodes: Optional[np.ndarray] = None) -> np.ndarray:
    """Gram matrix of the layer potentials of nodal densities in L2(R^2)

    Entry (a, b) is the inner product of SL_z or DL_z applied to the nodal
    densities a and b, ordered like the selected trace components.  Needs a
    real positive kappa.
    """
    cfg = layers.cfg
    kappa = complex(cfg.kappa)
    if abs(kappa.imag) > 1e-14 or kappa.real <= 0:
        raise ValueError(f"Invalid kappa {kappa}. The Gram matrix needs a real positive kappa")
    grid = layers.grid
    if nodes is None:
        nodes = np.arange(grid.n_nodes)
    window = np.ix_(nodes, nodes)

    rows = []
    for row in components:
        weights = layers.density_weights(row)[:, None]
        blocks = []
        for col in components:
            matrix = _assemble_split(grid, _gram_split(grid, cfg, row, col), bounded=(col == 0 and layers.bounded))
            blocks.append((weights * matrix)[window])
        rows.append(blocks)
    gram = np.block(rows).real
    logger.debug("Assembled layer-potential Gram matrix of size %d", gram.shape[0])
    return 0.5 * (gram + gram.T)


@dataclass
class WeylBlock:
    """2x2 block boundary operator ordered (g0SL, g0DL; g1SL, g1DL)"""

    matrix: np.ndarray
    z: complex
    lambda0: Optional[complex] = None

    @property
    def n_nodes(self) -> int:
        return self.matrix.shape[0] // 2

    def block(self, row: int, col: int) -> np.ndarray:
        n = self.n_nodes
        return self.matrix[row * n:(row + 1) * n, col * n:(col + 1) * n]

    def symmetrized(self, weights: np.ndarray) -> np.ndarray:
        return symmetrize(self.matrix, weights)


def m_circ_block(grid: BoundaryGrid, cfg_at_z: KernelConfig) -> WeylBlock:
    """Averaged traces of G_z, the M circ operator"""
    return WeylBlock(matrix=LayerSet(grid, cfg_at_z).m_circ(), z=cfg_at_z.z)


def weyl_block(grid: BoundaryGrid, cfg_at_z: KernelConfig, cfg_at_lambda0: KernelConfig) -> WeylBlock:
    """M_z = M circ_lambda0 - M circ_z"""
    if cfg_at_z.z == cfg_at_lambda0.z and cfg_at_z.V0 == cfg_at_lambda0.V0:
        matrix = np.zeros((2 * grid.n_nodes, 2 * grid.n_nodes), dtype=complex)
    else:
        matrix = LayerSet(grid, cfg_at_lambda0).m_circ() - LayerSet(grid, cfg_at_z).m_circ()
    return WeylBlock(matrix=matrix, z=cfg_at_z.z, lambda0=cfg_at_lambda0.z)


def _check_proximity(grid: BoundaryGrid, points: np.ndarray, factor: float) -> np.ndarray:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    diff = points[:, None, :] - grid.nodes[None, :, :]
    r = np.linalg.norm(diff, axis=2)
    limit = factor * grid.spacing
    if np.min(r) < limit:
        raise ProximityError(f"Evaluation point within {np.min(r):.3e} of the boundary (limit {limit:.3e})")
    return diff, r


def eval_SL_field(grid: BoundaryGrid, cfg: KernelConfig, density: np.ndarray, points: np.ndarray,
                  proximity_factor: float = DEFAULT_PROXIMITY_FACTOR,
                  weights: Optional[np.ndarray] = None) -> np.ndarray:
    """SL_z density at points off Gamma"""
    _, r = _check_proximity(grid, points, proximity_factor)
    weights = grid.density_weights if weights is None else weights
    return green_kernel(cfg, r) @ (weights * np.asarray(density))


def eval_DL_field(grid: BoundaryGrid, cfg: KernelConfig, density: np.ndarray, points: np.ndarray,
                  proximity_factor: float = DEFAULT_PROXIMITY_FACTOR) -> np.ndarray:
    """DL_z density at points off Gamma"""
    diff, r = _check_proximity(grid, points, proximity_factor)
    projection = np.sum(diff * grid.normals[None, :, :], axis=2)
    kernel = green_gradient_factor(cfg, r) * projection
    return kernel @ (grid.density_weights * np.asarray(density))


def far_field_SL(grid: BoundaryGrid, k: float, density: np.ndarray, angles: np.ndarray,
                 weights: Optional[np.ndarray] = None) -> np.ndarray:
    """Coefficient of exp(i k r) / sqrt(r) for the outgoing single layer"""
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    phases = np.exp(-1j * k * directions @ grid.nodes.T)
    scale = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * k)
    weights = grid.density_weights if weights is None else weights
    return scale * phases @ (weights * np.asarray(density))


def far_field_DL(grid: BoundaryGrid, k: float, density: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """Coefficient of exp(i k r) / sqrt(r) for the outgoing double layer"""
    directions = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    phases = np.exp(-1j * k * directions @ grid.nodes.T)
    dipole = -1j * k * directions @ grid.normals.T
    scale = np.exp(1j * np.pi / 4) / np.sqrt(8 * np.pi * k)
    return scale * (phases * dipole) @ (grid.density_weights * np.asarray(density))


def circle_layer_symbols(cfg: KernelConfig, radius: float, n: int) -> Dict[str, complex]:
    """Fourier multipliers of S, K, K' and T on a circle for mode n"""
    x = cfg.kappa * radius
    i_n = complex(bessel_I(n, x))
    k_n = complex(bessel_K(n, x))
    i_prime = 0.5 * complex(bessel_I(abs(n - 1), x) + bessel_I(n + 1, x))
    k_prime = -0.5 * complex(bessel_K(abs(n - 1), x) + bessel_K(n + 1, x))
    double_layer = 0.5 * x * (i_n * k_prime + i_prime * k_n)
    return {
        "S": radius * i_n * k_n,
        "K": double_layer,
        "K_prime": double_layer,
        "T": cfg.kappa ** 2 * radius * i_prime * k_prime,
        "DtN": 1.0 / (radius * i_n * k_n),
    }
