"""(Pi, Theta) pairs for Dirichlet, Neumann, Robin, delta and delta-prime conditions

The boundary trace vector is [phi; varphi] with phi paired against gamma_0 and
varphi against gamma_1, each sampled at the grid nodes.  A condition selects
trace components (Pi) and a matrix on them.  Two equivalent blocks are
provided: Theta + Pi M_z Pi' and B_Theta - Pi M circ_z Pi', where
Theta = B_Theta - Pi M circ_lambda0 Pi'.
"""

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from ..boundary.geometry import ArcSpec, BoundaryGrid, CurveParam, discretize_curve, graded_arc_grid
from ..boundary.kernels import KernelConfig
from ..boundary.layer_ops import DensityClass, LayerSet, symmetrize
from ..core.exceptions import CoefficientDegeneracyError
from ..core.extension import compress_form

logger = logging.getLogger(__name__)

ROBIN_JUMP_FLOOR = 1e-8
COUPLING_FLOOR = 1e-14

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_CONSTANT = re.compile(rf"^\s*({_NUMBER})\s*$")
_TRIGONOMETRIC = re.compile(
    rf"^\s*({_NUMBER})\s*([+-])\s*({_NUMBER})\s*\*\s*(cos|sin)\(\s*({_NUMBER})\s*\*\s*t\s*\)\s*$"
)


class Family(Enum):
    """Boundary-condition families"""
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"
    ROBIN = "robin"
    DELTA = "delta"
    DELTA_PRIME = "delta_prime"


class Region(Enum):
    """Where the condition is imposed"""
    FULL = "full"
    ARC = "arc"


FAMILY_COEFFICIENTS = {
    Family.DIRICHLET.value: [],
    Family.NEUMANN.value: [],
    Family.ROBIN.value: ["b_plus", "b_minus"],
    Family.DELTA.value: ["alpha"],
    Family.DELTA_PRIME.value: ["beta"],
}

FAMILY_COMPONENTS = {
    Family.DIRICHLET.value: (0,),
    Family.NEUMANN.value: (1,),
    Family.ROBIN.value: (0, 1),
    Family.DELTA.value: (0,),
    Family.DELTA_PRIME.value: (1,),
}


@dataclass
class CoefficientFunction:
    """Coefficient c0, c0 + c1*cos(m*t) or c0 + c1*sin(m*t) in the curve parameter t"""

    expression: str
    c0: float = field(init=False)
    c1: float = field(init=False)
    m: float = field(init=False)
    kind: str = field(init=False)

    def __post_init__(self):
        self.expression = str(self.expression)
        constant = _CONSTANT.match(self.expression)
        trigonometric = _TRIGONOMETRIC.match(self.expression)
        if constant:
            self.c0, self.c1, self.m, self.kind = float(constant.group(1)), 0.0, 0.0, "const"
        elif trigonometric:
            c0, sign, c1, kind, m = trigonometric.groups()
            self.c0 = float(c0)
            self.c1 = float(c1) if sign == "+" else -float(c1)
            self.m = float(m)
            self.kind = kind
        else:
            raise ValueError(
                f"Invalid coefficient expression: {self.expression!r}. "
                "Must be one of: 'c0', 'c0 + c1*cos(m*t)', 'c0 + c1*sin(m*t)'"
            )

    @classmethod
    def from_value(cls, value: Union[float, str, "CoefficientFunction"]) -> "CoefficientFunction":
        if isinstance(value, CoefficientFunction):
            return value
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return cls(repr(float(value)))
        return cls(str(value))

    def __call__(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "const":
            return np.full(t.shape, self.c0)
        wave = np.cos(self.m * t) if self.kind == "cos" else np.sin(self.m * t)
        return self.c0 + self.c1 * wave

    def to_dict(self) -> str:
        return self.expression


@dataclass
class ExtensionSpec:
    """Boundary-condition family, coefficients and region"""

    family: str
    region: str = Region.FULL.value
    arc: Optional[ArcSpec] = None
    b_plus: Optional[Any] = None
    b_minus: Optional[Any] = None
    alpha: Optional[Any] = None
    beta: Optional[Any] = None
    V0: float = 0.0
    lambda0: float = 1.0

    def __post_init__(self):
        valid_families = [family.value for family in Family]
        if self.family not in valid_families:
            raise ValueError(f"Invalid family: {self.family}. Must be one of: {valid_families}")
        valid_regions = [region.value for region in Region]
        if self.region not in valid_regions:
            raise ValueError(f"Invalid region: {self.region}. Must be one of: {valid_regions}")
        if self.region == Region.ARC.value and self.arc is None:
            raise ValueError("Invalid region. An arc region needs an ArcSpec")
        if self.lambda0 + self.V0 <= 0:
            raise ValueError(f"Invalid lambda0 {self.lambda0}. lambda0 + V0 must be positive")

        for name in FAMILY_COEFFICIENTS[self.family]:
            value = getattr(self, name)
            if value is None:
                raise ValueError(f"Invalid {self.family} condition. Coefficient {name} is required")
            setattr(self, name, CoefficientFunction.from_value(value))

    @property
    def components(self) -> Tuple[int, ...]:
        return FAMILY_COMPONENTS[self.family]

    @property
    def is_arc(self) -> bool:
        return self.region == Region.ARC.value

    def kernel_at(self, z: complex) -> KernelConfig:
        return KernelConfig(V0=self.V0, z=z)

    @property
    def single_layer_density(self) -> str:
        """Endpoint class of the single-layer density: bounded for delta and Robin arcs"""
        if self.is_arc and self.family in (Family.DELTA.value, Family.ROBIN.value):
            return DensityClass.BOUNDED.value
        return DensityClass.EDGE.value

    def layer_set(self, grid: BoundaryGrid, z: complex) -> LayerSet:
        return LayerSet(grid, self.kernel_at(z), single_layer_density=self.single_layer_density)

    @property
    def lambda0_config(self) -> KernelConfig:
        return KernelConfig(V0=self.V0, z=self.lambda0)

    def build_grid(self, curve: CurveParam, n_gamma: int) -> BoundaryGrid:
        """Periodic grid of Gamma or graded grid of Sigma"""
        if self.is_arc:
            return graded_arc_grid(curve, self.arc)
        return discretize_curve(curve, n_gamma)

    def nodes(self, grid: BoundaryGrid) -> np.ndarray:
        """Grid nodes carrying the condition"""
        if self.is_arc and grid.arc is not None:
            return grid.arc.sigma
        return np.arange(grid.n_nodes)

    def sample(self, name: str, grid: BoundaryGrid) -> np.ndarray:
        coefficient = getattr(self, name)
        if coefficient is None:
            raise ValueError(f"Invalid coefficient: {name} is not set for {self.family}")
        return coefficient(grid.params[self.nodes(grid)])

    def to_dict(self) -> Dict[str, Any]:
        data = {"family": self.family, "region": self.region, "V0": self.V0, "lambda0": self.lambda0}
        if self.arc is not None:
            data["arc"] = self.arc.to_dict()
        data["coefficients"] = {name: getattr(self, name).to_dict() for name in FAMILY_COEFFICIENTS[self.family]}
        return data


@dataclass
class ThetaBlock:
    """Selected trace coordinates with Theta and B_Theta on them"""

    components: Tuple[int, ...]
    nodes: np.ndarray
    selector: np.ndarray
    theta_matrix: np.ndarray
    b_theta: np.ndarray
    m_circ_lambda0: np.ndarray
    weights: np.ndarray

    def symmetrized(self) -> np.ndarray:
        return symmetrize(self.theta_matrix, self.weights)

    def hermitian_defect(self) -> float:
        sym = self.symmetrized()
        return float(np.max(np.abs(sym - sym.conj().T)))


def selector_for(components: Tuple[int, ...], nodes: np.ndarray, n_nodes: int) -> np.ndarray:
    """Indices of the chosen components in the 2N trace vector"""
    return np.concatenate([component * n_nodes + nodes for component in components])


def selected_m_circ(layers: LayerSet, components: Tuple[int, ...], nodes: np.ndarray) -> np.ndarray:
    """Pi M circ_z Pi' on the selected components and nodes"""
    layout = [["S", "K"], ["K_prime", "T"]]
    window = np.ix_(nodes, nodes)
    return np.block([[layers.operator(layout[i][j])[window] for j in components] for i in components])


def _robin_blocks(spec: ExtensionSpec, grid: BoundaryGrid) -> np.ndarray:
    b_plus = spec.sample("b_plus", grid)
    b_minus = spec.sample("b_minus", grid)
    jump = b_plus - b_minus
    if np.min(np.abs(jump)) < ROBIN_JUMP_FLOOR:
        raise CoefficientDegeneracyError(f"Robin jump b_plus - b_minus vanishes (min |[b]| = {np.min(np.abs(jump)):.3e})")
    if spec.is_arc and np.max(jump) >= 0:
        raise CoefficientDegeneracyError("Arc Robin condition needs b_plus - b_minus < 0 at every node")
    mean = 0.5 * (b_plus + b_minus)
    return np.block([
        [np.diag(1.0 / jump), np.diag(mean / jump)],
        [np.diag(mean / jump), np.diag(b_plus * b_minus / jump)],
    ])


def _checked_coupling(spec: ExtensionSpec, grid: BoundaryGrid, name: str) -> np.ndarray:
    values = spec.sample(name, grid)
    if np.min(np.abs(values)) < COUPLING_FLOOR:
        raise CoefficientDegeneracyError(f"Coupling {name} vanishes at a node (min |{name}| = {np.min(np.abs(values)):.3e})")
    return values


def coefficient_block(spec: ExtensionSpec, grid: BoundaryGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Selector and B_Theta built from the coefficients alone"""
    nodes = spec.nodes(grid)
    selector = selector_for(spec.components, nodes, grid.n_nodes)
    size = nodes.size

    if spec.family in (Family.DIRICHLET.value, Family.NEUMANN.value):
        b_theta = np.zeros((size, size))
    elif spec.family == Family.ROBIN.value:
        b_theta = -_robin_blocks(spec, grid)
    elif spec.family == Family.DELTA.value:
        b_theta = -np.diag(1.0 / _checked_coupling(spec, grid, "alpha"))
    else:
        b_theta = np.diag(1.0 / _checked_coupling(spec, grid, "beta"))
    return selector, b_theta.astype(complex)


def build_theta(spec: ExtensionSpec, grid: BoundaryGrid, layers_lambda0: Optional[LayerSet] = None) -> ThetaBlock:
    """Theta = B_Theta - Pi M circ_lambda0 Pi'"""
    if layers_lambda0 is None:
        layers_lambda0 = spec.layer_set(grid, spec.lambda0)
    nodes = spec.nodes(grid)
    selector, b_theta = coefficient_block(spec, grid)
    m_circ = selected_m_circ(layers_lambda0, spec.components, nodes)
    weights = np.concatenate([layers_lambda0.density_weights(c)[nodes] for c in spec.components])
    logger.debug("Built %s theta on %d coordinates", spec.family, selector.size)
    return ThetaBlock(
        components=spec.components,
        nodes=nodes,
        selector=selector,
        theta_matrix=b_theta - m_circ,
        b_theta=b_theta,
        m_circ_lambda0=m_circ,
        weights=weights,
    )


def krein_block(theta_block: ThetaBlock, layers_z: LayerSet, form: str = "c1") -> np.ndarray:
    """Theta + Pi M_z Pi' ("t1") or B_Theta - Pi M circ_z Pi' ("c1")"""
    valid_forms = ["c1", "t1"]
    if form not in valid_forms:
        raise ValueError(f"Invalid block form: {form}. Must be one of: {valid_forms}")
    m_circ_z = selected_m_circ(layers_z, theta_block.components, theta_block.nodes)
    if form == "c1":
        return theta_block.b_theta - m_circ_z
    return theta_block.theta_matrix + (theta_block.m_circ_lambda0 - m_circ_z)


def _desymmetrize(matrix: np.ndarray, weights: np.ndarray) -> np.ndarray:
    root = np.sqrt(weights)
    return matrix * root[None, :] / root[:, None]


def compress_theta(theta_block: ThetaBlock, component: int) -> ThetaBlock:
    """Compress the form of Theta onto a single trace component

    The compression runs in the weighted inner product, so Theta must be
    Hermitian there (see ThetaBlock.hermitian_defect).
    """
    if component not in theta_block.components:
        raise ValueError(f"Invalid component: {component}. Must be one of: {list(theta_block.components)}")
    position = theta_block.components.index(component)
    size = theta_block.nodes.size
    block = slice(position * size, (position + 1) * size)

    total = len(theta_block.components) * size
    basis = np.eye(total)[:, block]
    projection = basis @ basis.T
    weights = theta_block.weights[block]
    theta_form = compress_form(theta_block.symmetrized(), projection, basis=basis)
    b_form = compress_form(symmetrize(theta_block.b_theta, theta_block.weights), projection, basis=basis)
    eigenvalues = theta_form.eigenvalues()
    logger.debug("Compressed theta to component %d, form eigenvalue range [%.3e, %.3e]",
                 component, eigenvalues[0], eigenvalues[-1])

    theta_matrix = _desymmetrize(theta_form.matrix, weights)
    b_theta = _desymmetrize(b_form.matrix, weights)
    return ThetaBlock(
        components=(component,),
        nodes=theta_block.nodes,
        selector=theta_block.selector[block],
        theta_matrix=theta_matrix,
        b_theta=b_theta,
        m_circ_lambda0=b_theta - theta_matrix,
        weights=weights,
    )


def birman_block(spec: ExtensionSpec, grid: BoundaryGrid, z: complex, layers: Optional[LayerSet] = None) -> np.ndarray:
    """The matrix inverted in the family's resolvent formula"""
    if layers is None:
        layers = spec.layer_set(grid, z)
    nodes = spec.nodes(grid)
    window = np.ix_(nodes, nodes)
    identity = np.eye(nodes.size)

    if spec.family == Family.DIRICHLET.value:
        return layers.S[window]
    if spec.family == Family.NEUMANN.value:
        return layers.T[window]
    if spec.family == Family.ROBIN.value:
        return _robin_blocks(spec, grid) + selected_m_circ(layers, spec.components, nodes)
    if spec.family == Family.DELTA.value:
        alpha = _checked_coupling(spec, grid, "alpha")
        if spec.is_arc:
            return identity + alpha[:, None] * layers.S[window]
        return np.diag(1.0 / alpha) + layers.S[window]
    beta = _checked_coupling(spec, grid, "beta")
    if spec.is_arc:
        return identity - beta[:, None] * layers.T[window]
    return np.diag(1.0 / beta) - layers.T[window]
