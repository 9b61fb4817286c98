"""Parametrized closed curves, arcs and their quadrature grids"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.exceptions import RegularityError
from ..core.trace_space import ArcIndexSet

logger = logging.getLogger(__name__)

KITE_SHIFT = 0.65


class CurveKind(Enum):
    """Supported closed curves"""
    CIRCLE = "circle"
    ELLIPSE = "ellipse"
    KITE = "kite"


@dataclass
class CurveParam:
    """Smooth closed curve x(t), t in [0, 2 pi)"""

    kind: str = CurveKind.CIRCLE.value
    radius: float = 1.0
    a: float = 2.0
    b: float = 1.0
    center: List[float] = field(default_factory=lambda: [0.0, 0.0])

    def __post_init__(self):
        valid_kinds = [kind.value for kind in CurveKind]
        if self.kind not in valid_kinds:
            raise ValueError(f"Invalid curve kind: {self.kind}. Must be one of: {valid_kinds}")
        if self.kind == CurveKind.CIRCLE.value and self.radius <= 0:
            raise ValueError(f"Invalid radius {self.radius}. Must be positive")
        if self.kind == CurveKind.ELLIPSE.value and (self.a <= 0 or self.b <= 0):
            raise ValueError(f"Invalid semi-axes ({self.a}, {self.b}). Must be positive")
        self.center = [float(c) for c in self.center]

    @classmethod
    def circle(cls, radius: float = 1.0) -> "CurveParam":
        return cls(kind=CurveKind.CIRCLE.value, radius=radius)

    @classmethod
    def ellipse(cls, a: float, b: float) -> "CurveParam":
        return cls(kind=CurveKind.ELLIPSE.value, a=a, b=b)

    @classmethod
    def kite(cls) -> "CurveParam":
        return cls(kind=CurveKind.KITE.value)

    def position(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == CurveKind.CIRCLE.value:
            xy = self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
        elif self.kind == CurveKind.ELLIPSE.value:
            xy = np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)
        else:
            xy = np.stack([np.cos(t) + KITE_SHIFT * np.cos(2 * t) - KITE_SHIFT, 1.5 * np.sin(t)], axis=-1)
        return xy + np.asarray(self.center)

    def derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == CurveKind.CIRCLE.value:
            return self.radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)
        if self.kind == CurveKind.ELLIPSE.value:
            return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)
        return np.stack([-np.sin(t) - 2 * KITE_SHIFT * np.sin(2 * t), 1.5 * np.cos(t)], axis=-1)

    def second_derivative(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == CurveKind.CIRCLE.value:
            return -self.radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
        if self.kind == CurveKind.ELLIPSE.value:
            return np.stack([-self.a * np.cos(t), -self.b * np.sin(t)], axis=-1)
        return np.stack([-np.cos(t) - 4 * KITE_SHIFT * np.cos(2 * t), -1.5 * np.sin(t)], axis=-1)

    @property
    def orientation(self) -> int:
        """+1 for counterclockwise parametrizations, -1 otherwise"""
        t = np.linspace(0.0, 2 * np.pi, 256, endpoint=False)
        xy = self.position(t)
        dxy = self.derivative(t)
        signed_area = 0.5 * np.mean(xy[:, 0] * dxy[:, 1] - xy[:, 1] * dxy[:, 0]) * 2 * np.pi
        return 1 if signed_area > 0 else -1

    def outward_normals(self, t: np.ndarray) -> np.ndarray:
        dxy = self.derivative(t)
        speed = np.linalg.norm(dxy, axis=-1)
        return self.orientation * np.stack([dxy[:, 1], -dxy[:, 0]], axis=-1) / speed[:, None]

    def to_dict(self) -> Dict[str, Any]:
        data = {"kind": self.kind, "center": list(self.center)}
        if self.kind == CurveKind.CIRCLE.value:
            data["radius"] = self.radius
        elif self.kind == CurveKind.ELLIPSE.value:
            data["a"] = self.a
            data["b"] = self.b
        return data


@dataclass
class ArcSpec:
    """Parameter interval [t0, t1] of an arc Sigma and its graded node count"""

    t0: float
    t1: float
    m: int = 64

    def __post_init__(self):
        if not 0.0 < self.t1 - self.t0 < 2 * np.pi:
            raise ValueError(f"Invalid arc [{self.t0}, {self.t1}]. Length must lie in (0, 2*pi)")
        if self.m < 4:
            raise ValueError(f"Invalid graded node count {self.m}. Must be at least 4")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.t0 + self.t1)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.t1 - self.t0)

    def complement(self, m: Optional[int] = None) -> "ArcSpec":
        """Arc covering the rest of the curve"""
        return ArcSpec(t0=self.t1, t1=self.t0 + 2 * np.pi, m=m or self.m)

    def to_dict(self) -> Dict[str, Any]:
        return {"t0": self.t0, "t1": self.t1, "m": self.m}


@dataclass
class GridPanel:
    """Contiguous block of grid nodes sharing one quadrature rule"""

    kind: str
    start: int
    stop: int
    mid: float = 0.0
    half_width: float = np.pi
    theta: Optional[np.ndarray] = None

    def __post_init__(self):
        valid_kinds = ["periodic", "graded"]
        if self.kind not in valid_kinds:
            raise ValueError(f"Invalid panel kind: {self.kind}. Must be one of: {valid_kinds}")

    @property
    def size(self) -> int:
        return self.stop - self.start

    @property
    def indices(self) -> slice:
        return slice(self.start, self.stop)


@dataclass
class BoundaryGrid:
    """Quadrature nodes on Gamma or on Sigma"""

    curve: CurveParam
    params: np.ndarray
    nodes: np.ndarray
    speeds: np.ndarray
    normals: np.ndarray
    second_derivatives: np.ndarray
    weights: np.ndarray
    density_weights: np.ndarray
    panels: List[GridPanel]
    arc: Optional[ArcIndexSet] = None

    @property
    def n_nodes(self) -> int:
        return self.params.size

    @property
    def length(self) -> float:
        return float(np.sum(self.weights))

    @property
    def spacing(self) -> float:
        """Largest nodal weight, the node gap where the grid is sparsest

        Proximity limits are multiples of this value and must hold near the
        middle of a graded panel, where the gap exceeds the mean weight.
        """
        return float(np.max(self.density_weights))

    @property
    def is_periodic(self) -> bool:
        return len(self.panels) == 1 and self.panels[0].kind == "periodic"

    @property
    def curvature_numerator(self) -> np.ndarray:
        """nu . x'' / |x'|^2, the node-wise curvature term of the double-layer diagonal"""
        return np.sum(self.normals * self.second_derivatives, axis=1) / self.speeds ** 2

    def summary(self) -> Dict[str, Any]:
        return {
            "curve": self.curve.to_dict(),
            "n_nodes": self.n_nodes,
            "panels": [panel.kind for panel in self.panels],
            "length": self.length,
        }


def _sample_curve(curve: CurveParam, t: np.ndarray):
    dxy = curve.derivative(t)
    speeds = np.linalg.norm(dxy, axis=1)
    if np.min(speeds) < 1e-10:
        raise RegularityError(f"Parametrization degenerates: min |x'| = {np.min(speeds):.3e}")
    return curve.position(t), speeds, curve.outward_normals(t), curve.second_derivative(t)


def discretize_curve(curve: CurveParam, n_nodes: int) -> BoundaryGrid:
    """Periodic trapezoid grid t_j = 2 pi j / N"""
    if n_nodes < 8 or n_nodes % 2:
        raise ValueError(f"Invalid node count {n_nodes}. Must be even and at least 8")

    t = 2 * np.pi * np.arange(n_nodes) / n_nodes
    nodes, speeds, normals, second = _sample_curve(curve, t)
    weights = 2 * np.pi * speeds / n_nodes
    logger.debug("Discretized %s with %d nodes", curve.kind, n_nodes)
    return BoundaryGrid(
        curve=curve,
        params=t,
        nodes=nodes,
        speeds=speeds,
        normals=normals,
        second_derivatives=second,
        weights=weights,
        density_weights=weights.copy(),
        panels=[GridPanel(kind="periodic", start=0, stop=n_nodes)],
    )


def fejer_weights(m: int) -> np.ndarray:
    """Fejer first-rule weights on [-1, 1] at the nodes cos(pi (2s+1) / (2m))"""
    theta = np.pi * (2 * np.arange(m) + 1) / (2 * m)
    j = np.arange(1, m // 2 + 1)
    series = np.cos(2 * np.outer(theta, j)) / (4 * j ** 2 - 1)
    return (2.0 / m) * (1.0 - 2.0 * series.sum(axis=1))


def _graded_block(curve: CurveParam, arc: ArcSpec):
    m = arc.m
    theta = np.pi * (2 * np.arange(m) + 1) / (2 * m)
    t = arc.midpoint + arc.half_width * np.cos(theta)
    nodes, speeds, normals, second = _sample_curve(curve, t)
    weights = arc.half_width * speeds * fejer_weights(m)
    density_weights = (np.pi / m) * speeds * arc.half_width * np.sin(theta)
    return t, theta, nodes, speeds, normals, second, weights, density_weights


def graded_arc_grid(curve: CurveParam, arc: ArcSpec) -> BoundaryGrid:
    """Cosine-graded grid on Sigma, clustering toward both endpoints"""
    t, theta, nodes, speeds, normals, second, weights, density_weights = _graded_block(curve, arc)
    panel = GridPanel(kind="graded", start=0, stop=arc.m, mid=arc.midpoint, half_width=arc.half_width, theta=theta)
    logger.debug("Graded arc [%.4f, %.4f] with %d nodes", arc.t0, arc.t1, arc.m)
    return BoundaryGrid(
        curve=curve,
        params=t,
        nodes=nodes,
        speeds=speeds,
        normals=normals,
        second_derivatives=second,
        weights=weights,
        density_weights=density_weights,
        panels=[panel],
    )


def composite_arc_grid(curve: CurveParam, arc: ArcSpec, m_complement: Optional[int] = None) -> BoundaryGrid:
    """Two graded panels covering Gamma: Sigma first, then its complement"""
    sigma_grid = graded_arc_grid(curve, arc)
    rest_grid = graded_arc_grid(curve, arc.complement(m_complement))
    m_sigma = sigma_grid.n_nodes
    m_rest = rest_grid.n_nodes

    rest_panel = rest_grid.panels[0]
    panels = [
        sigma_grid.panels[0],
        GridPanel(kind="graded", start=m_sigma, stop=m_sigma + m_rest, mid=rest_panel.mid,
                  half_width=rest_panel.half_width, theta=rest_panel.theta),
    ]

    def stacked(name):
        return np.concatenate([getattr(sigma_grid, name), getattr(rest_grid, name)])

    grid = BoundaryGrid(
        curve=curve,
        params=stacked("params"),
        nodes=stacked("nodes"),
        speeds=stacked("speeds"),
        normals=stacked("normals"),
        second_derivatives=stacked("second_derivatives"),
        weights=stacked("weights"),
        density_weights=stacked("density_weights"),
        panels=panels,
    )
    grid.arc = ArcIndexSet.from_grid(grid)
    return grid
