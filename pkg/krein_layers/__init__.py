"""
Krein Layers

Boundary-integral Krein resolvents for -Laplace + V0 in the plane with Dirichlet,
Neumann, Robin, delta and delta-prime conditions on a closed curve or an open arc,
together with an exact finite-dimensional model of the extension algebra.
"""

__version__ = "1.0.0"
__author__ = "Krein Layers Team"

from .core.extension import AbstractModel, ExtensionParams, krein_resolvent_matrix
from .core.trace_space import TraceVector
from .boundary.geometry import CurveParam, ArcSpec, discretize_curve, composite_arc_grid
from .boundary.kernels import KernelConfig
from .boundary.layer_ops import LayerSet
from .extensions.boundary_conditions import ExtensionSpec
from .extensions.krein_solver import PerturbedResolvent, scan_spectrum, scattered_field, resolvent_difference_svd
from .cli.config import RunConfig

__all__ = [
    'AbstractModel',
    'ExtensionParams',
    'krein_resolvent_matrix',
    'TraceVector',
    'CurveParam',
    'ArcSpec',
    'discretize_curve',
    'composite_arc_grid',
    'KernelConfig',
    'LayerSet',
    'ExtensionSpec',
    'PerturbedResolvent',
    'scan_spectrum',
    'scattered_field',
    'resolvent_difference_svd',
    'RunConfig',
]
