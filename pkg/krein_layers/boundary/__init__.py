"""Curves, kernels and Nystrom layer operators"""

from .geometry import (
    CurveKind,
    CurveParam,
    ArcSpec,
    GridPanel,
    BoundaryGrid,
    discretize_curve,
    graded_arc_grid,
    composite_arc_grid,
    fejer_weights,
)
from .kernels import (
    KernelConfig,
    fundamental_solution,
    conormal_gradient,
    green_kernel,
    green_gradient_factor,
    bessel_I,
    bessel_I_scaled,
    bessel_K,
)
from .layer_ops import (
    Side,
    LayerTag,
    DensityClass,
    LayerMatrix,
    LayerSet,
    WeylBlock,
    assemble_g0SL,
    assemble_g1SL,
    assemble_g0DL,
    assemble_g1DL,
    assemble_double_layer,
    assemble_adjoint_double_layer,
    eval_SL_field,
    eval_DL_field,
    far_field_SL,
    far_field_DL,
    weyl_block,
    m_circ_block,
    symmetrize,
    circle_layer_symbols,
    chebyshev_log_weights,
    layer_potential_gram,
)

__all__ = [
    'CurveKind',
    'CurveParam',
    'ArcSpec',
    'GridPanel',
    'BoundaryGrid',
    'discretize_curve',
    'graded_arc_grid',
    'composite_arc_grid',
    'fejer_weights',
    'KernelConfig',
    'fundamental_solution',
    'conormal_gradient',
    'green_kernel',
    'green_gradient_factor',
    'bessel_I',
    'bessel_I_scaled',
    'bessel_K',
    'Side',
    'LayerTag',
    'DensityClass',
    'LayerMatrix',
    'LayerSet',
    'WeylBlock',
    'assemble_g0SL',
    'assemble_g1SL',
    'assemble_g0DL',
    'assemble_g1DL',
    'assemble_double_layer',
    'assemble_adjoint_double_layer',
    'eval_SL_field',
    'eval_DL_field',
    'far_field_SL',
    'far_field_DL',
    'weyl_block',
    'm_circ_block',
    'symmetrize',
    'circle_layer_symbols',
    'chebyshev_log_weights',
    'layer_potential_gram',
]
