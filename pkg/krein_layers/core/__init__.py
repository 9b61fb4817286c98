"""Exact extension algebra, trace-space calculus and the exception hierarchy"""

from .exceptions import (
    KreinLayersError,
    SingularShiftError,
    BlockSingularError,
    TraceOrderError,
    RegularityError,
    CoincidenceError,
    ProximityError,
    CoefficientDegeneracyError,
    LayerOperatorError,
    KernelError,
    ConfigError,
    AliasingWarning,
    TrappedModeWarning,
    ScanResolutionWarning,
)
from .extension import (
    AbstractModel,
    ExtensionParams,
    CompressedForm,
    gamma_field,
    weyl_operator,
    weyl_operator_product_form,
    boundary_density,
    krein_resolvent_matrix,
    krein_decomposition,
    compress_form,
    random_model,
    random_extension,
)
from .trace_space import (
    TraceVector,
    ArcIndexSet,
    lambda_power,
    sobolev_norm,
    duality_pairing,
    grid_to_modes,
    modes_to_grid,
    arc_restrict,
    arc_include,
)

__all__ = [
    'KreinLayersError',
    'SingularShiftError',
    'BlockSingularError',
    'TraceOrderError',
    'RegularityError',
    'CoincidenceError',
    'ProximityError',
    'CoefficientDegeneracyError',
    'LayerOperatorError',
    'KernelError',
    'ConfigError',
    'AliasingWarning',
    'TrappedModeWarning',
    'ScanResolutionWarning',
    'AbstractModel',
    'ExtensionParams',
    'CompressedForm',
    'gamma_field',
    'weyl_operator',
    'weyl_operator_product_form',
    'boundary_density',
    'krein_resolvent_matrix',
    'krein_decomposition',
    'compress_form',
    'random_model',
    'random_extension',
    'TraceVector',
    'ArcIndexSet',
    'lambda_power',
    'sobolev_norm',
    'duality_pairing',
    'grid_to_modes',
    'modes_to_grid',
    'arc_restrict',
    'arc_include',
]
