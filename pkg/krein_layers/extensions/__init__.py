"""Boundary-condition families and Kreĭn resolvent solvers"""

from .boundary_conditions import (
    Family,
    Region,
    CoefficientFunction,
    ExtensionSpec,
    ThetaBlock,
    coefficient_block,
    build_theta,
    krein_block,
    compress_theta,
    birman_block,
)
from .krein_solver import (
    SpectralBranch,
    SpectralHit,
    PerturbedResolvent,
    ScatteringResult,
    SvdDiagnostic,
    perturbed_green,
    dtn_difference,
    ntd_difference,
    scan_spectrum,
    point_spectrum,
    eigenfunction,
    incident_traces,
    source_traces,
    scattered_field,
    resolvent_difference_svd,
)

__all__ = [
    'Family',
    'Region',
    'CoefficientFunction',
    'ExtensionSpec',
    'ThetaBlock',
    'coefficient_block',
    'build_theta',
    'krein_block',
    'compress_theta',
    'birman_block',
    'SpectralBranch',
    'SpectralHit',
    'PerturbedResolvent',
    'ScatteringResult',
    'SvdDiagnostic',
    'perturbed_green',
    'dtn_difference',
    'ntd_difference',
    'scan_spectrum',
    'point_spectrum',
    'eigenfunction',
    'incident_traces',
    'source_traces',
    'scattered_field',
    'resolvent_difference_svd',
]
