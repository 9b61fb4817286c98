"""Exception hierarchy for the krein_layers toolkit"""

from typing import Optional


class KreinLayersError(Exception):
    """Base class for all toolkit errors"""


class SingularShiftError(KreinLayersError, ArithmeticError):
    """Spectral parameter too close to the spectrum of the free operator"""

    def __init__(self, message: str, resolvent_norm: float = float("inf")):
        super().__init__(message)
        self.resolvent_norm = resolvent_norm


class BlockSingularError(KreinLayersError, ArithmeticError):
    """Kreĭn or Birman block is numerically singular"""

    def __init__(self, message: str, sigma_min: float = 0.0, sigma_max: float = 0.0):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.sigma_max = sigma_max


class TraceOrderError(KreinLayersError, ValueError):
    """Trace vectors cannot be combined (order, size or radius mismatch)"""


class RegularityError(KreinLayersError, ValueError):
    """Curve parametrization is not regular"""


class CoincidenceError(KreinLayersError, ValueError):
    """Kernel evaluated at coincident points"""


class ProximityError(KreinLayersError, ValueError):
    """Evaluation point too close to the boundary for trapezoid quadrature"""


class CoefficientDegeneracyError(KreinLayersError, ValueError):
    """Boundary-condition coefficient violates its admissibility bound"""


class LayerOperatorError(KreinLayersError, ValueError):
    """Layer operator requested on an unsupported grid layout"""


class KernelError(KreinLayersError, OverflowError):
    """Special-function evaluation outside its representable range"""


class ConfigError(KreinLayersError, ValueError):
    """Invalid run configuration"""

    def __init__(self, message: str, key_path: Optional[str] = None):
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)
        self.key_path = key_path


class AliasingWarning(UserWarning):
    """Sampled data carries energy above the requested mode cutoff"""


class TrappedModeWarning(UserWarning):
    """Boundary block is ill conditioned at a real wavenumber"""


class ScanResolutionWarning(UserWarning):
    """Spectrum scan could not bracket or refine a minimum cleanly"""
