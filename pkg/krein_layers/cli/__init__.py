"""Configuration-driven command line"""

from .config import (
    TaskKind,
    CurveConfig,
    GridConfig,
    KernelSection,
    ExtensionSection,
    TaskConfig,
    OutputConfig,
    RunConfig,
    load_config,
    parse_complex,
)
from .commands import (
    CheckResult,
    VerificationSuite,
    cmd_verify,
    cmd_eig,
    cmd_green,
    cmd_scatter,
    cmd_svd,
    run_command,
    write_error_report,
)
from .main import main, parse_args

__all__ = [
    'TaskKind',
    'CurveConfig',
    'GridConfig',
    'KernelSection',
    'ExtensionSection',
    'TaskConfig',
    'OutputConfig',
    'RunConfig',
    'load_config',
    'parse_complex',
    'CheckResult',
    'VerificationSuite',
    'cmd_verify',
    'cmd_eig',
    'cmd_green',
    'cmd_scatter',
    'cmd_svd',
    'run_command',
    'write_error_report',
    'main',
    'parse_args',
]
