"""Run configuration: JSON schema, defaults and validation"""

import copy
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..boundary.geometry import ArcSpec, CurveKind, CurveParam
from ..core.exceptions import ConfigError
from ..extensions.boundary_conditions import FAMILY_COEFFICIENTS, ExtensionSpec, Family, Region
from ..extensions.krein_solver import SpectralBranch

logger = logging.getLogger(__name__)


class TaskKind:
    """Subcommands a configuration can drive"""
    VERIFY = "verify"
    EIG = "eig"
    GREEN = "green"
    SCATTER = "scatter"
    SVD = "svd"

    ALL = [VERIFY, EIG, GREEN, SCATTER, SVD]


TASK_DEFAULTS: Dict[str, Dict[str, Any]] = {
    TaskKind.VERIFY: {"n_random": 50},
    TaskKind.EIG: {"branch": "gap", "interval": [0.5, 10.0], "n_scan": 200},
    TaskKind.GREEN: {"z": 1.0, "source": [0.3, 0.1], "box": [-0.6, 0.6, -0.6, 0.6], "n_points": 11},
    TaskKind.SCATTER: {
        "k": 2.0,
        "direction": [1.0, 0.0],
        "n_angles": 64,
        "near_points": [],
        "epsilon_path": [1e-2, 1e-3, 1e-4],
    },
    TaskKind.SVD: {"z": 1.0, "fit_range": [10, 40]},
}


def _require_object(data: Any, path: str) -> Dict[str, Any]:
    if not isinstance(data, dict):
        raise ConfigError("Must be an object", key_path=path)
    return data


def _reject_unknown(data: Dict[str, Any], allowed: List[str], path: str) -> None:
    for key in data:
        if key not in allowed:
            raise ConfigError(f"Unknown key. Must be one of: {allowed}", key_path=f"{path}.{key}" if path else key)


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"Invalid value {value!r}. Must be a number", key_path=path)
    return float(value)


def _integer(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"Invalid value {value!r}. Must be an integer", key_path=path)
    return value


def parse_complex(value: Any, path: str) -> complex:
    """A number or a [re, im] pair"""
    if isinstance(value, list) and len(value) == 2:
        return complex(_number(value[0], f"{path}[0]"), _number(value[1], f"{path}[1]"))
    return complex(_number(value, path))


def _at_least(value: Any, minimum: int, path: str) -> int:
    value = _integer(value, path)
    if value < minimum:
        raise ConfigError(f"Invalid value {value}. Must be at least {minimum}", key_path=path)
    return value


def _positive(value: Any, path: str) -> float:
    value = _number(value, path)
    if value <= 0:
        raise ConfigError(f"Invalid value {value}. Must be positive", key_path=path)
    return value


def _numbers(value: Any, length: int, path: str) -> List[float]:
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(f"Invalid value {value!r}. Must be a list of {length} numbers", key_path=path)
    return [_number(item, f"{path}[{i}]") for i, item in enumerate(value)]


def _ordered(low: float, high: float, path: str) -> None:
    if not low < high:
        raise ConfigError(f"Invalid range [{low}, {high}]. Must be increasing", key_path=path)


@dataclass
class CurveConfig:
    kind: str = CurveKind.CIRCLE.value
    radius: float = 1.0
    a: float = 2.0
    b: float = 1.0

    def __post_init__(self):
        valid_kinds = [kind.value for kind in CurveKind]
        if self.kind not in valid_kinds:
            raise ConfigError(f"Invalid curve kind: {self.kind}. Must be one of: {valid_kinds}", key_path="curve.kind")

    @classmethod
    def from_dict(cls, data: Any) -> "CurveConfig":
        data = _require_object(data, "curve")
        _reject_unknown(data, ["kind", "radius", "a", "b"], "curve")
        values = {key: (_number(value, f"curve.{key}") if key != "kind" else value) for key, value in data.items()}
        return cls(**values)

    def to_curve(self) -> CurveParam:
        try:
            return CurveParam(kind=self.kind, radius=self.radius, a=self.a, b=self.b)
        except ValueError as exc:
            raise ConfigError(str(exc), key_path="curve") from exc

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "radius": self.radius, "a": self.a, "b": self.b}


@dataclass
class GridConfig:
    n_gamma: int = 128
    m_arc: int = 64

    def __post_init__(self):
        if self.n_gamma < 8 or self.n_gamma % 2:
            raise ConfigError(f"Invalid node count {self.n_gamma}. Must be even and at least 8", key_path="grid.n_gamma")
        if self.m_arc < 4:
            raise ConfigError(f"Invalid arc node count {self.m_arc}. Must be at least 4", key_path="grid.m_arc")

    @classmethod
    def from_dict(cls, data: Any) -> "GridConfig":
        data = _require_object(data, "grid")
        _reject_unknown(data, ["n_gamma", "m_arc"], "grid")
        return cls(**{key: _integer(value, f"grid.{key}") for key, value in data.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {"n_gamma": self.n_gamma, "m_arc": self.m_arc}


@dataclass
class KernelSection:
    V0: float = 0.0
    lambda0: float = 1.0

    def __post_init__(self):
        if self.lambda0 + self.V0 <= 0:
            raise ConfigError(f"Invalid lambda0 {self.lambda0}. lambda0 + V0 must be positive", key_path="kernel.lambda0")

    @classmethod
    def from_dict(cls, data: Any) -> "KernelSection":
        data = _require_object(data, "kernel")
        _reject_unknown(data, ["V0", "lambda0"], "kernel")
        return cls(**{key: _number(value, f"kernel.{key}") for key, value in data.items()})

    def to_dict(self) -> Dict[str, Any]:
        return {"V0": self.V0, "lambda0": self.lambda0}


@dataclass
class ExtensionSection:
    family: str
    region: str = Region.FULL.value
    arc: Optional[Dict[str, float]] = None
    coefficients: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        valid_families = [family.value for family in Family]
        if self.family not in valid_families:
            raise ConfigError(f"Invalid family: {self.family}. Must be one of: {valid_families}",
                              key_path="extension.family")
        valid_regions = [region.value for region in Region]
        if self.region not in valid_regions:
            raise ConfigError(f"Invalid region: {self.region}. Must be one of: {valid_regions}",
                              key_path="extension.region")
        if self.region == Region.ARC.value and self.arc is None:
            raise ConfigError("Missing required key for an arc region", key_path="extension.arc")

        expected = FAMILY_COEFFICIENTS[self.family]
        for name in self.coefficients:
            if name not in expected:
                raise ConfigError(f"Unknown coefficient. Must be one of: {expected}",
                                  key_path=f"extension.coefficients.{name}")
        for name in expected:
            if name not in self.coefficients:
                raise ConfigError("Missing required coefficient", key_path=f"extension.coefficients.{name}")

    @classmethod
    def from_dict(cls, data: Any) -> "ExtensionSection":
        data = _require_object(data, "extension")
        _reject_unknown(data, ["family", "region", "arc", "coefficients"], "extension")
        if "family" not in data:
            raise ConfigError("Missing required key", key_path="extension.family")
        arc = data.get("arc")
        if arc is not None:
            arc = _require_object(arc, "extension.arc")
            _reject_unknown(arc, ["t0", "t1"], "extension.arc")
            for key in ["t0", "t1"]:
                if key not in arc:
                    raise ConfigError("Missing required key", key_path=f"extension.arc.{key}")
            arc = {key: _number(arc[key], f"extension.arc.{key}") for key in ["t0", "t1"]}
        coefficients = _require_object(data.get("coefficients", {}), "extension.coefficients")
        return cls(family=data["family"], region=data.get("region", Region.FULL.value), arc=arc,
                   coefficients=dict(coefficients))

    def to_spec(self, grid: GridConfig, kernel: KernelSection) -> ExtensionSpec:
        arc = None
        if self.arc is not None:
            try:
                arc = ArcSpec(t0=self.arc["t0"], t1=self.arc["t1"], m=grid.m_arc)
            except ValueError as exc:
                raise ConfigError(str(exc), key_path="extension.arc") from exc
        try:
            return ExtensionSpec(family=self.family, region=self.region, arc=arc, V0=kernel.V0,
                                 lambda0=kernel.lambda0, **self.coefficients)
        except ValueError as exc:
            raise ConfigError(str(exc), key_path="extension.coefficients") from exc

    def to_dict(self) -> Dict[str, Any]:
        data = {"family": self.family, "region": self.region, "coefficients": dict(self.coefficients)}
        if self.arc is not None:
            data["arc"] = dict(self.arc)
        return data


@dataclass
class TaskConfig:
    kind: str = TaskKind.VERIFY
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in TaskKind.ALL:
            raise ConfigError(f"Invalid task kind: {self.kind}. Must be one of: {TaskKind.ALL}", key_path="task.kind")
        defaults = TASK_DEFAULTS[self.kind]
        _reject_unknown(self.params, list(defaults), "task")
        resolved = copy.deepcopy(defaults)
        resolved.update(self.params)
        self.params = resolved
        self.VALIDATORS[self.kind](self, self.params)

    def _validate_verify(self, params: Dict[str, Any]) -> None:
        _at_least(params["n_random"], 1, "task.n_random")

    def _validate_eig(self, params: Dict[str, Any]) -> None:
        valid_branches = [branch.value for branch in SpectralBranch]
        if params["branch"] not in valid_branches:
            raise ConfigError(f"Invalid branch: {params['branch']!r}. Must be one of: {valid_branches}",
                              key_path="task.branch")
        low, high = _numbers(params["interval"], 2, "task.interval")
        _ordered(low, high, "task.interval")
        _at_least(params["n_scan"], 3, "task.n_scan")

    def _validate_green(self, params: Dict[str, Any]) -> None:
        parse_complex(params["z"], "task.z")
        _numbers(params["source"], 2, "task.source")
        x_min, x_max, y_min, y_max = _numbers(params["box"], 4, "task.box")
        _ordered(x_min, x_max, "task.box")
        _ordered(y_min, y_max, "task.box")
        _at_least(params["n_points"], 2, "task.n_points")

    def _validate_scatter(self, params: Dict[str, Any]) -> None:
        _positive(params["k"], "task.k")
        direction = _numbers(params["direction"], 2, "task.direction")
        if direction == [0.0, 0.0]:
            raise ConfigError("Invalid direction [0, 0]. Must be nonzero", key_path="task.direction")
        _at_least(params["n_angles"], 1, "task.n_angles")
        if not isinstance(params["near_points"], list):
            raise ConfigError("Must be a list of [x, y] pairs", key_path="task.near_points")
        for i, point in enumerate(params["near_points"]):
            _numbers(point, 2, f"task.near_points[{i}]")
        if not isinstance(params["epsilon_path"], list):
            raise ConfigError("Must be a list of positive numbers", key_path="task.epsilon_path")
        for i, epsilon in enumerate(params["epsilon_path"]):
            _positive(epsilon, f"task.epsilon_path[{i}]")

    def _validate_svd(self, params: Dict[str, Any]) -> None:
        z = parse_complex(params["z"], "task.z")
        if z.imag != 0.0:
            raise ConfigError(f"Invalid z = {z}. Must be real", key_path="task.z")
        fit_range = params["fit_range"]
        if not isinstance(fit_range, list) or len(fit_range) != 2:
            raise ConfigError(f"Invalid value {fit_range!r}. Must be a list of 2 integers", key_path="task.fit_range")
        low = _at_least(fit_range[0], 1, "task.fit_range[0]")
        high = _integer(fit_range[1], "task.fit_range[1]")
        _ordered(low, high, "task.fit_range")

    VALIDATORS = {
        TaskKind.VERIFY: _validate_verify,
        TaskKind.EIG: _validate_eig,
        TaskKind.GREEN: _validate_green,
        TaskKind.SCATTER: _validate_scatter,
        TaskKind.SVD: _validate_svd,
    }


    @classmethod
    def from_dict(cls, data: Any) -> "TaskConfig":
        data = _require_object(data, "task")
        if "kind" not in data:
            raise ConfigError("Missing required key", key_path="task.kind")
        params = {key: value for key, value in data.items() if key != "kind"}
        return cls(kind=data["kind"], params=params)

    def get(self, key: str) -> Any:
        return self.params[key]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, **self.params}


@dataclass
class OutputConfig:
    dir: str = "results"

    @classmethod
    def from_dict(cls, data: Any) -> "OutputConfig":
        data = _require_object(data, "output")
        _reject_unknown(data, ["dir"], "output")
        return cls(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {"dir": self.dir}


@dataclass
class RunConfig:
    """Resolved configuration of one CLI run"""

    extension: ExtensionSection
    curve: CurveConfig = field(default_factory=CurveConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    kernel: KernelSection = field(default_factory=KernelSection)
    task: TaskConfig = field(default_factory=TaskConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    seed: int = 0

    SECTIONS = ["curve", "grid", "kernel", "extension", "task", "output", "seed"]

    @classmethod
    def from_dict(cls, data: Any) -> "RunConfig":
        data = _require_object(data, "")
        _reject_unknown(data, cls.SECTIONS, "")
        if "extension" not in data:
            raise ConfigError("Missing required section", key_path="extension")
        config = cls(
            extension=ExtensionSection.from_dict(data["extension"]),
            curve=CurveConfig.from_dict(data.get("curve", {})),
            grid=GridConfig.from_dict(data.get("grid", {})),
            kernel=KernelSection.from_dict(data.get("kernel", {})),
            task=TaskConfig.from_dict(data.get("task", {"kind": TaskKind.VERIFY})),
            output=OutputConfig.from_dict(data.get("output", {})),
            seed=_integer(data.get("seed", 0), "seed"),
        )
        config.extension_spec()
        if config.task.kind == TaskKind.SVD:
            z = parse_complex(config.task.get("z"), "task.z")
            if z.real + config.kernel.V0 <= 0:
                raise ConfigError(f"Invalid z = {z.real}. z + V0 must be positive", key_path="task.z")
        return config

    def curve_param(self) -> CurveParam:
        return self.curve.to_curve()

    def extension_spec(self) -> ExtensionSpec:
        return self.extension.to_spec(self.grid, self.kernel)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "curve": self.curve.to_dict(),
            "grid": self.grid.to_dict(),
            "kernel": self.kernel.to_dict(),
            "extension": self.extension.to_dict(),
            "task": self.task.to_dict(),
            "output": self.output.to_dict(),
            "seed": self.seed,
        }


def load_config(path: str) -> RunConfig:
    """Read and validate a JSON run configuration"""
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError as exc:
        raise ConfigError(f"Configuration file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    config = RunConfig.from_dict(data)
    logger.debug("Loaded %s configuration from %s", config.task.kind, path)
    return config
