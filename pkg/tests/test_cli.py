"""Tests for run configuration parsing and the command-line surface"""

import json
import os

import pandas as pd
import pytest

from krein_layers.cli.commands import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    EXIT_OK,
    VerificationSuite,
    run_command,
)
from krein_layers.cli.config import RunConfig, TaskKind, load_config, parse_complex
from krein_layers.cli.main import main, parse_args
from krein_layers.core.exceptions import ConfigError

J01_SQUARED = 5.783185962946784


def _write_config(tmp_path, data, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def _read_json(path):
    with open(path, "r") as f:
        return json.load(f)


@pytest.mark.parametrize("data, key_path", [
    ({"task": {"kind": "verify"}}, "extension"),
    ({"extension": {"region": "full"}}, "extension.family"),
    ({"extension": {"family": "dirichlet"}, "plot": {}}, "plot"),
    ({"extension": {"family": "dirichlet"}, "grid": {"n_gamma": 7}}, "grid.n_gamma"),
    ({"extension": {"family": "dirichlet"}, "grid": {"n_gamma": 64.0}}, "grid.n_gamma"),
    ({"extension": {"family": "delta"}}, "extension.coefficients.alpha"),
    ({"extension": {"family": "neumann", "coefficients": {"beta": 1.0}}}, "extension.coefficients.beta"),
    ({"extension": {"family": "delta", "coefficients": {"alpha": "exp(t)"}}}, "extension.coefficients"),
    ({"extension": {"family": "dirichlet", "region": "arc"}}, "extension.arc"),
    ({"extension": {"family": "dirichlet", "region": "arc", "arc": {"t0": 1.0}}}, "extension.arc.t1"),
    ({"extension": {"family": "dirichlet", "region": "arc", "arc": {"t0": 1.0, "t1": 0.5}}}, "extension.arc"),
    ({"extension": {"family": "dirichlet"}, "kernel": {"lambda0": -1.0}}, "kernel.lambda0"),
    ({"extension": {"family": "dirichlet"}, "curve": {"kind": "square"}}, "curve.kind"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "bogus": 1}}, "task.bogus"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "plot"}}, "task.kind"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "branch": "continuum"}}, "task.branch"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "interval": [2.0, 1.0]}}, "task.interval"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "interval": [1.0]}}, "task.interval"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "n_scan": 50.5}}, "task.n_scan"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "verify", "n_random": "many"}}, "task.n_random"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "green", "n_points": 1}}, "task.n_points"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "green", "box": [0.5, -0.5, -0.5, 0.5]}}, "task.box"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "green", "source": [0.1]}}, "task.source"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "scatter", "k": 0.0}}, "task.k"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "scatter", "direction": [0.0, 0.0]}}, "task.direction"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "scatter", "near_points": [[1.0]]}}, "task.near_points[0]"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "scatter", "epsilon_path": [1e-2, -1e-3]}},
     "task.epsilon_path[1]"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "svd", "n_samples": "many"}}, "task.n_samples"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "svd", "fit_range": [40, 10]}}, "task.fit_range"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "svd", "fit_range": [0, 10]}}, "task.fit_range[0]"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "svd", "z": [1.0, 0.5]}}, "task.z"),
    ({"extension": {"family": "dirichlet"}, "task": {"kind": "svd", "z": -2.0}}, "task.z"),
])
def test_config_errors_carry_key_paths(data, key_path):
    with pytest.raises(ConfigError) as excinfo:
        RunConfig.from_dict(data)
    assert excinfo.value.key_path == key_path, f"Expected {key_path}, got {excinfo.value.key_path}"


def test_config_defaults_and_serialization():
    config = RunConfig.from_dict({
        "extension": {"family": "robin", "coefficients": {"b_plus": "1.0 + 0.5*cos(2*t)", "b_minus": -1.0}},
        "task": {"kind": "eig", "n_scan": 50},
    })
    assert config.task.kind == TaskKind.EIG
    assert config.task.get("n_scan") == 50 and config.task.get("branch") == "gap"
    assert config.grid.n_gamma == 128 and config.kernel.lambda0 == 1.0
    assert config.output.dir == "results" and config.seed == 0

    spec = config.extension_spec()
    assert spec.b_plus.kind == "cos" and spec.b_minus.c0 == -1.0
    assert RunConfig.from_dict(config.to_dict()).to_dict() == config.to_dict()


def test_parse_complex():
    assert parse_complex(2, "task.z") == 2.0
    assert parse_complex([1.0, -0.5], "task.z") == 1.0 - 0.5j
    with pytest.raises(ConfigError) as excinfo:
        parse_complex("1+2j", "task.z")
    assert excinfo.value.key_path == "task.z"


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{\"extension\": ")
    with pytest.raises(ConfigError, match="Malformed JSON"):
        load_config(str(broken))


def test_parse_args_requires_config():
    args = parse_args(["eig", "--config", "run.json", "--out", "elsewhere"])
    assert (args.command, args.config, args.out, args.verbose) == ("eig", "run.json", "elsewhere", False)
    with pytest.raises(SystemExit):
        parse_args(["eig"])


def test_missing_family_exits_with_config_error(tmp_path):
    path = _write_config(tmp_path, {"extension": {}, "task": {"kind": "verify"}})
    out = str(tmp_path / "out")
    assert main(["verify", "--config", path, "--out", out]) == EXIT_CONFIG_ERROR
    error = _read_json(os.path.join(out, "error.json"))["error"]
    assert error["code"] == EXIT_CONFIG_ERROR
    assert error["type"] == "ConfigError"
    assert error["key_path"] == "extension.family"


def test_subcommand_must_match_task(tmp_path):
    path = _write_config(tmp_path, {"extension": {"family": "dirichlet"}, "task": {"kind": "eig"}})
    out = str(tmp_path / "out")
    assert main(["green", "--config", path, "--out", out]) == EXIT_CONFIG_ERROR
    assert _read_json(os.path.join(out, "error.json"))["error"]["key_path"] == "task.kind"


def test_invalid_task_params_exit_with_config_error(tmp_path):
    data = {"extension": {"family": "dirichlet"}, "task": {"kind": "eig", "branch": "continuum"}}
    out = str(tmp_path / "out")
    assert main(["eig", "--config", _write_config(tmp_path, data), "--out", out]) == EXIT_CONFIG_ERROR
    error = _read_json(os.path.join(out, "error.json"))["error"]
    assert error["type"] == "ConfigError" and error["key_path"] == "task.branch", f"Unexpected error {error}"


def test_verify_suite_passes(tmp_path):
    data = {
        "curve": {"kind": "circle"},
        "extension": {"family": "dirichlet"},
        "task": {"kind": "verify", "n_random": 5},
        "seed": 3,
    }
    path = _write_config(tmp_path, data)
    out = str(tmp_path / "verify")
    assert main(["verify", "--config", path, "--out", out]) == EXIT_OK
    report = _read_json(os.path.join(out, "verify_report.json"))
    assert report["n_failed"] == 0
    names = [check["name"] for check in report["checks"]]
    assert report["n_checks"] == len(names) == 17
    assert "layer.coercivity[kite]" in names and "layer.jump_relations[circle]" in names
    assert report["config"]["seed"] == 3


def test_verify_reports_failed_checks(tmp_path, monkeypatch):
    def register_failing(suite):
        suite.checks = {"always.fails": ("residual above tolerance", 1e-12, lambda: 1.0)}

    monkeypatch.setattr(VerificationSuite, "_register_checks", register_failing)
    config = RunConfig.from_dict({
        "extension": {"family": "dirichlet"},
        "task": {"kind": "verify", "n_random": 2},
        "output": {"dir": str(tmp_path / "verify")},
    })
    results = VerificationSuite(config).run()
    assert len(results) == 1 and not results[0].passed
    assert results[0].to_dict()["residual"] == 1.0

    assert run_command("verify", config) == EXIT_CHECK_FAILED
    report = _read_json(os.path.join(config.output.dir, "verify_report.json"))
    assert report["n_failed"] == 1 and report["n_checks"] == 1


def test_eig_writes_scan_and_hits(tmp_path):
    data = {
        "grid": {"n_gamma": 64},
        "extension": {"family": "delta", "coefficients": {"alpha": "-4"}},
        "task": {"kind": "eig", "interval": [0.5, 10.0], "n_scan": 60},
    }
    path = _write_config(tmp_path, data)
    out = str(tmp_path / "eig")
    assert main(["eig", "--config", path, "--out", out]) == EXIT_OK
    scan = pd.read_csv(os.path.join(out, "eig_scan.csv"))
    assert list(scan.columns) == ["z", "sigma_min"] and len(scan) == 60
    hits = _read_json(os.path.join(out, "eig_hits.json"))["hits"]
    assert len(hits) == 2
    assert sorted(hit["multiplicity"] for hit in hits) == [1, 2]


def test_green_output_is_deterministic(tmp_path):
    data = {
        "grid": {"n_gamma": 64},
        "extension": {"family": "delta", "coefficients": {"alpha": "-2.0"}},
        "task": {"kind": "green", "z": [1.0, 0.5], "source": [0.3, 0.1], "n_points": 5},
    }
    path = _write_config(tmp_path, data)
    first, second = str(tmp_path / "first"), str(tmp_path / "second")
    assert main(["green", "--config", path, "--out", first]) == EXIT_OK
    assert main(["green", "--config", path, "--out", second]) == EXIT_OK

    frame = pd.read_csv(os.path.join(first, "green.csv"))
    assert list(frame.columns) == ["x", "y", "green_re", "green_im", "free_re", "free_im"]
    assert 0 < len(frame) < 25, "Targets near the boundary must be skipped"
    with open(os.path.join(first, "green.csv")) as a, open(os.path.join(second, "green.csv")) as b:
        assert a.read() == b.read()
    summary = _read_json(os.path.join(first, "green_summary.json"))
    assert summary["resolvent"]["family"] == "delta"


def test_numerical_failure_exit_code(tmp_path):
    data = {
        "grid": {"n_gamma": 64},
        "extension": {"family": "dirichlet"},
        "task": {"kind": "green", "z": -J01_SQUARED, "n_points": 3},
    }
    path = _write_config(tmp_path, data)
    out = str(tmp_path / "failure")
    assert main(["green", "--config", path, "--out", out]) == EXIT_NUMERICAL_FAILURE
    error = _read_json(os.path.join(out, "error.json"))["error"]
    assert error["code"] == EXIT_NUMERICAL_FAILURE and error["type"] == "BlockSingularError"


def test_svd_and_scatter_outputs(tmp_path):
    svd = {
        "grid": {"n_gamma": 64},
        "extension": {"family": "dirichlet"},
        "task": {"kind": "svd", "fit_range": [5, 20]},
    }
    out = str(tmp_path / "svd")
    assert main(["svd", "--config", _write_config(tmp_path, svd, "svd.json"), "--out", out]) == EXIT_OK
    assert list(pd.read_csv(os.path.join(out, "svd.csv")).columns) == ["index", "singular_value"]
    assert "slope" in _read_json(os.path.join(out, "svd_fit.json"))["fit"]

    scatter = {
        "grid": {"n_gamma": 64},
        "extension": {"family": "dirichlet"},
        "task": {"kind": "scatter", "k": 1.0, "n_angles": 8, "near_points": [[2.0, 0.0]]},
    }
    out = str(tmp_path / "scatter")
    assert main(["scatter", "--config", _write_config(tmp_path, scatter, "scatter.json"), "--out", out]) == EXIT_OK
    assert len(pd.read_csv(os.path.join(out, "far_field.csv"))) == 8
    assert len(pd.read_csv(os.path.join(out, "near_field.csv"))) == 1
    assert _read_json(os.path.join(out, "scatter_summary.json"))["scattering"]["k"] == 1.0
