import json
import os

import pytest

from hlab import cli
from hlab.errors import ConfigError

CONFIGS = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "configs")


def _read(path):
    with open(path) as fh:
        return fh.read()


def test_quick_run_writes_all_outputs(tmp_path, capsys):
    code = cli.main(["verify-combinatorics", "--omax", "1", "--dmax", "3", "--kmax", "2", "--out", str(tmp_path)])
    assert code == 0
    assert "pass" in capsys.readouterr().out
    report = json.loads(_read(tmp_path / "report.json"))
    assert report["status"] == "pass" and report["subcommand"] == "verify-combinatorics"
    assert _read(tmp_path / "summary.txt").startswith("hlab verify-combinatorics: PASS")
    assert _read(tmp_path / "samples.csv").splitlines()[0]
    assert not [p for p in os.listdir(tmp_path) if p.startswith(".tmp-")]


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"subcommand": "extract-offdiagonal", "mass": 0.2, "k_max": 1,
                               "cases": [{"d": 2, "y": [1.0, 0.3]}]}))
    code = cli.main(["extract-offdiagonal", "--config", str(cfg), "--mass", "0.5", "--out", str(tmp_path / "o")])
    assert code == 0
    report = json.loads(_read(tmp_path / "o" / "report.json"))
    assert report["config"]["mass"] == 0.5
    assert abs(report["cases"][0]["recovered"]["1"] - 0.5) < 1e-6


def test_tolerance_failure_exit_code(tmp_path):
    code = cli.main(["extract-offdiagonal", "--kmax", "1", "--tol", "1e-30", "--out", str(tmp_path)])
    assert code == 1
    assert "FAIL" in _read(tmp_path / "summary.txt")


def test_numerical_failure_exit_code(tmp_path):
    code = cli.main(["extract-diagonal", "--d", "4", "--mass", "1e5", "--kmax", "1", "--out", str(tmp_path)])
    assert code == 3
    report = json.loads(_read(tmp_path / "report.json"))
    assert report["error"]["type"] == "TruncationError"


@pytest.mark.parametrize("payload", [
    {"subcommand": "scal-d4", "bogus": 1},
    {"subcommand": "scal-d4", "mass": "heavy"},
    {"subcommand": "scal-d4", "grids": {"s_zero": 0.4}},
    {"subcommand": "scal-d4", "schema": 7},
    {"subcommand": "extract-diagonal"},
    {"subcommand": "scal-d4", "cases": [{"d": 4, "colour": "red"}]},
])
def test_config_rejection(tmp_path, payload, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps(payload))
    assert cli.main(["scal-d4", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "configuration error" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_unreadable_config(tmp_path):
    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    assert cli.main(["scal-d4", "--config", str(cfg)]) == 2


def test_validate_config_directly():
    assert cli.validate_config({"d": 3, "mass": 1}) == {"d": 3, "mass": 1}
    with pytest.raises(ConfigError):
        cli.validate_config({"transport_residual": 1})
    with pytest.raises(ConfigError):
        cli.validate_config({"k_max": 9})


def test_every_shipped_config_validates():
    names = sorted(os.listdir(CONFIGS))
    assert len(names) >= 9
    for name in names:
        with open(os.path.join(CONFIGS, name)) as fh:
            cfg = cli.validate_config(json.load(fh))
        assert cfg["subcommand"] in cli.SUBCOMMANDS


def test_repeated_runs_are_byte_identical(tmp_path):
    args = ["extract-offdiagonal", "--config", os.path.join(CONFIGS, "c08_extract_offdiagonal.json")]
    assert cli.main(args + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b")]) == 0
    assert _read(tmp_path / "a" / "samples.csv") == _read(tmp_path / "b" / "samples.csv")
