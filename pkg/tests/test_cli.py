"""CLI: config resolution, outputs, determinism and exit codes."""

import json

import pytest

from stimdyn.cli import (ConfigError, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK,
                         SCENARIOS, list_scenarios, main, resolve_config)

FAST = ["--set", "n_modes=100", "--set", "t_end=10.0", "--set",
        "avg_t_lo=2.0", "--set", "avg_t_hi=10.0"]


def test_registry_has_ten_scenarios():
    assert len(SCENARIOS) == 10
    # stable ordering, every entry described
    names = list(SCENARIOS)
    assert names[0] == "free-wp"
    assert all(SCENARIOS[n].description for n in names)
    listing = list_scenarios()
    assert all(n in listing for n in names)


def test_list_command(capsys):
    assert main(["list"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "spon-decay" in out


def test_resolve_config_rejects_unknown():
    with pytest.raises(ConfigError, match="unknown key"):
        resolve_config("spon-decay", None, ["bogus=1"])
    with pytest.raises(ConfigError, match="unknown scenario"):
        resolve_config("nope", None, [])
    with pytest.raises(ConfigError, match="cannot parse"):
        resolve_config("spon-decay", None, ["n_modes=many"])
    with pytest.raises(ConfigError, match="key=value"):
        resolve_config("spon-decay", None, ["n_modes"])


def test_config_file_and_override(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("n_modes = 120\nt_end = 12.5\n")
    cfg = resolve_config("spon-decay", str(cfg_file), ["t_end=9.0"])
    assert cfg["n_modes"] == 120
    assert cfg["t_end"] == 9.0  # --set wins over the file


def test_config_file_with_sections(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("[cavity]\nn_modes = 80\n[sampling]\ndt = 0.01\n")
    cfg = resolve_config("spon-decay", str(cfg_file), [])
    assert cfg["n_modes"] == 80
    assert cfg["dt"] == 0.01


def test_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "run1"
    code = main(["run", "spon-decay", "--out", str(out)] + FAST)
    assert code == EXIT_OK
    assert (out / "manifest.json").exists()
    assert (out / "population.csv").exists()
    assert (out / "decay_rate.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert "mean_rate" in summary and "golden_rule_rate" in summary
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["scenario"] == "spon-decay"
    assert manifest["config"]["n_modes"] == 100
    assert "timestamp" in manifest
    header = (out / "population.csv").read_text().splitlines()[0]
    assert header == "t,P2"


def test_runs_are_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "spon-decay", "--out", str(out1)] + FAST) == EXIT_OK
    assert main(["run", "spon-decay", "--out", str(out2)] + FAST) == EXIT_OK
    for name in ("population.csv", "decay_rate.csv", "summary.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_exit_code_config_error(tmp_path, capsys):
    code = main(["run", "spon-decay", "--set", "bogus=1",
                 "--out", str(tmp_path / "x")])
    assert code == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_exit_code_missing_config_file(tmp_path, capsys):
    code = main(["run", "spon-decay", "--config",
                 str(tmp_path / "nope.cfg")])
    assert code == EXIT_CONFIG


def test_exit_code_numerical_failure(tmp_path, capsys):
    # dt far beyond the stability guard of the mode window
    code = main(["run", "spon-decay", "--set", "dt=5.0",
                 "--out", str(tmp_path / "x")])
    assert code == EXIT_NUMERICAL
    assert "numerical failure" in capsys.readouterr().err
