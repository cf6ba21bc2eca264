import json

import pandas as pd
import pytest

import cli.commands as commands
from asymptotics import trial_state
from cli.config import build_config, merge, read_config_file
from cli.defaults import DEFAULTS_VERSION, get_defaults
from core.errors import ConfigError, SolverError
from main import run
from utils.parallel import THREADS_ENV


def _read_json(path):
    return json.loads(path.read_text(encoding="utf-8"))


def test_show_defaults(capsys):
    assert run(["--show-defaults"]) == 0
    shown = json.loads(capsys.readouterr().out)
    assert shown["version"] == DEFAULTS_VERSION
    assert shown == json.loads(json.dumps(get_defaults()))


def test_missing_command_is_config_error():
    assert run([]) == 2


def test_defaults_copy_is_independent():
    d = get_defaults()
    d["params"]["alpha"] = 99.0
    assert get_defaults()["params"]["alpha"] == 1.0


def test_merge_is_recursive():
    merged = merge({"a": {"x": 1, "y": 2}, "b": 1}, {"a": {"y": 3}})
    assert merged == {"a": {"x": 1, "y": 3}, "b": 1}


def test_build_config_layers():
    config = build_config("solve", {"params": {"beta": 2.0}}, {"params": {"alpha": 3.0}})
    assert config.params.alpha == 3.0
    assert config.params.beta == 2.0
    assert config.grid.n == 8193
    assert config.solver.options().max_iter == 20000


def test_unknown_key_names_the_path():
    with pytest.raises(ConfigError, match="grid.bogus"):
        build_config("solve", {"grid": {"bogus": 1}})
    with pytest.raises(ConfigError, match="command"):
        build_config("solve", {"command": "ladder"})


def test_config_file_errors(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config_file(broken)
    with pytest.raises(ConfigError):
        read_config_file(tmp_path / "missing.json")
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        read_config_file(listing)
    assert run(["solve", "--config", str(broken), "--out", str(tmp_path / "o")]) == 2


@pytest.mark.parametrize("argv", [
    ["solve", "--alpha", "0"],
    ["solve", "--alpha", "1", "--delta-well"],
    ["solve", "--n", "100"],
    ["solve", "--beta", "-1"],
    ["potential", "--x-min", "1", "--x-max", "0"],
    ["potential", "--field", "0.5"],
    ["ladder", "--fields", "1e6", "1e9", "1e12"],
    ["ladder", "--fields", "1e18", "1e12", "1e9", "1e6"],
    ["perturb", "--alpha", "0"],
    ["perturb", "--eps", "-0.1"],
])
def test_invalid_invocations_exit_2(argv, tmp_path):
    assert run(argv + ["--out", str(tmp_path)]) == 2


def test_solve_writes_artifacts(tmp_path):
    out = tmp_path / "solve"
    code = run(["solve", "--n", "1025", "--half-width", "30", "--out", str(out)])
    assert code == 0
    summary = _read_json(out / "solve.json")
    assert summary["converged"] is True
    assert summary["relative_error"] <= 1e-2
    assert summary["config"]["grid"]["n"] == 1025
    profile = pd.read_csv(out / "profile.csv")
    assert list(profile.columns) == ["x", "psi", "phi0"]
    assert len(profile) == 1025
    names = [a["name"] for a in _read_json(out / "artifacts.json")]
    assert names == ["solve.json", "profile.csv", "MANIFEST.md"]


def test_solve_delta_well(tmp_path):
    out = tmp_path / "delta"
    assert run(["solve", "--alpha", "0", "--delta-well", "--n", "2049", "--out", str(out)]) == 0
    summary = _read_json(out / "solve.json")
    assert summary["reference"] == -0.25
    assert summary["relative_error"] <= 1e-2


def test_potential_low_field_rows(tmp_path):
    out = tmp_path / "pot"
    code = run(["potential", "--field", "2", "--x-min", "0", "--x-max", "1",
                "--samples", "3", "--out", str(out)])
    assert code == 0
    table = pd.read_csv(out / "potential.csv")
    assert list(table.columns) == ["x", "v_upper", "v_lower", "coulomb"]
    assert table["v_lower"][0] == 2.0
    assert table["v_upper"][0] == pytest.approx(1.7724538509055159, rel=1e-12)
    constants = _read_json(out / "constants.json")
    assert constants["windows"] == []
    assert "mu" not in constants


def test_potential_footer_and_repeatability(tmp_path):
    out = tmp_path / "pot"
    argv = ["potential", "--field", "1e6", "--window", "0.5", "--samples", "11", "--out", str(out)]
    assert run(argv) == 0
    first = (out / "potential.csv").read_bytes()
    first_constants = (out / "constants.json").read_bytes()
    assert run(argv) == 0
    assert (out / "potential.csv").read_bytes() == first
    assert (out / "constants.json").read_bytes() == first_constants

    lines = first.decode("utf-8").splitlines()
    assert lines[0] == "x,v_upper,v_lower,coulomb"
    assert lines[-1].startswith("# L=0.5 ")
    window = _read_json(out / "constants.json")["windows"][0]
    assert window["upper_residual"] <= 1e-7
    assert window["lower_residual"] <= 1e-7


def test_potential_json_format(tmp_path):
    out = tmp_path / "pot"
    assert run(["potential", "--samples", "5", "--format", "json", "--out", str(out)]) == 0
    document = _read_json(out / "potential.json")
    assert len(document["rows"]) == 5
    assert len(document["notes"]) == 3


def test_ladder_without_enough_successes_exits_3(tmp_path):
    out = tmp_path / "ladder"
    code = run(["ladder", "--fields", "1e6", "1e9", "1e12", "1e18", "--ladder-n", "65",
                "--out", str(out)])
    assert code == 3
    fit = _read_json(out / "fit.json")
    assert fit["fit"] is None
    assert "error" in fit
    table = pd.read_csv(out / "ladder.csv")
    assert not table["ok"].any()


def test_perturb_quick(tmp_path):
    out = tmp_path / "perturb"
    code = run(["perturb", "--n", "2049", "--eps", "0.01", "0.001", "--no-extrapolate",
                "--quick", "--out", str(out)])
    assert code == 0
    report = _read_json(out / "perturb.json")
    assert report["target"] == pytest.approx(-0.625)
    assert len(report["right"]) == 2
    assert not (out / "pairing.csv").exists()


def test_verify_quick(tmp_path):
    out = tmp_path / "verify"
    assert run(["verify", "--quick", "--out", str(out)]) == 0
    report = _read_json(out / "verify.json")
    assert report["passed"] is True
    assert report["first_failure"] is None


@pytest.mark.slow
def test_ladder_artifacts_identical_across_thread_counts(tmp_path, monkeypatch):
    out = tmp_path / "ladder"
    argv = ["ladder", "--model", "hydrogenic", "--fields", "1e6", "1e9", "1e12", "1e18",
            "--ladder-n", "1025", "--out", str(out)]
    produced = []
    for threads in ("1", "3"):
        monkeypatch.setenv(THREADS_ENV, threads)
        assert run(argv) == 0
        produced.append(((out / "ladder.csv").read_bytes(), (out / "fit.json").read_bytes()))
    assert produced[0] == produced[1]
    assert pd.read_csv(out / "ladder.csv")["ok"].all()


def test_perturb_pairing_failure_is_recorded_per_row(tmp_path, monkeypatch):
    def flaky_minimizer(B, p, policy, opts):
        if B > 1e8:
            raise SolverError("energia NaN na iteração 3")
        return trial_state(B, p, policy.grid_for(B))

    monkeypatch.setattr(commands, "classical_minimizer", flaky_minimizer)
    out = tmp_path / "perturb"
    code = run(["perturb", "--n", "2049", "--eps", "0.01", "--no-extrapolate",
                "--pairing-fields", "1e6", "1e9", "--out", str(out)])
    assert code == 0
    table = pd.read_csv(out / "pairing.csv", comment="#")
    assert list(table["B"]) == [1e6, 1e9]
    assert list(table["ok"]) == [True, False]
    assert "NaN" in table["error"][1]
    assert table["pairing"].isna().tolist() == [False, True]
    report = _read_json(out / "perturb.json")
    assert report["sandwich_violations"] == 0
    assert len(report["right_lower"]) == len(report["left_upper"]) == 1
