import json

import numpy as np
import pytest

from risklab.cli import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    ConfigError,
    build_parser,
    load_return_matrix_csv,
    parse_grid,
    run,
    write_return_matrix_csv,
)
from risklab.errors import ParseError
from risklab.market import EnsembleSpec, covariance, sample_return_matrix


def test_theory_output(capsys):
    assert run(["theory", "--alpha", "2"]) == EXIT_OK
    assert "eps_q=0.5 qw_q=2 eps_or=1 qw_or=1" in capsys.readouterr().out


def test_theory_rates(capsys):
    assert run(["theory", "--alpha", "2", "--beta", "2", "--eps-tilde", "0.6", "--n-replica", "1", "--f-tilde", "0"]) == 0
    out = capsys.readouterr().out
    assert "R_plus(eps=0.6)=0.158145 [finite]" in out and "phi(n=1)=" in out


def test_unknown_command_and_flag(capsys):
    assert run(["bogus"]) == EXIT_CONFIG
    assert run(["theory", "--alpha", "2", "--nope"]) == EXIT_CONFIG
    assert "usage" in capsys.readouterr().err


def test_invalid_value_names_field(capsys):
    assert run(["sweep", "--alpha-grid", "1.2:8:0.4", "--samples", "0"]) == EXIT_CONFIG
    assert "samples" in capsys.readouterr().err
    assert run(["scan", "--alpha", "0.5"]) == EXIT_CONFIG


@pytest.mark.parametrize("command", ["theory", "sweep", "scan", "chernoff", "spectrum", "game", "risk"])
def test_help_lists_every_flag(command, capsys):
    assert run([command, "--help"]) == EXIT_OK
    out = capsys.readouterr().out
    _, subs = build_parser()
    for action in subs[command]._actions:
        for opt in action.option_strings:
            assert opt in out
    assert "default" in out


def test_parse_grid():
    assert parse_grid("1.2:8.0:0.4") == [round(1.2 + 0.4 * k, 12) for k in range(18)]
    assert parse_grid("1,2,3") == [1.0, 2.0, 3.0]
    with pytest.raises(ConfigError):
        parse_grid("1:2")
    with pytest.raises(ConfigError):
        parse_grid("1:2:0")


def test_load_csv_examples(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2,0\n0,1,1\n")
    x = load_return_matrix_csv(p)
    np.testing.assert_array_equal(x.raw, [[1, 2, 0], [0, 1, 1]])
    np.testing.assert_allclose(x.entries, np.array([[1, 2, 0], [0, 1, 1]]) / np.sqrt(2))


def test_load_csv_errors(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("1,2,3\n4,5\n")
    with pytest.raises(ParseError, match="row 2"):
        load_return_matrix_csv(p)
    p.write_text("1,2\n3,x\n")
    with pytest.raises(ParseError, match="column 2"):
        load_return_matrix_csv(p)


def test_csv_round_trip(tmp_path):
    x = sample_return_matrix(EnsembleSpec(5, 3.0, 1), 0)
    p = tmp_path / "rt.csv"
    write_return_matrix_csv(x, p)
    np.testing.assert_allclose(covariance(load_return_matrix_csv(p)), covariance(x), atol=1e-12, rtol=0)


def test_risk_from_csv(tmp_path, capsys):
    p = tmp_path / "x.csv"
    p.write_text("1,2,0,1\n0,1,1,-1\n")
    assert run(["risk", "--csv", str(p), "--beta", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "N=2 p=4" in out and "f=" in out


def test_risk_numeric_failure(tmp_path):
    assert run(["risk", "--alpha", "0.5", "--n", "20"]) == EXIT_NUMERIC
    p = tmp_path / "r.csv"
    p.write_text("1,2\n3\n")
    assert run(["risk", "--csv", str(p)]) == EXIT_CONFIG


def test_seed_env_fallback(monkeypatch, capsys):
    args = ["risk", "--alpha", "3", "--n", "20"]
    monkeypatch.setenv("RISKLAB_SEED", "7")
    run(args)
    env_out = capsys.readouterr().out
    run(args + ["--seed", "7"])
    assert capsys.readouterr().out == env_out
    run(args + ["--seed", "8"])
    assert capsys.readouterr().out != env_out
    monkeypatch.setenv("RISKLAB_SEED", "seven")
    assert run(args) == EXIT_CONFIG


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alpha_grid": "2", "n": 40, "samples": 4, "seed": 2, "out": str(tmp_path / "s.csv")}))
    assert run(["--config", str(cfg), "sweep"]) == EXIT_OK
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("2,2,40,4,")
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["--config", str(cfg), "sweep"]) == EXIT_CONFIG
    assert run(["--config", str(tmp_path / "missing.json"), "sweep"]) == EXIT_CONFIG


def test_sweep_default_name_and_determinism(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(["sweep", "--alpha-grid", "1.5,3", "--n", "40", "--samples", "5", "--seed", "1"]) == 0
    first = (tmp_path / "sweep_grid1.5_3_40_1.csv").read_bytes()
    assert run(["sweep", "--alpha-grid", "1.5,3", "--n", "40", "--samples", "5", "--seed", "1", "--threads", "3"]) == 0
    assert (tmp_path / "sweep_grid1.5_3_40_1.csv").read_bytes() == first


def test_spectrum_scan_chernoff_game(tmp_path, capsys):
    assert run(["spectrum", "--n", "60", "--out", str(tmp_path / "h.csv")]) == 0
    assert (tmp_path / "h.csv").read_text().startswith("bin_left,bin_right,density,mp_density")
    assert run(["scan", "--n-list", "30,60", "--samples", "10", "--out", str(tmp_path / "s.csv")]) == 0
    assert run(["chernoff", "--n", "30", "--samples", "50", "--out", str(tmp_path / "c.csv")]) in (0, 2)
    assert run(["game", "--case", "c", "--trials", "2000", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "equal_counts" in out and "166.6667" in out
