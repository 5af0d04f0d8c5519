import json

import pandas as pd
import pytest

from ewp_scs import __version__
from ewp_scs.artifacts import load_scs
from ewp_scs.cli import main, parse_float_list, split_loss_list
from ewp_scs.config import get_config


def run_json(capsys, *argv):
    capsys.readouterr()
    code = main(["--no-color", "--json", *argv])
    return code, json.loads(capsys.readouterr().out)


def test_split_loss_list():
    assert split_loss_list("sharpe,mv:gamma=1,scale=0.5,es") == ["sharpe", "mv:gamma=1,scale=0.5", "es"]
    assert split_loss_list("es:level=0.1, sharpe") == ["es:level=0.1", "sharpe"]


def test_parse_float_list():
    assert parse_float_list("0.1,0.05,") == [0.1, 0.05]


def test_scs_then_metrics(tmp_path, capsys, returns_csv):
    out = tmp_path / "run"
    code, summary = run_json(capsys, "scs", "--input", str(returns_csv), "--loss", "sharpe", "--out", str(out))
    assert code == 0
    assert summary["universe_size"] == 31
    assert 1 <= summary["scs_size"] <= 31
    for name in ("scs.json", "records.csv", "manifest.json"):
        assert (out / name).exists()
    assert load_scs(out).included_count == summary["scs_size"]

    code, rows = run_json(capsys, "metrics", "--scs", str(out), "--alphas", "0.1,0.05")
    assert code == 0
    assert [r["alpha"] for r in rows] == [0.1, 0.05]
    assert rows[0]["scs_size"] <= rows[1]["scs_size"]
    written = out / "metrics"
    for name in ("metrics.csv", "inclusion.csv", "cii.csv", "cii_edges.csv", "cii.dot", "ii_profile.csv"):
        assert (written / name).exists()
    profile = pd.read_csv(written / "ii_profile.csv", index_col=0)
    assert len(profile) == 10


def test_metrics_refuses_foreign_output_directory(tmp_path, capsys, returns_csv):
    out = tmp_path / "run"
    assert main(["scs", "--input", str(returns_csv), "--out", str(out)]) == 0
    before = sorted(p.name for p in out.iterdir())
    capsys.readouterr()

    assert main(["metrics", "--scs", str(out), "--out", str(out)]) == 2
    assert "belongs to command 'scs'" in capsys.readouterr().err
    assert sorted(p.name for p in out.iterdir()) == before
    assert json.loads((out / "manifest.json").read_text())["command"] == "scs"

    theory_out = tmp_path / "theory"
    assert main(["theory", "--n", "3", "--T", "100", "--alphas", "0.05", "--out", str(theory_out)]) == 0
    assert main(["simulate", "--n", "3", "--T", "40", "--runs", "2", "--out", str(theory_out)]) == 2
    assert not (theory_out / "table.csv").exists()


def test_percent_scale_is_recorded(tmp_path, returns_csv):
    out = tmp_path / "pct"
    assert main(["scs", "--input", str(returns_csv), "--scale", "percent", "--out", str(out)]) == 0
    assert json.loads((out / "scs.json").read_text())["scale"] == "percent"


def test_check_reference_by_labels_and_hex(tmp_path, capsys, returns_csv):
    _, summary = run_json(capsys, "scs", "--input", str(returns_csv), "--out", str(tmp_path / "s"))
    labels = ",".join(summary["reference"])

    code, verdict = run_json(capsys, "check", "--input", str(returns_csv), "--candidate", labels)
    assert code == 0
    assert verdict["included"] is True
    assert verdict["z"] == 0.0
    assert verdict["candidate"] == summary["reference"]

    code, verdict = run_json(capsys, "check", "--input", str(returns_csv), "--candidate", "0x1f/5")
    assert code == 0
    assert verdict["candidate"] == ["A0", "A1", "A2", "A3", "A4"]


def test_check_rejects_unknown_candidates(returns_csv):
    assert main(["check", "--input", str(returns_csv), "--candidate", "A0,ZZ"]) == 2
    assert main(["check", "--input", str(returns_csv), "--candidate", "0x1/3"]) == 2


def test_theory(tmp_path, capsys):
    out = tmp_path / "theory"
    code, rows = run_json(capsys, "theory", "--n", "4", "--T", "250", "--alphas", "0.05", "--out", str(out))
    assert code == 0
    (row,) = rows
    assert row["lower_bound"] <= row["expected"] <= row["upper_bound"]
    assert (out / "theory.csv").exists()


def test_theory_covers_every_n(tmp_path, capsys):
    out = tmp_path / "sweep"
    code, rows = run_json(
        capsys, "theory", "--n", "3,5", "--T", "100,250", "--alphas", "0.05", "--out", str(out),
    )
    assert code == 0
    assert [(r["n"], r["T"]) for r in rows] == [(3, 100), (3, 250), (5, 100), (5, 250)]
    assert set(pd.read_csv(out / "theory.csv")["n"]) == {3, 5}


def test_small_simulation(tmp_path, capsys):
    out = tmp_path / "mc"
    code, cells = run_json(
        capsys, "simulate", "--n", "3", "--T", "40", "--runs", "2",
        "--losses", "sharpe", "--alphas", "0.05", "--out", str(out),
    )
    assert code == 0
    assert len(cells) == 1
    assert cells[0]["runs"] + cells[0]["excluded"] == 2
    assert (out / "table.csv").exists()
    assert len(json.loads((out / "runs.json").read_text())) == 2
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seeds"] == {"master": 42}


def test_input_errors_exit_with_code_2(tmp_path, capsys, returns_csv):
    assert main(["scs", "--input", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 2
    assert "PanelError" in capsys.readouterr().err
    assert main(["scs", "--input", str(returns_csv), "--loss", "bogus", "--out", str(tmp_path / "o")]) == 2
    assert main(["metrics", "--scs", str(tmp_path / "nowhere")]) == 2


def test_config_commands(capsys):
    assert main(["config", "set", "screening.alpha", "0.1"]) == 0
    assert get_config().get("screening.alpha") == 0.1
    capsys.readouterr()
    assert main(["config", "get", "screening.alpha"]) == 0
    assert capsys.readouterr().out.strip() == "0.1"
    assert main(["config", "get", "screening.nothing"]) == 2
    assert main(["config", "set", "screening.cov_mode", "hac"]) == 2
    assert main(["config", "reset"]) == 0
    assert get_config().get("screening.alpha") == 0.05


def test_version(capsys):
    assert main(["version"]) == 0
    assert __version__ in capsys.readouterr().out


@pytest.mark.parametrize("argv", [[], ["--no-color"]])
def test_no_command_prints_help(capsys, argv):
    assert main(argv) == 0
    assert "usage" in capsys.readouterr().out
