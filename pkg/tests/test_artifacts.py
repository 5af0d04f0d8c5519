import json
import math

import numpy as np
import pandas as pd
import pytest

from ewp_scs.artifacts import (
    ArtifactError,
    encode_float,
    load_scs,
    mc_table,
    metrics_frame,
    records_frame,
    scs_to_dict,
    theory_row,
    write_cii_edges,
    write_inclusion_csv,
    write_mc_outputs,
    write_records_csv,
    write_scs_json,
    write_theory_csv,
)
from ewp_scs.losses import Sharpe
from ewp_scs.metrics import cii_graph_export, compute_metrics
from ewp_scs.moments import portfolio_series, sample_moments
from ewp_scs.panel import ReturnPanel
from ewp_scs.screening import ScreenConfig, build_scs
from ewp_scs.selection import SelectionMask
from ewp_scs.simulate import GeneratorSpec, Model2, run_mc
from ewp_scs.simulate.population import TheoryResult


@pytest.fixture
def result(panel):
    return build_scs(panel, Sharpe(), ScreenConfig(alpha=0.05))


def test_encode_float():
    assert encode_float(math.inf) == "inf"
    assert encode_float(-math.inf) == "-inf"
    assert encode_float(math.nan) == "nan"
    assert encode_float(0.25) == 0.25


def test_scs_json_reloads_exactly(tmp_path, result):
    path = write_scs_json(result, tmp_path, scale="percent")
    assert path.name == "scs.json"
    data = json.loads(path.read_text())
    assert data["format"] == "ewp-scs/1"
    assert data["scale"] == "percent"
    assert data["reference"] == result.reference.to_hex()

    again = load_scs(tmp_path)
    assert again.reference == result.reference
    assert again.reference_loss == result.reference_loss
    np.testing.assert_array_equal(again.masks, result.masks)
    np.testing.assert_array_equal(again.z, result.z)
    np.testing.assert_array_equal(again.included, result.included)
    assert again.loss_spec == "sharpe"
    assert again.asset_labels == result.asset_labels


def test_non_finite_values_survive_json(tmp_path):
    rng = np.random.default_rng(1)
    returns = np.column_stack([np.zeros(40), rng.normal(0.01, 0.02, size=(40, 2))])
    result = build_scs(ReturnPanel(returns, ["CASH", "X", "Y"]), Sharpe())
    write_scs_json(result, tmp_path)
    text = (tmp_path / "scs.json").read_text()
    assert "Infinity" not in text and "NaN" not in text
    again = load_scs(tmp_path / "scs.json")
    assert again.z[0] == math.inf
    assert again.codes[0] == "loss_undefined"


def test_load_scs_errors(tmp_path, result):
    with pytest.raises(ArtifactError, match="No such file"):
        load_scs(tmp_path / "missing.json")

    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(ArtifactError, match="not valid JSON"):
        load_scs(tmp_path / "bad.json")

    data = scs_to_dict(result)
    data["cov_mode"] = "hac"
    (tmp_path / "schema.json").write_text(json.dumps(data))
    with pytest.raises(ArtifactError, match="Invalid scs.json"):
        load_scs(tmp_path / "schema.json")

    data = scs_to_dict(result)
    data["records"]["z"] = data["records"]["z"][:-1]
    (tmp_path / "short.json").write_text(json.dumps(data))
    with pytest.raises(ArtifactError, match="differ in length"):
        load_scs(tmp_path / "short.json")

    data = scs_to_dict(result)
    data["records"]["included"] = [False] * len(data["records"]["included"])
    (tmp_path / "broken.json").write_text(json.dumps(data))
    with pytest.raises(ArtifactError, match="Inconsistent"):
        load_scs(tmp_path / "broken.json")


def test_records_csv(tmp_path, result):
    path = write_records_csv(result, tmp_path)
    frame = pd.read_csv(path, keep_default_na=False)
    assert list(frame.columns) == [
        "mask", "labels", "weight", "mean", "sd", "loss", "z", "included", "degenerate", "code",
    ]
    assert len(frame) == result.record_count
    first = frame.iloc[0]
    assert first["mask"] == f"0x1/{result.n_assets}"
    assert first["labels"] == result.asset_labels[0]
    assert frame["included"].sum() == result.included_count
    assert records_frame(result)["weight"].max() == result.n_assets


def test_records_carry_portfolio_mean_and_sd(tmp_path, panel, result):
    frame = pd.read_csv(write_records_csv(result, tmp_path), keep_default_na=False)
    for bits in (1, 0b101, (1 << panel.N) - 1):
        mask = SelectionMask(bits, panel.N)
        expected = sample_moments(portfolio_series(panel, mask))
        row = frame[frame["mask"] == mask.to_hex()].iloc[0]
        assert row["mean"] == pytest.approx(expected.mean, rel=1e-12)
        assert row["sd"] == pytest.approx(math.sqrt(expected.variance), rel=1e-12)
        record = result.record_for(mask)
        assert record.sd == pytest.approx(math.sqrt(expected.variance), rel=1e-12)

    write_scs_json(result, tmp_path)
    again = load_scs(tmp_path)
    np.testing.assert_array_equal(again.means, result.means)
    np.testing.assert_array_equal(again.variances, result.variances)
    assert np.isfinite(again.means).all()


def test_metrics_and_inclusion_tables(tmp_path, result):
    metrics = [compute_metrics(result.at_alpha(a)) for a in (0.1, 0.05)]
    frame = metrics_frame(metrics)
    assert list(frame["confidence"]) == [0.9, 0.95]
    assert frame["rmi_pct"].iloc[1] == pytest.approx(100 * metrics[1].rmi)
    assert frame["loss_min_pct"].iloc[0] == pytest.approx(100 * result.reference_loss)

    path = write_inclusion_csv(metrics, result.asset_labels, tmp_path)
    inclusion = pd.read_csv(path)
    assert list(inclusion.columns) == ["asset", "ii_0.1", "ii_0.05"]


def test_cii_edges_and_dot(tmp_path, result):
    metrics = compute_metrics(result)
    edges = cii_graph_export(result, 0.01, cii=metrics.co_inclusion)
    csv_path, dot_path = write_cii_edges(edges, result.asset_labels, tmp_path)
    frame = pd.read_csv(csv_path)
    assert list(frame.columns) == ["source", "target", "cii"]
    assert len(frame) == len(edges)
    assert dot_path.read_text().startswith("// co-inclusion graph")


def test_mc_outputs(tmp_path):
    estimates = run_mc(GeneratorSpec(Model2(0.75), n=3, seed=4), [Sharpe()], [0.1, 0.05], [40], runs=3)
    table = mc_table(estimates)
    assert len(table) == 1
    for column in ("kappa_95", "kappa_95_se", "p_95", "kappa_lower_90", "excluded_90"):
        assert column in table.columns
    paths = write_mc_outputs(estimates, tmp_path)
    assert [p.name for p in paths] == ["table.csv", "runs.json"]
    runs = json.loads((tmp_path / "runs.json").read_text())
    assert len(runs) == 3 * 2
    assert {r["status"] for r in runs} == {"ok"}


def test_theory_csv(tmp_path):
    row = theory_row(TheoryResult(4.2, 0.95, 9.0, 0.3, 1), n=4, loss="sharpe", alpha=0.05, T=250)
    path = write_theory_csv([row], tmp_path)
    frame = pd.read_csv(path)
    assert frame.loc[0, "expected"] == pytest.approx(4.2)
    assert list(frame.columns)[:4] == ["n", "loss", "alpha", "T"]
