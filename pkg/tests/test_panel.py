import math

import numpy as np
import pytest

from ewp_scs.errors import InputError
from ewp_scs.panel import PanelError, ReturnPanel, load_csv, log_returns, to_csv, validate


def write(tmp_path, text, name="panel.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_load_csv_with_header(tmp_path):
    path = write(tmp_path, "A,B,C\n0.01,0.02,-0.01\n0.00,-0.01,0.03\n0.02,0.01,0.00\n")
    panel = load_csv(path)
    assert panel.asset_labels == ("A", "B", "C")
    assert (panel.T, panel.N) == (3, 3)
    assert panel.returns[1, 2] == pytest.approx(0.03)
    assert panel.period_labels is None


def test_load_csv_without_header_and_with_dates(tmp_path):
    path = write(tmp_path, "2020-01;0.01;0.02\n2020-02;0.03;-0.01\n", name="p.csv")
    panel = load_csv(path, delimiter=";", header=False, date_column=True)
    assert panel.asset_labels == ("asset_1", "asset_2")
    assert panel.period_labels == ("2020-01", "2020-02")
    np.testing.assert_array_equal(panel.returns[:, 0], [0.01, 0.03])


def test_load_csv_reports_bad_cell(tmp_path):
    path = write(tmp_path, "A,B\n0.01,0.02\n0.01,abc\n")
    with pytest.raises(PanelError, match="file line 3"):
        load_csv(path)


def test_load_csv_reports_short_row(tmp_path):
    path = write(tmp_path, "A,B,C\n0.01,0.02,0.03\n0.01,0.02\n0.00,0.01,0.02\n")
    with pytest.raises(PanelError, match=r"Malformed row at file line 3 .*2 field\(s\), expected 3"):
        load_csv(path)


def test_load_csv_rejects_missing_values(tmp_path):
    path = write(tmp_path, "A,B\n0.01,NaN\n0.02,0.03\n")
    with pytest.raises(PanelError, match="Non-finite"):
        load_csv(path)


def test_load_csv_missing_file_is_input_error(tmp_path):
    with pytest.raises(InputError, match="File not found"):
        load_csv(tmp_path / "nope.csv")


def test_panel_rejects_duplicate_labels():
    with pytest.raises(PanelError, match="Duplicate asset labels: A"):
        ReturnPanel(np.zeros((3, 2)), ["A", "A"])


def test_panel_needs_two_periods():
    with pytest.raises(PanelError, match="at least 2 periods"):
        ReturnPanel(np.zeros((1, 2)), ["A", "B"])


def test_panel_respects_asset_cap():
    with pytest.raises(PanelError, match="N_max=3"):
        ReturnPanel(np.zeros((5, 4)), list("ABCD"), n_max=3)


def test_panel_is_read_only_and_asset_major():
    panel = ReturnPanel([[1.0, 2.0], [3.0, 4.0]], ["A", "B"])
    with pytest.raises(ValueError):
        panel.returns[0, 0] = 9.0
    np.testing.assert_array_equal(panel.columns, [[1.0, 3.0], [2.0, 4.0]])


def test_scaled_panel():
    panel = ReturnPanel([[0.01, 0.02], [0.03, -0.04]], ["A", "B"])
    np.testing.assert_allclose(panel.scaled(100.0).returns, [[1.0, 2.0], [3.0, -4.0]])


def test_to_csv_round_trip_is_bit_exact(tmp_path, panel):
    path = tmp_path / "out.csv"
    to_csv(panel, path)
    again = load_csv(path)
    np.testing.assert_array_equal(again.returns, panel.returns)
    assert again.asset_labels == panel.asset_labels


def test_log_returns():
    prices = np.array([[100.0, 10.0], [110.0, 10.0], [99.0, 12.0]])
    panel = log_returns(prices, ["A", "B"], ["d0", "d1", "d2"])
    assert panel.T == 2
    assert panel.returns[0, 0] == pytest.approx(math.log(1.1))
    assert panel.returns[1, 1] == pytest.approx(math.log(1.2))
    assert panel.period_labels == ("d1", "d2")


def test_log_returns_inverts_compounding():
    rng = np.random.default_rng(12)
    returns = rng.uniform(-0.5, 0.5, size=(80, 4))
    prices = np.exp(np.vstack([np.zeros((1, 4)), np.cumsum(returns, axis=0)]))
    panel = log_returns(prices)
    np.testing.assert_allclose(panel.returns, returns, rtol=0, atol=1e-12)


def test_log_returns_rejects_nonpositive_prices():
    with pytest.raises(PanelError, match="Nonpositive price"):
        log_returns([[1.0], [0.0], [2.0]])


def test_validate_flags_constant_and_duplicate_columns():
    rng = np.random.default_rng(3)
    x = rng.normal(size=20)
    returns = np.column_stack([x, x, np.full(20, 0.01), rng.normal(size=20)])
    problems = validate(ReturnPanel(returns, ["A", "B", "C", "D"]))
    assert any("zero variance" in p and "(C)" in p for p in problems)
    assert any("duplicate pair" in p and "(A, B)" in p for p in problems)


def test_validate_clean_panel(panel):
    assert validate(panel) == []
