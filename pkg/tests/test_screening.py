import math
from dataclasses import replace

import numpy as np
import pytest

from ewp_scs.errors import DegeneracyError, InputError
from ewp_scs.losses import ExpectedShortfall, MeanVariance, Sharpe
from ewp_scs.metrics import compute_metrics
from ewp_scs.panel import ReturnPanel
from ewp_scs.screening import (
    ScreenConfig,
    ScreeningError,
    build_scs,
    empirical_optimum,
    find_reference,
    plausibility_check,
)
from ewp_scs.selection import MaxAssetsFilter, SelectionMask
from ewp_scs.statistic import CODE_LOSS_UNDEFINED, CODE_TAU_FLOOR

from oracles import (
    naive_cii,
    naive_inclusion,
    naive_lower_boundary,
    naive_scs,
    random_panel_returns,
)

CASES = [
    (MeanVariance(gamma=0.5), "mv", {"gamma": 0.5}),
    (Sharpe(), "sharpe", {}),
    (ExpectedShortfall(level=0.1), "es", {"level": 0.1}),
]


@pytest.mark.parametrize("seed", range(50))
def test_pipeline_matches_naive_oracle(seed):
    N = 3 + seed % 3
    T = (20, 50)[seed // 3 % 2]
    spec, name, params = CASES[seed % len(CASES)]
    mode = ("gaussian", "iid")[seed // 6 % 2]
    alpha = 0.05
    returns = random_panel_returns(1000 + seed, T, N)
    panel = ReturnPanel(returns, [f"A{j}" for j in range(N)])

    result = build_scs(panel, spec, ScreenConfig(alpha=alpha, cov_mode=mode))
    oracle = naive_scs(returns, name, params, alpha, mode)

    assert result.reference.bits == oracle["reference"]
    assert result.reference_loss == pytest.approx(oracle["reference_loss"], abs=1e-10)
    masks = [int(b) for b in result.masks]
    assert masks == list(range(1, 1 << N))
    np.testing.assert_allclose(result.z, [oracle["z"][m] for m in masks], rtol=1e-9, atol=1e-10)
    np.testing.assert_allclose(result.losses, [oracle["losses"][m] for m in masks], rtol=1e-9, atol=1e-10)
    assert set(int(b) for b in result.included_bits()) == oracle["included"]

    metrics = compute_metrics(result)
    included = oracle["included"]
    assert {m.bits for m in metrics.lower_boundary} == naive_lower_boundary(included)
    np.testing.assert_allclose(metrics.inclusion, naive_inclusion(included, N), atol=1e-12)
    np.testing.assert_allclose(metrics.co_inclusion, naive_cii(included, N), atol=1e-12)
    assert metrics.rmi == pytest.approx(1 - math.log(len(included)) / math.log(2 ** N - 1), abs=1e-12)
    assert metrics.loss_max == pytest.approx(max(oracle["losses"][m] for m in included), abs=1e-10)


@pytest.mark.parametrize("seed", range(20))
def test_structural_invariants(seed, make_panel):
    panel = make_panel(seed=seed, T=40, N=5)
    spec = CASES[seed % 3][0]
    wide = build_scs(panel, spec, ScreenConfig(alpha=0.01))
    mid, narrow = wide.at_alpha(0.05), wide.at_alpha(0.10)

    for result in (wide, mid, narrow):
        assert result.record_for(result.reference).included
        result.check_invariants()
    narrow_set = set(narrow.included_bits().tolist())
    mid_set = set(mid.included_bits().tolist())
    wide_set = set(wide.included_bits().tolist())
    assert narrow_set <= mid_set <= wide_set
    assert (wide.losses >= wide.reference_loss).all()


@pytest.mark.parametrize("seed", range(20))
def test_loss_scaling_invariance(seed, make_panel):
    panel = make_panel(seed=seed, T=40, N=4)
    a = build_scs(panel, MeanVariance(gamma=0.5), ScreenConfig(alpha=0.05))
    b = build_scs(panel, MeanVariance(gamma=1.5, scale=3.0), ScreenConfig(alpha=0.05))
    assert a.reference == b.reference
    np.testing.assert_allclose(a.z, b.z, rtol=1e-9, atol=1e-10)
    np.testing.assert_array_equal(a.included, b.included)


def test_percent_scaling_keeps_the_selection(panel):
    spec = Sharpe()
    a = build_scs(panel, spec)
    b = build_scs(panel.scaled(100.0), spec)
    assert a.reference == b.reference
    np.testing.assert_allclose(a.z, b.z, rtol=1e-8, atol=1e-9)


def test_results_do_not_depend_on_workers_or_blocks(panel):
    spec = ExpectedShortfall()
    base = build_scs(panel, spec, ScreenConfig(block_size=4096, worker_count=1))
    other = build_scs(panel, spec, ScreenConfig(block_size=5, worker_count=2))
    again = build_scs(panel, spec, ScreenConfig(block_size=5, worker_count=1))
    np.testing.assert_array_equal(other.masks, base.masks)
    np.testing.assert_allclose(other.z, base.z, rtol=1e-9, atol=1e-12)
    np.testing.assert_array_equal(other.included, base.included)
    np.testing.assert_array_equal(other.z, again.z)


def test_ties_go_to_smallest_mask():
    rng = np.random.default_rng(0)
    best = 0.01 + rng.normal(size=30) * 0.001
    worse = rng.normal(size=(30, 2)) * 0.05 - 0.01
    panel = ReturnPanel(np.column_stack([best, best, worse]), ["A", "B", "C", "D"])
    spec = MeanVariance(gamma=0.5)
    mask, loss = empirical_optimum(panel, spec)
    assert mask == SelectionMask(0b0001, 4)

    result = build_scs(panel, spec)
    for twin in (0b0010, 0b0011):
        record = result.record_for(SelectionMask(twin, 4))
        assert record.included
        assert record.z == 0.0
        assert record.code == CODE_TAU_FLOOR
        assert record.loss == pytest.approx(loss, abs=1e-15)


def test_undefined_loss_records_are_kept_and_excluded():
    rng = np.random.default_rng(1)
    returns = np.column_stack([np.zeros(40), rng.normal(0.01, 0.02, size=(40, 2))])
    panel = ReturnPanel(returns, ["CASH", "X", "Y"])
    result = build_scs(panel, Sharpe())
    record = result.record_for(SelectionMask(0b001, 3))
    assert record.code == CODE_LOSS_UNDEFINED
    assert record.z == math.inf
    assert record.degenerate and not record.included
    assert result.record_count == 7
    assert result.universe_size == 7


def test_loss_undefined_everywhere():
    panel = ReturnPanel(np.zeros((10, 2)), ["A", "B"])
    with pytest.raises(ScreeningError) as info:
        build_scs(panel, Sharpe())
    assert isinstance(info.value, DegeneracyError)


def test_mask_filter_restricts_universe(panel):
    config = ScreenConfig(mask_filter=MaxAssetsFilter(2))
    result = build_scs(panel, MeanVariance(), config)
    n = panel.N
    assert result.universe_size == n + n * (n - 1) // 2
    assert all(int(b).bit_count() <= 2 for b in result.masks)
    assert result.reference.weight <= 2


def test_filter_excluding_everything():
    panel = ReturnPanel(np.random.default_rng(0).normal(size=(10, 3)), list("ABC"))
    with pytest.raises(ScreeningError, match="No selection passes"):
        build_scs(panel, MeanVariance(), ScreenConfig(mask_filter=lambda m: False))


def test_record_cap_keeps_included_and_quantiles(panel):
    full = build_scs(panel, Sharpe(), ScreenConfig(alpha=0.05))
    capped = build_scs(panel, Sharpe(), ScreenConfig(alpha=0.05, record_cap=4))
    assert capped.records_truncated
    assert capped.included.all()
    np.testing.assert_array_equal(capped.masks, full.included_bits())
    assert capped.universe_size == full.universe_size
    assert capped.z_quantiles
    assert capped.at_alpha(0.10).included_count <= capped.included_count
    with pytest.raises(ScreeningError, match="truncated"):
        capped.at_alpha(0.01)


def test_reference_can_be_reused(panel):
    spec = ExpectedShortfall()
    ref = find_reference(panel, spec)
    assert ref.universe_size == 2 ** panel.N - 1
    assert ref.series.shape == (panel.T,)
    a = build_scs(panel, spec, reference=ref)
    b = build_scs(panel, spec)
    np.testing.assert_array_equal(a.z, b.z)


def test_plausibility_check_agrees_with_full_screen(panel):
    spec = MeanVariance(gamma=0.5)
    config = ScreenConfig(alpha=0.05)
    result = build_scs(panel, spec, config)
    for record in result.records[::5]:
        verdict = plausibility_check(panel, spec, config, record.mask)
        assert verdict["included"] == record.included
        assert verdict["z"] == pytest.approx(record.z, rel=1e-9, abs=1e-10)
        assert verdict["reference_loss"] == result.reference_loss


def test_plausibility_check_rejects_foreign_masks(panel):
    config = ScreenConfig(mask_filter=MaxAssetsFilter(1))
    with pytest.raises(InputError):
        plausibility_check(panel, Sharpe(), config, SelectionMask(0b11, panel.N))
    with pytest.raises(InputError):
        plausibility_check(panel, Sharpe(), ScreenConfig(), SelectionMask(1, panel.N + 1))


@pytest.mark.parametrize("kwargs", [
    {"alpha": 0.0}, {"alpha": 1.0}, {"cov_mode": "hac"}, {"worker_count": -1},
    {"block_size": 0}, {"record_cap": 0},
])
def test_screen_config_validation(kwargs):
    with pytest.raises(InputError):
        ScreenConfig(**kwargs)


def test_single_asset_universe():
    panel = ReturnPanel(np.random.default_rng(0).normal(size=(10, 1)), ["A"])
    result = build_scs(panel, Sharpe())
    assert result.included_count == 1
    assert compute_metrics(result).rmi == 1.0


def test_at_alpha_is_a_pure_rethreshold(panel):
    result = build_scs(panel, Sharpe(), ScreenConfig(alpha=0.01))
    again = result.at_alpha(0.05)
    direct = build_scs(panel, Sharpe(), replace(ScreenConfig(), alpha=0.05))
    np.testing.assert_array_equal(again.included, direct.included)
    assert again.q == pytest.approx(1.6448536, abs=1e-7)


def test_tiny_alpha_keeps_every_non_degenerate_mask():
    rng = np.random.default_rng(21)
    panel = ReturnPanel(rng.normal(0.01, 0.05, size=(20, 4)), list("ABCD"))
    result = build_scs(panel, Sharpe(), ScreenConfig(alpha=1e-9))
    assert result.q > 5.9
    assert not result.degenerate.any()
    assert result.included.all()
    assert result.included_count == result.universe_size == 15


def test_dominated_candidate_is_far_outside():
    rng = np.random.default_rng(8)
    returns = rng.normal(0.0, 0.01, size=(2000, 3)) + np.array([0.01, 0.01, -0.02])
    panel = ReturnPanel(returns, ["GOOD1", "GOOD2", "BAD"])
    config = ScreenConfig(alpha=0.05)
    verdict = plausibility_check(panel, MeanVariance(gamma=0.5), config, SelectionMask(0b100, 3))
    assert not verdict["included"]
    assert verdict["z"] > 10 * verdict["q"]


def test_boundary_candidate_flips_with_alpha(make_panel):
    spec = MeanVariance(gamma=0.5)
    lo, hi = ScreenConfig(alpha=0.10), ScreenConfig(alpha=0.01)
    for seed in range(40):
        panel = make_panel(seed=seed, T=40, N=5)
        result = build_scs(panel, spec, lo)
        inside = (result.z > lo.q + 0.05) & (result.z < hi.q - 0.05)
        if inside.any():
            break
    else:
        pytest.fail("no seeded panel has a mask between the 90% and 99% critical values")

    candidate = SelectionMask(int(result.masks[np.flatnonzero(inside)[0]]), panel.N)
    strict = plausibility_check(panel, spec, lo, candidate)
    loose = plausibility_check(panel, spec, hi, candidate)
    assert not strict["included"]
    assert loose["included"]
    assert strict["z"] == pytest.approx(loose["z"], rel=1e-12)
