import math

import numpy as np
import pytest

from ewp_scs.losses import ExpectedShortfall, LossError, MeanVariance, Sharpe
from ewp_scs.moments import pair_moments
from ewp_scs.statistic import (
    CODE_LOSS_UNDEFINED,
    CODE_OK,
    CODE_TAU_FLOOR,
    screen_statistic,
    screen_statistics,
    z_closed_mv,
    z_closed_sharpe,
)

from oracles import z_value


def correlated_pair(rng, T):
    rho = rng.uniform(-0.5, 0.95)
    a = rng.normal(size=T)
    b = rho * a + math.sqrt(1 - rho * rho) * rng.normal(size=T)
    return (rng.uniform(-0.01, 0.02) + rng.uniform(0.01, 0.04) * a,
            rng.uniform(-0.01, 0.02) + rng.uniform(0.01, 0.04) * b)


def test_closed_forms_match_generic_gaussian_statistic():
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        ys, yr = correlated_pair(rng, int(rng.integers(10, 60)))
        pm = pair_moments(ys, yr)
        gamma = float(rng.uniform(0.1, 3.0))
        generic_mv = screen_statistic(MeanVariance(gamma=gamma), pm, "gaussian").z
        assert z_closed_mv(gamma, pm) == pytest.approx(generic_mv, rel=1e-9, abs=1e-10)
        generic_sharpe = screen_statistic(Sharpe(), pm, "gaussian").z
        assert z_closed_sharpe(pm) == pytest.approx(generic_sharpe, rel=1e-9, abs=1e-10)


@pytest.mark.parametrize("spec, name, params", [
    (MeanVariance(gamma=0.5), "mv", {"gamma": 0.5}),
    (Sharpe(), "sharpe", {}),
    (ExpectedShortfall(level=0.1), "es", {"level": 0.1}),
])
@pytest.mark.parametrize("mode", ["iid", "gaussian"])
def test_generic_statistic_matches_naive(spec, name, params, mode):
    rng = np.random.default_rng(5)
    for _ in range(20):
        ys, yr = correlated_pair(rng, 40)
        stat = screen_statistic(spec, pair_moments(ys, yr), mode)
        expected, _ = z_value(name, params, list(ys), list(yr), mode)
        assert stat.z == pytest.approx(expected, rel=1e-9, abs=1e-10)
        assert stat.code == CODE_OK and not stat.degenerate


def test_orientation_worse_candidate_is_positive():
    rng = np.random.default_rng(1)
    base = rng.normal(size=200) * 0.01
    good = base + 0.01
    bad = base - 0.01 + rng.normal(size=200) * 0.001
    stat = screen_statistic(MeanVariance(gamma=1.0), pair_moments(bad, good))
    assert stat.delta_hat > 0
    assert stat.z > 0


def test_identical_series_floor_to_zero():
    y = np.random.default_rng(0).normal(size=30)
    stat = screen_statistic(Sharpe(), pair_moments(y, y))
    assert stat.z == 0.0
    assert stat.degenerate
    assert stat.code == CODE_TAU_FLOOR


def test_floor_with_positive_delta_gives_inf():
    y = np.random.default_rng(0).normal(size=30)
    # same fluctuations, lower mean: no sampling noise in the differential
    stat = screen_statistic(MeanVariance(gamma=1.0), pair_moments(y - 1.0, y))
    assert stat.z == math.inf
    assert stat.code == CODE_TAU_FLOOR


def test_undefined_loss_is_excluded():
    y = np.random.default_rng(0).normal(size=30)
    stat = screen_statistic(Sharpe(), pair_moments(np.full(30, 0.01), y))
    assert stat.z == math.inf
    assert stat.degenerate
    assert stat.code == CODE_LOSS_UNDEFINED


def test_block_statistics_match_single_pairs():
    rng = np.random.default_rng(9)
    block = rng.normal(size=(6, 50))
    ref = rng.normal(size=50)
    stats = screen_statistics(ExpectedShortfall(), pair_moments(block, ref), "iid")
    assert stats.z.shape == (6,)
    for k in range(6):
        single = screen_statistic(ExpectedShortfall(), pair_moments(block[k], ref), "iid")
        assert stats.z[k] == pytest.approx(single.z)


def test_screen_statistic_rejects_blocks():
    rng = np.random.default_rng(9)
    with pytest.raises(LossError):
        screen_statistic(Sharpe(), pair_moments(rng.normal(size=(2, 10)), rng.normal(size=10)))


def test_z_is_invariant_to_loss_scaling():
    rng = np.random.default_rng(4)
    ys, yr = correlated_pair(rng, 80)
    pm = pair_moments(ys, yr)
    a = screen_statistic(MeanVariance(gamma=0.5), pm).z
    b = screen_statistic(MeanVariance(gamma=1.0, scale=2.0), pm).z
    assert a == pytest.approx(b, rel=1e-12)


def test_closed_sharpe_needs_positive_variance():
    y = np.random.default_rng(0).normal(size=10)
    with pytest.raises(LossError):
        z_closed_sharpe(pair_moments(np.zeros(10), y))
