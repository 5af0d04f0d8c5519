# ============================================================================
# EWP-SCS - PORTFOLIO MOMENTS
# ============================================================================
"""
Portfolio return series, sample moments and the asymptotic covariance
of (mean_s, var_s, mean_s', var_s').

Divisor convention (affects finite-sample Z values):
    - variance and covariance use T-1
    - third and fourth central moments use the plug-in divisor T
    - each series is centred on its own full-sample mean

Every function reduces over the last axis, so a (B, T) block of series
paired with one (T,) reference series yields B statistics at once.
Near-singular covariance matrices are returned as computed; the
quadratic form is floored downstream.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import InputError, InvariantError
from .panel import ReturnPanel
from .selection import SelectionMask, weight

Real = Union[float, np.ndarray]


class MomentsError(InputError):
    """Raised when moments are requested on unusable series."""
    pass


@dataclass(frozen=True)
class PortfolioMoments:
    """Sample mean and variance (T-1 divisor) of a portfolio series."""
    mean: Real
    variance: Real


@dataclass(frozen=True)
class PairMoments:
    """All moments up to order four needed for V(s; s')."""
    m_s: PortfolioMoments
    m_s2: PortfolioMoments
    cov: Real
    skew_s: Real
    skew_s2: Real
    coskew_s_s2: Real
    coskew_s2_s: Real
    kurt_s: Real
    kurt_s2: Real
    cokurt: Real
    T: int


@dataclass(frozen=True)
class CovMatrix4:
    """
    Covariance of (mean_s, var_s, mean_s', var_s'), shape (..., 4, 4).

    Blocks: entries[..., :2, :2] = V_ss, [..., :2, 2:] = V_ss',
    [..., 2:, :2] = V_s's, [..., 2:, 2:] = V_s's'.
    """
    entries: np.ndarray

    def quadratic_form(self, gradient: np.ndarray) -> Real:
        """g' V g for a gradient of shape (..., 4)."""
        value = np.einsum("...i,...ij,...j->...", gradient, self.entries, gradient)
        return float(value) if np.ndim(value) == 0 else value


def portfolio_series(panel: ReturnPanel, mask: SelectionMask) -> np.ndarray:
    """Equally weighted return series of the assets in `mask`."""
    if mask.n_assets != panel.N:
        raise MomentsError(f"Mask over N={mask.n_assets} for a panel with N={panel.N}")
    return panel.returns[:, mask.support()].sum(axis=1) / weight(mask)


def running_series_update(
    current: np.ndarray,
    panel: ReturnPanel,
    flipped_asset: int,
    added: bool,
    old_weight: int,
) -> np.ndarray:
    """
    Apply one Gray step to an unnormalized running sum.

    Args:
        current: Sum of the previous mask's columns (not divided by weight)
        panel: Source panel
        flipped_asset: Column entering or leaving
        added: True if the column enters
        old_weight: Number of assets in the previous mask

    Returns:
        New running sum; divide by the new weight for Y_s
    """
    column = panel.columns[flipped_asset]
    if added:
        return current + column
    if old_weight <= 1:
        raise InvariantError("Gray step would empty the selection")
    return current - column


def _centered(series: np.ndarray) -> Tuple[Real, Real, np.ndarray]:
    t = series.shape[-1]
    if t < 2:
        raise MomentsError(f"Need at least 2 observations, got T={t}")
    mean = series.sum(axis=-1) / t
    dev = series - np.expand_dims(mean, -1)
    variance = (dev * dev).sum(axis=-1) / (t - 1)
    return mean, variance, dev


def sample_moments(series: np.ndarray) -> PortfolioMoments:
    """Sample mean (1/T) and variance (1/(T-1)) over the last axis."""
    mean, variance, _ = _centered(np.asarray(series, dtype=np.float64))
    return PortfolioMoments(mean=_scalar(mean), variance=_scalar(variance))


def pair_moments(series_s: np.ndarray, series_s2: np.ndarray) -> PairMoments:
    """
    Marginal and joint central moments of two portfolio series.

    `series_s` may be a (B, T) block; `series_s2` a single (T,) series.

    Raises:
        MomentsError: On length mismatch or T < 2
    """
    series_s = np.asarray(series_s, dtype=np.float64)
    series_s2 = np.asarray(series_s2, dtype=np.float64)
    if series_s.shape[-1] != series_s2.shape[-1]:
        raise MomentsError(
            f"Series lengths differ: {series_s.shape[-1]} vs {series_s2.shape[-1]}"
        )
    t = series_s.shape[-1]
    mean_s, var_s, d_s = _centered(series_s)
    mean_r, var_r, d_r = _centered(series_s2)

    sq_s = d_s * d_s
    sq_r = d_r * d_r
    return PairMoments(
        m_s=PortfolioMoments(_scalar(mean_s), _scalar(var_s)),
        m_s2=PortfolioMoments(_scalar(mean_r), _scalar(var_r)),
        cov=_scalar((d_s * d_r).sum(axis=-1) / (t - 1)),
        skew_s=_scalar((sq_s * d_s).sum(axis=-1) / t),
        skew_s2=_scalar((sq_r * d_r).sum(axis=-1) / t),
        coskew_s_s2=_scalar((sq_r * d_s).sum(axis=-1) / t),
        coskew_s2_s=_scalar((sq_s * d_r).sum(axis=-1) / t),
        kurt_s=_scalar((sq_s * sq_s).sum(axis=-1) / t),
        kurt_s2=_scalar((sq_r * sq_r).sum(axis=-1) / t),
        cokurt=_scalar((sq_s * sq_r).sum(axis=-1) / t),
        T=t,
    )


def _assemble(
    var_s: Real, var_r: Real, cov: Real,
    m3_s: Real, m3_r: Real, m3_sr: Real, m3_rs: Real,
    vv_s: Real, vv_r: Real, vv_sr: Real,
) -> CovMatrix4:
    shape = np.broadcast(var_s, var_r, cov, m3_s, m3_r, m3_sr, m3_rs, vv_s, vv_r, vv_sr).shape
    b = lambda x: np.broadcast_to(np.asarray(x, dtype=np.float64), shape)
    rows = [
        [b(var_s), b(m3_s), b(cov), b(m3_sr)],
        [b(m3_s), b(vv_s), b(m3_rs), b(vv_sr)],
        [b(cov), b(m3_rs), b(var_r), b(m3_r)],
        [b(m3_sr), b(vv_sr), b(m3_r), b(vv_r)],
    ]
    entries = np.stack([np.stack(row, axis=-1) for row in rows], axis=-2)
    return CovMatrix4(entries=entries)


def vhat_iid(pm: PairMoments) -> CovMatrix4:
    """Plug-in V(s; s') for i.i.d. sampling, third and fourth moments included."""
    var_s, var_r = pm.m_s.variance, pm.m_s2.variance
    return _assemble(
        var_s, var_r, pm.cov,
        pm.skew_s, pm.skew_s2, pm.coskew_s_s2, pm.coskew_s2_s,
        pm.kurt_s - var_s * var_s,
        pm.kurt_s2 - var_r * var_r,
        pm.cokurt - pm.cov * pm.cov,
    )


def vhat_gaussian(pm: PairMoments) -> CovMatrix4:
    """
    V(s; s') under normal returns.

    Third moments vanish; Var(var_s) = 2 var_s^2 and
    Cov(var_s, var_s') = 2 cov^2 (from E[X^2 Y^2] = var_x var_y + 2 cov^2).
    """
    var_s, var_r, cov = pm.m_s.variance, pm.m_s2.variance, pm.cov
    zero = np.zeros(np.broadcast(var_s, var_r, cov).shape)
    return _assemble(
        var_s, var_r, cov,
        zero, zero, zero, zero,
        2.0 * var_s * var_s,
        2.0 * var_r * var_r,
        2.0 * cov * cov,
    )


def vhat(pm: PairMoments, cov_mode: str) -> CovMatrix4:
    if cov_mode == "iid":
        return vhat_iid(pm)
    if cov_mode == "gaussian":
        return vhat_gaussian(pm)
    raise MomentsError(f"Unknown covariance mode: {cov_mode!r} (expected iid or gaussian)")


def _scalar(value: Real) -> Real:
    return float(value) if np.ndim(value) == 0 else value
