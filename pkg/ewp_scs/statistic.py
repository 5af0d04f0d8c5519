# ============================================================================
# EWP-SCS - STUDENTIZED LOSS DIFFERENTIAL
# ============================================================================
"""
Delta-method Wald statistic for the loss gap between two selections:

    delta = L(mu_s, var_s) - L(mu_s', var_s')
    tau^2 = grad' V grad
    z     = delta / sqrt(tau^2 / T)

Orientation: candidates worse than the reference give positive z.
Degenerate rule: tau^2 below the floor gives z = +inf if delta exceeds
the delta floor, else z = 0.
"""

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .losses import LossError, LossSpec, MeanVariance, differential_gradient
from .moments import PairMoments, vhat

Real = Union[float, np.ndarray]

TAU2_FLOOR = 1e-12
DELTA_FLOOR = 1e-12

CODE_OK = ""
CODE_TAU_FLOOR = "tau_floor"
CODE_LOSS_UNDEFINED = "loss_undefined"


@dataclass(frozen=True)
class ScreenStatistic:
    """Fields are floats for one pair or arrays for a block of pairs."""
    delta_hat: Real
    tau2_hat: Real
    z: Real
    degenerate: Union[bool, np.ndarray]
    code: Union[str, np.ndarray] = CODE_OK


def screen_statistics(
    spec: LossSpec,
    pm: PairMoments,
    cov_mode: str = "gaussian",
    tau2_floor: float = TAU2_FLOOR,
    delta_floor: float = DELTA_FLOOR,
) -> ScreenStatistic:
    """
    Vectorized statistic over a block of candidates paired with one reference.

    Pairs where the loss is undefined (zero variance under Sharpe or ES)
    come back degenerate with z = +inf and code "loss_undefined".
    """
    mu_s, var_s = pm.m_s.mean, pm.m_s.variance
    mu_r, var_r = pm.m_s2.mean, pm.m_s2.variance

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        delta = np.asarray(spec.value(mu_s, var_s) - spec.value(mu_r, var_r), dtype=np.float64)
        grad = differential_gradient(spec, mu_s, var_s, mu_r, var_r)
        tau2 = np.asarray(vhat(pm, cov_mode).quadratic_form(grad), dtype=np.float64)
        defined = np.broadcast_to(spec.defined(var_s) & spec.defined(var_r), delta.shape)
        floored = defined & ~(tau2 >= tau2_floor)
        z = delta / np.sqrt(tau2 / pm.T)

    z = np.where(floored, np.where(delta > delta_floor, np.inf, 0.0), z)
    z = np.where(defined, z, np.inf)
    code = np.where(~defined, CODE_LOSS_UNDEFINED, np.where(floored, CODE_TAU_FLOOR, CODE_OK))
    degenerate = floored | ~defined

    if delta.ndim == 0:
        return ScreenStatistic(
            delta_hat=float(delta),
            tau2_hat=float(tau2),
            z=float(z),
            degenerate=bool(degenerate),
            code=str(code),
        )
    return ScreenStatistic(delta_hat=delta, tau2_hat=tau2, z=z, degenerate=degenerate, code=code)


def screen_statistic(
    spec: LossSpec,
    pm: PairMoments,
    cov_mode: str = "gaussian",
    tau2_floor: float = TAU2_FLOOR,
    delta_floor: float = DELTA_FLOOR,
) -> ScreenStatistic:
    """
    Z(s; s') for one pair of portfolio series.

    Args:
        spec: Loss function
        pm: Moments of (Y_s, Y_s'), s' in the reference role
        cov_mode: "iid" or "gaussian"

    Returns:
        ScreenStatistic with float fields
    """
    if np.ndim(pm.m_s.mean) != 0:
        raise LossError("screen_statistic takes a single pair; use screen_statistics for blocks")
    return screen_statistics(spec, pm, cov_mode, tau2_floor, delta_floor)


def _floor_rule(numerator: float, denominator_sq: float, t: int,
                tau2_floor: float, delta_floor: float) -> float:
    if not denominator_sq >= tau2_floor:
        return math.inf if numerator > delta_floor else 0.0
    return math.sqrt(t) * numerator / math.sqrt(denominator_sq)


def z_closed_mv(
    gamma: float,
    pm: PairMoments,
    tau2_floor: float = TAU2_FLOOR,
    delta_floor: float = DELTA_FLOOR,
) -> float:
    """
    Closed-form Gaussian z for L = var - gamma * mu, s' as reference.

    Raises:
        LossError: If gamma is not positive
    """
    MeanVariance(gamma=gamma)
    var_s, var_r, cov = pm.m_s.variance, pm.m_s2.variance, pm.cov
    numerator = gamma * (pm.m_s2.mean - pm.m_s.mean) + var_s - var_r
    denominator_sq = (
        gamma * gamma * (var_s - 2.0 * cov + var_r)
        + 2.0 * (var_s * var_s - 2.0 * cov * cov + var_r * var_r)
    )
    return _floor_rule(numerator, denominator_sq, pm.T, tau2_floor, delta_floor)


def z_closed_sharpe(
    pm: PairMoments,
    tau2_floor: float = TAU2_FLOOR,
    delta_floor: float = DELTA_FLOOR,
) -> float:
    """
    Closed-form Gaussian z for the Sharpe loss, s' as reference.

    The textbook form is sqrt(T)(r_s - r_s') / sqrt(2(1 - rho)
    + (r_s^2 + r_s'^2)/2 - rho^2 r_s r_s'); it is negated here so the
    result carries the same orientation as screen_statistic under -mu/sigma.

    Raises:
        LossError: If either sample variance is not positive
    """
    var_s, var_r = pm.m_s.variance, pm.m_s2.variance
    if not (var_s > 0 and var_r > 0):
        raise LossError(f"Sharpe closed form needs positive variances, got {var_s}, {var_r}")
    sd_s, sd_r = math.sqrt(var_s), math.sqrt(var_r)
    r_s, r_r = pm.m_s.mean / sd_s, pm.m_s2.mean / sd_r
    rho = pm.cov / (sd_s * sd_r)
    denominator_sq = 2.0 * (1.0 - rho) + 0.5 * (r_s * r_s + r_r * r_r) - rho * rho * r_s * r_r
    return _floor_rule(r_r - r_s, denominator_sq, pm.T, tau2_floor, delta_floor)
