# ============================================================================
# EWP-SCS - POPULATION QUANTITIES
# ============================================================================
"""
Exact population moments, optimal selections, standardized differentials
and the asymptotic expected SCS size of a PopulationModel.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import numpy as np

from ..losses import LossSpec, differential_gradient
from ..moments import PairMoments, PortfolioMoments, vhat_gaussian
from ..normal import normal_cdf, normal_quantile
from ..selection import SelectionMask, bits_matrix, check_universe
from ..statistic import DELTA_FLOOR, TAU2_FLOOR
from .generators import PopulationModel, SimulationError

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12
CHUNK = 1 << 16


@dataclass(frozen=True)
class TheoryResult:
    expected: float
    lower_bound: float
    upper_bound: float
    gamma_min: float
    optimal_count: int


def _weights(bits: np.ndarray, n: int) -> np.ndarray:
    members = bits_matrix(bits, n)
    return members / members.sum(axis=1, keepdims=True)


def _all_moments(model: PopulationModel) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """(bits, mu, var) for every nonzero mask, in chunks."""
    end = 1 << model.n
    for start in range(1, end, CHUNK):
        bits = np.arange(start, min(start + CHUNK, end), dtype=np.int64)
        w = _weights(bits, model.n)
        yield bits, w @ model.mean, np.einsum("ki,ij,kj->k", w, model.covariance, w)


def population_moments(model: PopulationModel, mask: SelectionMask) -> Tuple[float, float]:
    """(w' eta, w' Sigma w) for the equal-weight vector of `mask`."""
    if mask.n_assets != model.n:
        raise SimulationError(f"Mask over N={mask.n_assets} for a model with N={model.n}")
    w = _weights(np.array([mask.bits]), model.n)[0]
    return float(w @ model.mean), float(w @ model.covariance @ w)


def _population_losses(model: PopulationModel, spec: LossSpec) -> Tuple[np.ndarray, np.ndarray]:
    bits, losses = [], []
    for chunk_bits, mu, var in _all_moments(model):
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(spec.value(mu, var), dtype=np.float64)
        bits.append(chunk_bits)
        losses.append(np.where(np.isnan(values), np.inf, values))
    return np.concatenate(bits), np.concatenate(losses)


def true_optimum(
    model: PopulationModel, spec: LossSpec, tolerance: float = TIE_TOLERANCE
) -> Tuple[List[SelectionMask], float]:
    """
    Exhaustive population argmin.

    Returns:
        (every mask within `tolerance` of the minimum, minimum loss)
    """
    check_universe(model.n)
    bits, losses = _population_losses(model, spec)
    best = float(losses.min())
    optimal = bits[losses <= best + tolerance]
    return [SelectionMask(int(b), model.n) for b in optimal], best


def _population_pair(model: PopulationModel, w_s: np.ndarray, w_r: np.ndarray) -> PairMoments:
    mu_s, mu_r = w_s @ model.mean, w_r @ model.mean
    var_s = np.einsum("ki,ij,kj->k", w_s, model.covariance, w_s)
    var_r = float(w_r @ model.covariance @ w_r)
    cov = w_s @ model.covariance @ w_r
    zero = np.zeros_like(var_s)
    return PairMoments(
        m_s=PortfolioMoments(mu_s, var_s),
        m_s2=PortfolioMoments(float(mu_r), var_r),
        cov=cov,
        skew_s=zero,
        skew_s2=0.0,
        coskew_s_s2=zero,
        coskew_s2_s=zero,
        kurt_s=3.0 * var_s * var_s,
        kurt_s2=3.0 * var_r * var_r,
        cokurt=var_s * var_r + 2.0 * cov * cov,
        T=1,
    )


def _gammas(model: PopulationModel, spec: LossSpec, bits: np.ndarray,
            reference: SelectionMask) -> np.ndarray:
    w_s = _weights(bits, model.n)
    w_r = _weights(np.array([reference.bits]), model.n)[0]
    pm = _population_pair(model, w_s, w_r)
    with np.errstate(divide="ignore", invalid="ignore"):
        delta = np.asarray(spec.value(pm.m_s.mean, pm.m_s.variance) - spec.value(pm.m_s2.mean, pm.m_s2.variance))
        grad = differential_gradient(spec, pm.m_s.mean, pm.m_s.variance, pm.m_s2.mean, pm.m_s2.variance)
        tau2 = np.asarray(vhat_gaussian(pm).quadratic_form(grad))
        gamma = delta / np.sqrt(tau2)
    floored = ~(tau2 >= TAU2_FLOOR)
    gamma = np.where(floored, np.where(delta > DELTA_FLOOR, np.inf, 0.0), gamma)
    return np.where(np.isnan(delta), np.inf, gamma)


def population_gamma(
    model: PopulationModel, spec: LossSpec, mask: SelectionMask, reference: SelectionMask
) -> float:
    """
    Standardized differential delta(s) / tau(s) against an optimal reference,
    with the exact Gaussian covariance of the moment estimators.
    """
    if mask.n_assets != model.n or reference.n_assets != model.n:
        raise SimulationError(f"Masks must be over N={model.n}")
    if mask == reference:
        return 0.0
    return float(_gammas(model, spec, np.array([mask.bits]), reference)[0])


def theoretical_expected_size(
    model: PopulationModel, spec: LossSpec, alpha: float, T: float
) -> TheoryResult:
    """
    Asymptotic expected SCS size and its bounds:

        expected = |S0| (1 - alpha) + sum_{s not in S0} Phi(q - sqrt(T) gamma(s))
        lower    = |S0| (1 - alpha)
        upper    = lower + (2^N - |S0| - 1) Phi(q - sqrt(T) gamma_min)
    """
    if T < 0:
        raise SimulationError(f"T must be >= 0, got {T}")
    q = normal_quantile(1.0 - alpha)
    optimal, _ = true_optimum(model, spec)
    reference = optimal[0]
    optimal_bits = np.array([m.bits for m in optimal], dtype=np.int64)

    root_t = math.sqrt(T)
    tail = 0.0
    gamma_min = math.inf
    for bits, _, _ in _all_moments(model):
        bits = bits[~np.isin(bits, optimal_bits)]
        if len(bits) == 0:
            continue
        gammas = _gammas(model, spec, bits, reference)
        gamma_min = min(gamma_min, float(gammas.min()))
        with np.errstate(invalid="ignore"):
            shifted = np.where(np.isinf(gammas), -np.inf, q - root_t * gammas) if T > 0 else np.full(len(gammas), q)
        tail += float(np.sum(normal_cdf(shifted)))

    lower = len(optimal) * (1.0 - alpha)
    outside = (1 << model.n) - len(optimal) - 1
    if outside == 0:
        upper = lower
    else:
        worst = q if T == 0 else (-math.inf if math.isinf(gamma_min) else q - root_t * gamma_min)
        upper = lower + outside * normal_cdf(worst)
    logger.debug(f"Theory: |S0|={len(optimal)}, gamma_min={gamma_min:.4g}, expected={lower + tail:.4g}")
    return TheoryResult(
        expected=lower + tail,
        lower_bound=lower,
        upper_bound=upper,
        gamma_min=gamma_min,
        optimal_count=len(optimal),
    )
