# ============================================================================
# EWP-SCS - SHARPE RATIO LOSS
# ============================================================================
"""Negative Sharpe ratio  L = -mu / sigma."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .base import LossSpec, Real
from .registry import register


@register("sharpe")
@dataclass(frozen=True)
class Sharpe(LossSpec):
    requires_positive_variance = True

    def value(self, mu: Real, var: Real) -> Real:
        with np.errstate(divide="ignore", invalid="ignore"):
            sigma = np.sqrt(np.where(np.asarray(var) > 0, var, np.nan))
            return _scalar(-np.asarray(mu) / sigma)

    def gradient(self, mu: Real, var: Real) -> Tuple[Real, Real]:
        with np.errstate(divide="ignore", invalid="ignore"):
            sigma = np.sqrt(np.where(np.asarray(var) > 0, var, np.nan))
            d_mu = -1.0 / sigma
            d_var = np.asarray(mu) / (2.0 * sigma ** 3)
        d_mu, d_var = np.broadcast_arrays(d_mu, d_var)
        return _scalar(d_mu), _scalar(d_var)

    def to_string(self) -> str:
        return "sharpe"


def _scalar(value: np.ndarray) -> Real:
    return float(value) if np.ndim(value) == 0 else value
