# ============================================================================
# EWP-SCS - EXPECTED SHORTFALL LOSS
# ============================================================================
"""
Gaussian expected shortfall  L = -mu + sigma * phi(z_level) / level,
with z_level the standard normal level-quantile.
"""

from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from ..normal import normal_pdf, normal_quantile
from .base import LossError, LossSpec, Real
from .registry import register


@register("es")
@dataclass(frozen=True)
class ExpectedShortfall(LossSpec):
    level: float = 0.1
    multiplier: float = field(init=False, repr=False, compare=False)

    requires_positive_variance = True

    def __post_init__(self) -> None:
        if not 0.0 < self.level < 1.0:
            raise LossError(f"ES level must lie in (0, 1), got {self.level}")
        object.__setattr__(
            self, "multiplier", normal_pdf(normal_quantile(self.level)) / self.level
        )

    def value(self, mu: Real, var: Real) -> Real:
        with np.errstate(invalid="ignore"):
            sigma = np.sqrt(np.where(np.asarray(var) > 0, var, np.nan))
            return _scalar(-np.asarray(mu) + sigma * self.multiplier)

    def gradient(self, mu: Real, var: Real) -> Tuple[Real, Real]:
        with np.errstate(divide="ignore", invalid="ignore"):
            sigma = np.sqrt(np.where(np.asarray(var) > 0, var, np.nan))
            d_var = self.multiplier / (2.0 * sigma)
        d_mu, d_var = np.broadcast_arrays(np.full(np.shape(d_var), -1.0), d_var)
        return _scalar(d_mu), _scalar(d_var)

    def to_string(self) -> str:
        return f"es:level={self.level:g}"


def _scalar(value: np.ndarray) -> Real:
    return float(value) if np.ndim(value) == 0 else value
