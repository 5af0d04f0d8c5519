# ============================================================================
# EWP-SCS - MEAN-VARIANCE LOSS
# ============================================================================
"""
Mean-variance loss  L = scale * sigma^2 - gamma * mu.

`scale` lets both common parameterizations be written down:
"sigma^2 - 0.5 mu" is mv:gamma=0.5 and "-mu + 0.5 sigma^2" is
mv:gamma=1,scale=0.5. Z is invariant to positive rescaling of the loss,
so the two screen identically.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .base import LossError, LossSpec, Real
from .registry import register


@register("mv")
@dataclass(frozen=True)
class MeanVariance(LossSpec):
    gamma: float = 0.5
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise LossError(f"gamma must be > 0, got {self.gamma}")
        if not self.scale > 0:
            raise LossError(f"scale must be > 0, got {self.scale}")

    def value(self, mu: Real, var: Real) -> Real:
        return self.scale * var - self.gamma * mu

    def gradient(self, mu: Real, var: Real) -> Tuple[Real, Real]:
        shape = np.broadcast(mu, var).shape
        if not shape:
            return -self.gamma, self.scale
        return np.full(shape, -self.gamma), np.full(shape, self.scale)

    def to_string(self) -> str:
        if self.scale == 1.0:
            return f"mv:gamma={self.gamma:g}"
        return f"mv:gamma={self.gamma:g},scale={self.scale:g}"
