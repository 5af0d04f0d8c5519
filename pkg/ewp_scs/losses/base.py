# ============================================================================
# EWP-SCS - LOSS BASE
# ============================================================================
"""
Abstract base class for losses L(mu, sigma^2).

Losses are frozen dataclasses so they pickle into worker processes and
hash into result tables. `value` and `gradient` broadcast over numpy
arrays; undefined points come back as NaN and are flagged by the caller.
"""

from abc import ABC, abstractmethod
from typing import Tuple, Union

import numpy as np

from ..errors import InputError

Real = Union[float, np.ndarray]


class LossError(InputError):
    """Raised on invalid loss parameters or evaluation outside the domain."""
    pass


class LossSpec(ABC):
    """Base class for all loss functions."""

    name: str = ""
    requires_positive_variance: bool = False

    @abstractmethod
    def value(self, mu: Real, var: Real) -> Real:
        """Loss at (mu, sigma^2)."""
        pass

    @abstractmethod
    def gradient(self, mu: Real, var: Real) -> Tuple[Real, Real]:
        """(dL/dmu, dL/dsigma^2) at (mu, sigma^2)."""
        pass

    @abstractmethod
    def to_string(self) -> str:
        """Round-trippable spec string, e.g. 'mv:gamma=0.5'."""
        pass

    def defined(self, var: Real) -> Union[bool, np.ndarray]:
        """Where the loss can be evaluated."""
        var = np.asarray(var)
        return var > 0.0 if self.requires_positive_variance else var >= 0.0

    def __str__(self) -> str:
        return self.to_string()


def _check_domain(spec: LossSpec, var: float) -> None:
    if not bool(spec.defined(var)):
        raise LossError(f"Loss {spec} undefined at variance {var}")


def loss_value(spec: LossSpec, mu: float, var: float) -> float:
    """
    Evaluate a loss at one (mu, sigma^2) point.

    Raises:
        LossError: If the variance is outside the loss domain
    """
    _check_domain(spec, var)
    return float(spec.value(mu, var))


def loss_gradient(spec: LossSpec, mu: float, var: float) -> Tuple[float, float]:
    """
    Gradient of a loss at one point.

    Raises:
        LossError: If the variance is outside the loss domain
    """
    _check_domain(spec, var)
    d_mu, d_var = spec.gradient(mu, var)
    return float(d_mu), float(d_var)


def differential_gradient(
    spec: LossSpec, mu_s: Real, var_s: Real, mu_r: Real, var_r: Real
) -> np.ndarray:
    """
    Gradient of L(mu_s, var_s) - L(mu_r, var_r), shape (..., 4).

    Ordered as (mu_s, var_s, mu_r, var_r).
    """
    d_mu_s, d_var_s = spec.gradient(mu_s, var_s)
    d_mu_r, d_var_r = spec.gradient(mu_r, var_r)
    shape = np.broadcast(mu_s, var_s, mu_r, var_r).shape
    parts = [d_mu_s, d_var_s, np.negative(d_mu_r), np.negative(d_var_r)]
    return np.stack([np.broadcast_to(np.asarray(p, dtype=np.float64), shape) for p in parts], axis=-1)
