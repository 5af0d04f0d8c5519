"""Loss functions L(mu, sigma^2) and their registry."""

from .base import (
    LossError,
    LossSpec,
    differential_gradient,
    loss_gradient,
    loss_value,
)
from .registry import get_loss, is_registered, list_losses, parse_loss_spec, register

# Import implementations to trigger registration
from .mean_variance import MeanVariance
from .sharpe import Sharpe
from .expected_shortfall import ExpectedShortfall

__all__ = [
    "LossError",
    "LossSpec",
    "MeanVariance",
    "Sharpe",
    "ExpectedShortfall",
    "differential_gradient",
    "get_loss",
    "is_registered",
    "list_losses",
    "loss_gradient",
    "loss_value",
    "parse_loss_spec",
    "register",
]
