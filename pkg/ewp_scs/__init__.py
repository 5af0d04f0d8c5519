# ============================================================================
# EWP-SCS - Selection Confidence Sets for Equally Weighted Portfolios
# ============================================================================
"""
EWP-SCS

Screens every nonempty subset of an asset universe, held as an equally
weighted portfolio, against the subset with the smallest sample loss.
Subsets whose loss is not significantly worse form the Selection
Confidence Set (SCS).

Losses: mean-variance, negative Sharpe ratio, Gaussian expected shortfall.
"""

__version__ = "1.0.0"

from .errors import DegeneracyError, InputError, InvariantError, ScsError
from .losses import LossSpec, get_loss, list_losses, parse_loss_spec
from .panel import ReturnPanel, load_csv, log_returns
from .screening import ScreenConfig, ScsResult, build_scs, empirical_optimum, plausibility_check
from .selection import MaxAssetsFilter, SelectionMask
from .metrics import ScsMetrics, compute_metrics, ii_profile

__all__ = [
    "DegeneracyError",
    "InputError",
    "InvariantError",
    "LossSpec",
    "MaxAssetsFilter",
    "ReturnPanel",
    "ScreenConfig",
    "ScsError",
    "ScsMetrics",
    "ScsResult",
    "SelectionMask",
    "build_scs",
    "compute_metrics",
    "empirical_optimum",
    "get_loss",
    "ii_profile",
    "list_losses",
    "load_csv",
    "log_returns",
    "parse_loss_spec",
    "plausibility_check",
]
