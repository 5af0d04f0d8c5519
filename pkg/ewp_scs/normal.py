# ============================================================================
# EWP-SCS - STANDARD NORMAL HELPERS
# ============================================================================
"""Standard normal cdf, pdf and quantile."""

import math
from typing import Union

import numpy as np
from scipy.special import erfc, ndtri
from scipy.stats import norm

from .errors import InputError

Real = Union[float, np.ndarray]


def normal_quantile(p: Real) -> Real:
    """
    Inverse standard normal cdf.

    Raises:
        InputError: If p is outside (0, 1)
    """
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~(arr > 0.0) | ~(arr < 1.0)):
        raise InputError(f"Quantile level must lie in (0, 1), got {p}")
    value = ndtri(arr)
    return float(value) if value.ndim == 0 else value


def normal_cdf(x: Real) -> Real:
    """Standard normal cdf via the complementary error function."""
    value = 0.5 * erfc(-np.asarray(x, dtype=np.float64) / math.sqrt(2.0))
    return float(value) if np.ndim(value) == 0 else value


def normal_pdf(x: Real) -> Real:
    value = norm.pdf(x)
    return float(value) if np.ndim(value) == 0 else value
