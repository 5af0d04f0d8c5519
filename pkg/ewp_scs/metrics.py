# ============================================================================
# EWP-SCS - POST-SELECTION METRICS
# ============================================================================
"""
Diagnostics computed from a finished ScsResult:

    rmi                   1 - ln|SCS| / ln|S|
    loss_spread           L0, largest included loss, and their gap
    lower_boundary        included masks with no included strict subset
    inclusion_importance  share of included masks holding each asset
    co_inclusion          Jaccard co-occurrence of asset pairs
    cii_graph_export      thresholded co-inclusion edges (CSV / DOT)
    ii_profile            inclusion importance over a grid of alphas
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import graphviz
import numpy as np
import pandas as pd

from .errors import InputError
from .losses import LossSpec
from .normal import normal_quantile
from .panel import ReturnPanel
from .screening import ScreenConfig, ScsResult, build_scs
from .selection import SelectionMask, bits_matrix

logger = logging.getLogger(__name__)

DOT_HEADER = "co-inclusion graph: edge penwidth = 1 + 9 * CII"


class MetricsError(InputError):
    """Raised on invalid metric arguments."""
    pass


@dataclass(frozen=True, eq=False)
class ScsMetrics:
    alpha: float
    scs_size: int
    universe_size: int
    relative_size: float
    rmi: float
    loss_min: float
    loss_max: float
    spread: float
    lower_boundary: List[SelectionMask]
    inclusion: np.ndarray
    co_inclusion: np.ndarray


@dataclass(frozen=True)
class CiiEdge:
    i: int
    j: int
    weight: float


def rmi(scs_size: int, universe_size: int) -> float:
    """
    Relative Multiplicity Index, natural logarithms.

    Raises:
        MetricsError: If universe_size < 2 or scs_size is outside [1, universe_size]
    """
    if universe_size < 2:
        raise MetricsError(f"RMI needs a universe of at least 2 selections, got {universe_size}")
    if not 1 <= scs_size <= universe_size:
        raise MetricsError(f"SCS size {scs_size} outside [1, {universe_size}]")
    return 1.0 - math.log(scs_size) / math.log(universe_size)


def loss_spread(scs: ScsResult) -> Tuple[float, float, float]:
    """(L0, max included loss, spread)."""
    included = scs.losses[scs.included]
    if len(included) == 0:
        raise MetricsError("Empty SCS")
    loss_max = float(included.max())
    return scs.reference_loss, loss_max, loss_max - scs.reference_loss


def lower_boundary(scs: ScsResult) -> List[SelectionMask]:
    """
    Included masks that contain no other included mask.

    Masks are bucketed by popcount; each bucket is tested against the
    boundary found so far, all of which have strictly fewer assets.
    """
    bits = scs.included_bits().astype(np.int64)
    counts = np.array([int(b).bit_count() for b in bits], dtype=np.int64)
    boundary = np.empty(0, dtype=np.int64)
    for w in np.unique(counts):
        bucket = bits[counts == w]
        if len(boundary):
            covered = ((bucket[:, None] & boundary[None, :]) == boundary[None, :]).any(axis=1)
            bucket = bucket[~covered]
        boundary = np.concatenate([boundary, bucket])
    return [SelectionMask(int(b), scs.n_assets) for b in np.sort(boundary)]


def inclusion_importance(scs: ScsResult) -> np.ndarray:
    """II(j): fraction of included masks holding asset j."""
    members = bits_matrix(scs.included_bits(), scs.n_assets)
    if len(members) == 0:
        raise MetricsError("Empty SCS")
    return members.mean(axis=0)


def co_inclusion(scs: ScsResult) -> np.ndarray:
    """CII(i, j) = c_ij / (c_i + c_j - c_ij); 1 where the denominator is 0."""
    members = bits_matrix(scs.included_bits(), scs.n_assets)
    counts = members.sum(axis=0)
    joint = members.T @ members
    union = counts[:, None] + counts[None, :] - joint
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(union > 0, joint / union, 1.0)


def cii_graph_export(scs: ScsResult, threshold: float = 0.01,
                     cii: Optional[np.ndarray] = None) -> List[CiiEdge]:
    """
    Undirected edges (i < j) with CII above `threshold`.

    Raises:
        MetricsError: If threshold is outside [0, 1)
    """
    if not 0.0 <= threshold < 1.0:
        raise MetricsError(f"CII threshold must lie in [0, 1), got {threshold}")
    matrix = co_inclusion(scs) if cii is None else cii
    rows, cols = np.nonzero(np.triu(matrix > threshold, k=1))
    return [CiiEdge(int(i), int(j), float(matrix[i, j])) for i, j in zip(rows, cols)]


def to_dot(edges: Sequence[CiiEdge], labels: Sequence[str]) -> str:
    """DOT source for the co-inclusion graph; isolated assets are omitted."""
    graph = graphviz.Graph("cii", comment=DOT_HEADER)
    graph.attr("node", shape="plaintext")
    nodes = sorted({e.i for e in edges} | {e.j for e in edges})
    for k in nodes:
        graph.node(str(labels[k]))
    for e in edges:
        graph.edge(str(labels[e.i]), str(labels[e.j]),
                   penwidth=f"{1.0 + 9.0 * e.weight:.4f}", weight=f"{e.weight:.6f}")
    return graph.source


def compute_metrics(scs: ScsResult) -> ScsMetrics:
    """All post-selection metrics at the result's alpha."""
    size = scs.included_count
    loss_min, loss_max, spread = loss_spread(scs)
    # a one-asset universe has a single selection
    index = rmi(size, scs.universe_size) if scs.universe_size >= 2 else 1.0
    return ScsMetrics(
        alpha=scs.alpha,
        scs_size=size,
        universe_size=scs.universe_size,
        relative_size=size / scs.universe_size,
        rmi=index,
        loss_min=loss_min,
        loss_max=loss_max,
        spread=spread,
        lower_boundary=lower_boundary(scs),
        inclusion=inclusion_importance(scs),
        co_inclusion=co_inclusion(scs),
    )


def ii_profile_from_result(scs: ScsResult, alpha_grid: Sequence[float]) -> pd.DataFrame:
    """
    Inclusion importance for every alpha in the grid from one set of z values.

    Masks are sorted by z once; the SCS at level alpha is the prefix with
    z <= q_{1-alpha} (the reference always leads the order).

    Returns:
        DataFrame indexed by alpha, one column per asset label
    """
    alphas = _check_grid(alpha_grid)
    screened = scs.screened_alpha if scs.screened_alpha is not None else scs.alpha
    if scs.records_truncated and min(alphas) < screened:
        raise MetricsError(f"Records truncated at alpha={screened}; cannot profile down to {min(alphas)}")

    z = np.where(scs.masks == scs.reference.bits, -np.inf, scs.z)
    order = np.argsort(z, kind="stable")
    sorted_z = z[order]
    running = np.cumsum(bits_matrix(scs.masks[order], scs.n_assets), axis=0)

    rows = []
    for alpha in alphas:
        k = int(np.searchsorted(sorted_z, normal_quantile(1.0 - alpha), side="right"))
        rows.append(running[k - 1] / k)
    frame = pd.DataFrame(rows, index=pd.Index(alphas, name="alpha"), columns=list(scs.asset_labels))
    return frame


def ii_profile(
    panel: ReturnPanel,
    spec: LossSpec,
    config: ScreenConfig,
    alpha_grid: Sequence[float],
) -> pd.DataFrame:
    """Screen once at the smallest alpha and profile II over the grid."""
    alphas = _check_grid(alpha_grid)
    scs = build_scs(panel, spec, replace(config, alpha=min(alphas)))
    return ii_profile_from_result(scs, alphas)


def _check_grid(alpha_grid: Sequence[float]) -> List[float]:
    alphas = [float(a) for a in alpha_grid]
    if not alphas:
        raise MetricsError("Empty alpha grid")
    bad = [a for a in alphas if not 0.0 < a < 1.0]
    if bad:
        raise MetricsError(f"alpha values outside (0, 1): {bad}")
    return alphas
