# ============================================================================
# EWP-SCS - SELECTION CONFIDENCE SET SCREENING
# ============================================================================
"""
Empirical optimum and Selection Confidence Set.

Two passes over the Gray-code stream:

    1. find the empirical optimum s0 and cache its return series
    2. screen every mask against s0 with the one-sided Wald statistic

The counter range [1, 2^N) is cut into fixed blocks of `block_size`
indices. Each block seeds its running sum from scratch, so the series of
every mask (and therefore every record) is the same for any worker count.
Blocks run inline for one worker and on a process pool otherwise; results
are merged in block order and sorted by mask integer.
"""

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegeneracyError, InputError, InvariantError
from .losses import LossSpec
from .moments import pair_moments, portfolio_series, running_series_update, sample_moments
from .normal import normal_quantile
from .panel import ReturnPanel
from .selection import SelectionMask, gray_block
from .statistic import (
    CODE_LOSS_UNDEFINED,
    CODE_OK,
    DELTA_FLOOR,
    TAU2_FLOOR,
    screen_statistic,
    screen_statistics,
)

logger = logging.getLogger(__name__)

MaskFilter = Callable[[SelectionMask], bool]

DEFAULT_BLOCK_SIZE = 4096
DEFAULT_RECORD_CAP = 1 << 20
QUANTILE_LEVELS = (0.0, 0.01, 0.05, 0.25, 0.5, 0.75, 0.95, 0.99, 1.0)


class ScreeningError(DegeneracyError):
    """Raised when no mask in the universe can be screened."""
    pass


class ScreeningInputError(InputError):
    """Raised on invalid screening parameters or candidates."""
    pass


@dataclass(frozen=True)
class ScreenConfig:
    """
    Screening parameters.

    worker_count 0 means one worker per CPU. mask_filter must be picklable
    (a module-level function or a dataclass such as MaxAssetsFilter) when
    more than one worker is used.
    """
    alpha: float = 0.05
    cov_mode: str = "gaussian"
    mask_filter: Optional[MaskFilter] = None
    tau2_floor: float = TAU2_FLOOR
    delta_floor: float = DELTA_FLOOR
    worker_count: int = 1
    block_size: int = DEFAULT_BLOCK_SIZE
    record_cap: int = DEFAULT_RECORD_CAP

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ScreeningInputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.cov_mode not in ("iid", "gaussian"):
            raise ScreeningInputError(f"cov_mode must be 'iid' or 'gaussian', got {self.cov_mode!r}")
        if self.worker_count < 0:
            raise ScreeningInputError(f"worker_count must be >= 0, got {self.worker_count}")
        if self.block_size < 1:
            raise ScreeningInputError(f"block_size must be >= 1, got {self.block_size}")
        if self.record_cap < 1:
            raise ScreeningInputError(f"record_cap must be >= 1, got {self.record_cap}")

    @property
    def q(self) -> float:
        """Critical value q_{1-alpha}."""
        return normal_quantile(1.0 - self.alpha)

    @property
    def workers(self) -> int:
        return self.worker_count or os.cpu_count() or 1


@dataclass(frozen=True, slots=True)
class ScsRecord:
    mask: SelectionMask
    loss: float
    z: float
    included: bool
    degenerate: bool
    code: str = CODE_OK
    mean: float = math.nan
    variance: float = math.nan

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


@dataclass(frozen=True, eq=False)
class Reference:
    """Empirical optimum with its cached return series."""
    mask: SelectionMask
    loss: float
    series: np.ndarray = field(repr=False)
    universe_size: int = 0
    undefined_count: int = 0


@dataclass(frozen=True, eq=False)
class ScsResult:
    """
    Screening outcome, stored column-wise and sorted by mask integer.

    When the filtered universe exceeds the record cap only the included
    masks are stored (records_truncated), and z_quantiles are estimated
    from a strided sample of the excluded masks.

    `means` and `variances` hold each stored portfolio's sample mean and
    variance (divisor T - 1), the coordinates of the mean/sd scatter.
    Left out, they are filled with NaN.
    """
    reference: SelectionMask
    reference_loss: float
    alpha: float
    q: float
    loss_spec: str
    cov_mode: str
    asset_labels: Tuple[str, ...]
    period_count: int
    universe_size: int
    masks: np.ndarray
    losses: np.ndarray
    z: np.ndarray
    included: np.ndarray
    degenerate: np.ndarray
    codes: np.ndarray
    records_truncated: bool = False
    screened_alpha: Optional[float] = None
    z_quantiles: Dict[str, float] = field(default_factory=dict)
    means: Optional[np.ndarray] = None
    variances: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        for name in ("means", "variances"):
            values = getattr(self, name)
            if values is None:
                values = np.full(len(self.masks), np.nan)
            values = np.asarray(values, dtype=np.float64)
            if values.shape != self.masks.shape:
                raise InvariantError(f"{name} has shape {values.shape}, masks {self.masks.shape}")
            object.__setattr__(self, name, values)

    @property
    def n_assets(self) -> int:
        return len(self.asset_labels)

    @property
    def included_count(self) -> int:
        return int(np.count_nonzero(self.included))

    @property
    def record_count(self) -> int:
        return len(self.masks)

    def included_bits(self) -> np.ndarray:
        return self.masks[self.included]

    def included_masks(self) -> List[SelectionMask]:
        return [SelectionMask(int(bits), self.n_assets) for bits in self.included_bits()]

    def _record(self, i: int) -> ScsRecord:
        return ScsRecord(
            mask=SelectionMask(int(self.masks[i]), self.n_assets),
            loss=float(self.losses[i]),
            z=float(self.z[i]),
            included=bool(self.included[i]),
            degenerate=bool(self.degenerate[i]),
            code=str(self.codes[i]),
            mean=float(self.means[i]),
            variance=float(self.variances[i]),
        )

    def iter_records(self) -> Iterator[ScsRecord]:
        for i in range(len(self.masks)):
            yield self._record(i)

    @property
    def records(self) -> List[ScsRecord]:
        return list(self.iter_records())

    def record_for(self, mask: SelectionMask) -> Optional[ScsRecord]:
        i = int(np.searchsorted(self.masks, mask.bits))
        if i < len(self.masks) and self.masks[i] == mask.bits:
            return self._record(i)
        return None

    def at_alpha(self, alpha: float) -> "ScsResult":
        """
        Re-threshold the stored z values at another level.

        Raises:
            ScreeningError: If records were truncated and alpha is below the
                level the masks were screened at
        """
        if not 0.0 < alpha < 1.0:
            raise ScreeningInputError(f"alpha must lie in (0, 1), got {alpha}")
        screened = self.screened_alpha if self.screened_alpha is not None else self.alpha
        if self.records_truncated and alpha < screened:
            raise ScreeningError(
                f"Records were truncated at alpha={screened}; re-screen for alpha={alpha}"
            )
        q = normal_quantile(1.0 - alpha)
        included = (self.z <= q) | (self.masks == self.reference.bits)
        return replace(self, alpha=alpha, q=q, included=included, screened_alpha=screened)

    def check_invariants(self) -> None:
        """
        Raises:
            InvariantError: If the reference is missing, an included z exceeds
                q, or a loss lies below the reference loss
        """
        is_ref = self.masks == self.reference.bits
        if np.count_nonzero(is_ref) != 1 or not self.included[is_ref].all():
            raise InvariantError(f"Reference {self.reference.to_hex()} not included")
        if self.z[is_ref][0] != 0.0:
            raise InvariantError("Reference z must be 0")
        bad = self.included & ~is_ref & ~(self.z <= self.q)
        if bad.any():
            raise InvariantError(f"{int(bad.sum())} included record(s) with z > q")
        if (self.losses < self.reference_loss).any():
            raise InvariantError("Record loss below the empirical optimum")
        if np.any(np.diff(self.masks) <= 0):
            raise InvariantError("Records not strictly sorted by mask")


# ----------------------------------------------------------------------------
# Block workers (module level so they pickle into the process pool)
# ----------------------------------------------------------------------------

def _block_ranges(n_assets: int, block_size: int) -> List[Tuple[int, int]]:
    end = 1 << n_assets
    return [(start, min(start + block_size, end)) for start in range(1, end, block_size)]


def _block_series(
    panel: ReturnPanel, start: int, stop: int, mask_filter: Optional[MaskFilter]
) -> Tuple[np.ndarray, np.ndarray]:
    """Masks passing the filter in [start, stop) and their return series."""
    n, cols = panel.N, panel.columns
    size = stop - start
    sums = np.empty((size, panel.T))
    codes = np.empty(size, dtype=np.int64)
    weights = np.empty(size, dtype=np.float64)
    keep = np.ones(size, dtype=bool)

    current: Optional[np.ndarray] = None
    prev_weight = 0
    for k, (bits, flipped, added) in enumerate(gray_block(start, stop)):
        if flipped < 0:
            current = cols[[j for j in range(n) if bits >> j & 1]].sum(axis=0)
        else:
            current = running_series_update(current, panel, flipped, added, prev_weight)
        prev_weight = bits.bit_count()
        sums[k] = current
        codes[k] = bits
        weights[k] = prev_weight
        if mask_filter is not None:
            keep[k] = bool(mask_filter(SelectionMask(bits, n)))

    return codes[keep], sums[keep] / weights[keep][:, None]


def _optimum_block(task: tuple) -> tuple:
    panel, spec, start, stop, mask_filter = task
    codes, series = _block_series(panel, start, stop, mask_filter)
    if len(codes) == 0:
        return None, math.inf, None, 0, 0
    moments = sample_moments(series)
    with np.errstate(divide="ignore", invalid="ignore"):
        losses = np.asarray(spec.value(moments.mean, moments.variance), dtype=np.float64)
    undefined = ~np.asarray(spec.defined(moments.variance)) | np.isnan(losses)
    losses = np.where(undefined, np.inf, losses)
    if undefined.all():
        return None, math.inf, None, len(codes), int(undefined.sum())
    best_loss = losses.min()
    # ties -> smallest mask integer
    best = int(np.flatnonzero(losses == best_loss)[np.argmin(codes[losses == best_loss])])
    return int(codes[best]), float(best_loss), series[best].copy(), len(codes), int(undefined.sum())


def _screen_block(task: tuple) -> tuple:
    panel, spec, start, stop, mask_filter, ref_bits, ref_series, params, stride = task
    cov_mode, tau2_floor, delta_floor, q = params
    codes, series = _block_series(panel, start, stop, mask_filter)
    if len(codes) == 0:
        empty = np.empty(0)
        return codes, empty, empty, np.empty(0, bool), np.empty(0, "<U14"), empty, empty, empty

    pm = pair_moments(series, ref_series)
    stat = screen_statistics(spec, pm, cov_mode, tau2_floor, delta_floor)
    means = np.broadcast_to(np.asarray(pm.m_s.mean, dtype=np.float64), codes.shape)
    variances = np.broadcast_to(np.asarray(pm.m_s.variance, dtype=np.float64), codes.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        losses = np.asarray(spec.value(means, variances), dtype=np.float64)
    undefined = stat.code == CODE_LOSS_UNDEFINED
    losses = np.where(undefined | np.isnan(losses), np.inf, losses)
    z = np.asarray(stat.z, dtype=np.float64)
    degenerate = np.asarray(stat.degenerate, dtype=bool)
    code = np.asarray(stat.code, dtype="<U14")

    if stride <= 1:
        return codes, losses, z, degenerate, code, means, variances, np.empty(0)
    keep = (z <= q) | (codes == ref_bits)
    sampled = z[~keep][::stride]
    return (
        codes[keep], losses[keep], z[keep], degenerate[keep], code[keep],
        means[keep], variances[keep], sampled,
    )


def _run_blocks(fn: Callable[[tuple], tuple], tasks: Sequence[tuple], workers: int) -> List[tuple]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


# ----------------------------------------------------------------------------
# Public operations
# ----------------------------------------------------------------------------

def find_reference(
    panel: ReturnPanel,
    spec: LossSpec,
    mask_filter: Optional[MaskFilter] = None,
    worker_count: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> Reference:
    """
    Pass 1: empirical optimum over the filtered universe, with its series.

    Raises:
        ScreeningError: If no mask passes the filter or the loss is
            undefined on every passing mask
    """
    workers = worker_count or os.cpu_count() or 1
    tasks = [(panel, spec, a, b, mask_filter) for a, b in _block_ranges(panel.N, block_size)]
    logger.debug(f"Optimum pass: {len(tasks)} block(s), {workers} worker(s)")

    best_bits, best_loss, best_series = None, math.inf, None
    kept = undefined = 0
    for bits, loss, series, n_kept, n_undefined in _run_blocks(_optimum_block, tasks, workers):
        kept += n_kept
        undefined += n_undefined
        if bits is None:
            continue
        if best_bits is None or (loss, bits) < (best_loss, best_bits):
            best_bits, best_loss, best_series = bits, loss, series

    if kept == 0:
        raise ScreeningError("No selection passes the mask filter")
    if best_bits is None:
        raise ScreeningError(f"Loss {spec} undefined on all {kept} selections")
    if undefined:
        logger.warning(f"Loss {spec} undefined on {undefined} of {kept} selection(s)")

    mask = SelectionMask(best_bits, panel.N)
    logger.info(f"Empirical optimum {mask.to_hex()} with loss {best_loss:.6g}")
    return Reference(mask, best_loss, best_series, universe_size=kept, undefined_count=undefined)


def empirical_optimum(
    panel: ReturnPanel,
    spec: LossSpec,
    mask_filter: Optional[MaskFilter] = None,
    worker_count: int = 1,
    block_size: int = DEFAULT_BLOCK_SIZE,
) -> Tuple[SelectionMask, float]:
    """
    Mask minimizing the sample loss; ties go to the smallest mask integer.

    Returns:
        (s0, L0)
    """
    ref = find_reference(panel, spec, mask_filter, worker_count, block_size)
    return ref.mask, ref.loss


def build_scs(
    panel: ReturnPanel,
    spec: LossSpec,
    config: ScreenConfig = ScreenConfig(),
    reference: Optional[Reference] = None,
) -> ScsResult:
    """
    Screen every mask of the filtered universe against the empirical optimum.

    Args:
        panel: Return panel
        spec: Loss function
        config: Screening parameters
        reference: Pass-1 result to reuse (computed when omitted)

    Returns:
        ScsResult sorted by mask integer

    Raises:
        ScreeningError: If the universe is empty or the loss is undefined
            everywhere
    """
    if reference is None:
        reference = find_reference(panel, spec, config.mask_filter, config.worker_count, config.block_size)

    q = config.q
    size = reference.universe_size
    truncated = size > config.record_cap
    stride = max(1, math.ceil(size / config.record_cap)) if truncated else 1
    params = (config.cov_mode, config.tau2_floor, config.delta_floor, q)
    tasks = [
        (panel, spec, a, b, config.mask_filter, reference.mask.bits, reference.series, params, stride)
        for a, b in _block_ranges(panel.N, config.block_size)
    ]
    logger.info(
        f"Screening {size} selection(s) in {len(tasks)} block(s) "
        f"at alpha={config.alpha} (q={q:.4f}, {config.cov_mode})"
    )
    parts = _run_blocks(_screen_block, tasks, config.workers)

    masks = np.concatenate([p[0] for p in parts])
    order = np.argsort(masks, kind="stable")
    masks = masks[order]
    losses = np.concatenate([p[1] for p in parts])[order]
    z = np.concatenate([p[2] for p in parts])[order]
    degenerate = np.concatenate([p[3] for p in parts])[order]
    codes = np.concatenate([p[4] for p in parts])[order]
    means = np.concatenate([p[5] for p in parts])[order]
    variances = np.concatenate([p[6] for p in parts])[order]
    sampled = np.concatenate([p[7] for p in parts])

    is_ref = masks == reference.mask.bits
    z[is_ref] = 0.0
    losses[is_ref] = reference.loss
    degenerate[is_ref] = False
    codes[is_ref] = CODE_OK
    included = (z <= q) | is_ref

    result = ScsResult(
        reference=reference.mask,
        reference_loss=reference.loss,
        alpha=config.alpha,
        q=q,
        loss_spec=spec.to_string(),
        cov_mode=config.cov_mode,
        asset_labels=tuple(panel.asset_labels),
        period_count=panel.T,
        universe_size=size,
        masks=masks,
        losses=losses,
        z=z,
        included=included,
        degenerate=degenerate,
        codes=codes,
        records_truncated=truncated,
        screened_alpha=config.alpha,
        z_quantiles=z_quantiles(np.concatenate([z, sampled]) if truncated else z),
        means=means,
        variances=variances,
    )
    result.check_invariants()

    n_degenerate = int(degenerate.sum())
    if n_degenerate:
        logger.warning(f"{n_degenerate} degenerate record(s) (floored or undefined loss)")
    logger.info(f"SCS holds {result.included_count} of {size} selection(s)")
    return result


def z_quantiles(z: np.ndarray) -> Dict[str, float]:
    """Summary quantiles of the finite z values."""
    finite = z[np.isfinite(z)]
    if len(finite) == 0:
        return {}
    values = np.quantile(finite, QUANTILE_LEVELS)
    return {f"{level:g}": float(v) for level, v in zip(QUANTILE_LEVELS, values)}


def plausibility_check(
    panel: ReturnPanel,
    spec: LossSpec,
    config: ScreenConfig,
    candidate: SelectionMask,
    reference: Optional[Reference] = None,
) -> Dict[str, object]:
    """
    Is `candidate` statistically indistinguishable from the empirical optimum?

    Returns:
        Dict with z, included, q, loss and reference_loss

    Raises:
        ScreeningInputError: If the candidate is outside the (filtered) universe
    """
    if candidate.n_assets != panel.N:
        raise ScreeningInputError(
            f"Candidate over N={candidate.n_assets} for a panel with N={panel.N}"
        )
    if config.mask_filter is not None and not config.mask_filter(candidate):
        raise ScreeningInputError(f"Candidate {candidate.to_hex()} is excluded by the mask filter")
    if reference is None:
        reference = find_reference(panel, spec, config.mask_filter, config.worker_count, config.block_size)

    q = config.q
    if candidate == reference.mask:
        return {"z": 0.0, "included": True, "q": q,
                "loss": reference.loss, "reference_loss": reference.loss, "code": CODE_OK}

    series = portfolio_series(panel, candidate)
    stat = screen_statistic(
        spec, pair_moments(series, reference.series),
        config.cov_mode, config.tau2_floor, config.delta_floor,
    )
    moments = sample_moments(series)
    loss = math.inf if stat.code == CODE_LOSS_UNDEFINED else float(spec.value(moments.mean, moments.variance))
    return {
        "z": stat.z,
        "included": bool(stat.z <= q),
        "q": q,
        "loss": loss,
        "reference_loss": reference.loss,
        "code": stat.code,
    }
