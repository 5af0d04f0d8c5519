# ============================================================================
# EWP-SCS - RETURN PANEL
# ============================================================================
"""
Immutable T x N return panel and its ingestion.

Time order is the file's row order. Dates, when present, are carried as
opaque labels and never parsed. Missing values are a hard error.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import InputError

logger = logging.getLogger(__name__)

DEFAULT_N_MAX = 25
DUPLICATE_CORRELATION = 1.0 - 1e-12


class PanelError(InputError):
    """Raised when return data cannot form a valid panel."""
    pass


@dataclass(frozen=True, eq=False)
class ReturnPanel:
    """
    Per-period asset returns.

    `returns` is stored read-only; the panel is safe to share across
    concurrent readers.
    """
    returns: np.ndarray
    asset_labels: Tuple[str, ...]
    period_labels: Optional[Tuple[str, ...]] = None
    n_max: int = field(default=DEFAULT_N_MAX, compare=False)

    def __post_init__(self) -> None:
        returns = np.array(self.returns, dtype=np.float64, copy=True)
        if returns.ndim != 2:
            raise PanelError(f"Returns must be a T x N matrix, got shape {returns.shape}")

        t, n = returns.shape
        if t < 2:
            raise PanelError(f"Need at least 2 periods, got T={t}")
        if n < 1:
            raise PanelError("Need at least one asset")
        if n > self.n_max:
            raise PanelError(f"N={n} exceeds the configured cap N_max={self.n_max}")

        bad = np.argwhere(~np.isfinite(returns))
        if bad.size:
            row, col = bad[0]
            raise PanelError(
                f"Non-finite value at row {row}, column {col} "
                f"({self.asset_labels[col] if col < len(self.asset_labels) else col})"
            )

        labels = tuple(str(label) for label in self.asset_labels)
        if len(labels) != n:
            raise PanelError(f"Got {len(labels)} labels for {n} assets")
        if any(not label.strip() for label in labels):
            raise PanelError("Asset labels must be nonempty")
        if len(set(labels)) != n:
            seen = set()
            dupes = sorted({label for label in labels if label in seen or seen.add(label)})
            raise PanelError(f"Duplicate asset labels: {', '.join(dupes)}")

        if self.period_labels is not None and len(self.period_labels) != t:
            raise PanelError(f"Got {len(self.period_labels)} period labels for T={t}")

        returns.setflags(write=False)
        columns = np.ascontiguousarray(returns.T)
        columns.setflags(write=False)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "asset_labels", labels)
        object.__setattr__(self, "_columns", columns)

    @property
    def period_count(self) -> int:
        return self.returns.shape[0]

    @property
    def asset_count(self) -> int:
        return self.returns.shape[1]

    T = period_count
    N = asset_count

    @property
    def columns(self) -> np.ndarray:
        """Asset-major contiguous copy (N x T), used by the streaming passes."""
        return self._columns

    def scaled(self, factor: float) -> "ReturnPanel":
        """Return a copy with every return multiplied by `factor` (e.g. 100 for percent)."""
        return ReturnPanel(
            returns=self.returns * factor,
            asset_labels=self.asset_labels,
            period_labels=self.period_labels,
            n_max=self.n_max,
        )


def load_csv(
    path: Union[str, Path],
    delimiter: str = ",",
    header: bool = True,
    date_column: bool = False,
    n_max: int = DEFAULT_N_MAX,
) -> ReturnPanel:
    """
    Load a return panel from a UTF-8 CSV file.

    Args:
        path: CSV file path
        delimiter: Field separator
        header: Whether the first row holds asset labels
        date_column: Whether the first column holds period labels
        n_max: Hard cap on the number of assets

    Returns:
        Validated ReturnPanel, rows in file order

    Raises:
        PanelError: On malformed rows, non-finite values, duplicate
            labels or fewer than 2 periods
    """
    path = Path(path)
    if not path.exists():
        raise PanelError(f"File not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            header=None,
            dtype=str,
            encoding="utf-8",
            skipinitialspace=True,
            keep_default_na=False,
        )
    except pd.errors.ParserError as e:
        raise PanelError(f"Malformed row in {path}: {e}") from e
    except (pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise PanelError(f"Cannot read {path}: {e}") from e

    # keep_default_na=False: NaN here only pads rows shorter than the first
    short = frame.isna().any(axis=1).to_numpy()
    if short.any():
        row = int(np.flatnonzero(short)[0])
        fields = int(frame.iloc[row].notna().sum())
        raise PanelError(
            f"Malformed row at file line {row + 1} of {path}: "
            f"{fields} field(s), expected {frame.shape[1]}"
        )

    if header:
        labels = [str(c).strip() for c in frame.iloc[0]]
        frame = frame.iloc[1:]
    else:
        labels = ["date"] * int(date_column) + [
            f"asset_{j + 1}" for j in range(frame.shape[1] - int(date_column))
        ]

    period_labels = None
    if date_column:
        if frame.shape[1] < 2:
            raise PanelError("Date column flag set but file has a single column")
        period_labels = tuple(frame.iloc[:, 0].astype(str))
        frame = frame.iloc[:, 1:]
        labels = labels[1:]

    raw = frame.to_numpy(dtype=object)
    returns = _parse_cells(raw, header_offset=1 if header else 0)

    panel = ReturnPanel(
        returns=returns,
        asset_labels=tuple(labels),
        period_labels=period_labels,
        n_max=n_max,
    )
    logger.info(f"Loaded panel {path.name}: T={panel.T}, N={panel.N}")
    return panel


def _parse_cells(raw: np.ndarray, header_offset: int) -> np.ndarray:
    """Parse string cells to float64, reporting the first bad cell."""
    out = np.empty(raw.shape, dtype=np.float64)
    for (row, col), cell in np.ndenumerate(raw):
        text = "" if cell is None else str(cell).strip()
        try:
            value = float(text)
        except ValueError:
            raise PanelError(
                f"Malformed value {text!r} at data row {row} "
                f"(file line {row + header_offset + 1}), column {col}"
            ) from None
        if not math.isfinite(value):
            raise PanelError(
                f"Non-finite value {text!r} at data row {row} "
                f"(file line {row + header_offset + 1}), column {col}"
            )
        out[row, col] = value
    return out


def to_csv(panel: ReturnPanel, path: Union[str, Path], delimiter: str = ",") -> None:
    """Write a panel with full float precision (round-trips bit-exactly)."""
    frame = pd.DataFrame(panel.returns, columns=list(panel.asset_labels))
    if panel.period_labels is not None:
        frame.insert(0, "date", list(panel.period_labels))
    frame.to_csv(path, sep=delimiter, index=False, float_format="%.17g")


def log_returns(
    prices: Union[np.ndarray, Sequence[Sequence[float]]],
    asset_labels: Optional[Sequence[str]] = None,
    period_labels: Optional[Sequence[str]] = None,
    n_max: int = DEFAULT_N_MAX,
) -> ReturnPanel:
    """
    Convert a T x N price matrix to a (T-1) x N log-return panel.

    Raises:
        PanelError: On nonpositive prices or fewer than 3 price rows
    """
    prices = np.asarray(prices, dtype=np.float64)
    if prices.ndim == 1:
        prices = prices[:, None]
    if prices.shape[0] < 3:
        raise PanelError(f"Need at least 3 price rows, got {prices.shape[0]}")
    if not np.all(np.isfinite(prices)):
        raise PanelError("Prices must be finite")
    bad = np.argwhere(prices <= 0)
    if bad.size:
        row, col = bad[0]
        raise PanelError(f"Nonpositive price at row {row}, column {col}")

    returns = np.log(prices[1:] / prices[:-1])
    if asset_labels is None:
        asset_labels = [f"asset_{j + 1}" for j in range(prices.shape[1])]
    if period_labels is not None:
        period_labels = tuple(period_labels)[1:]
    return ReturnPanel(
        returns=returns,
        asset_labels=tuple(asset_labels),
        period_labels=period_labels,
        n_max=n_max,
    )


def validate(panel: ReturnPanel, n_max: Optional[int] = None) -> List[str]:
    """
    Diagnose a panel. Empty list means clean.

    Reports constant columns, near-duplicate column pairs and N above
    the cap.
    """
    diagnostics: List[str] = []
    cap = panel.n_max if n_max is None else n_max
    if panel.N > cap:
        diagnostics.append(f"too many assets: N={panel.N} > N_max={cap}")

    variances = panel.returns.var(axis=0, ddof=1)
    constant = variances == 0.0
    for j in np.flatnonzero(constant):
        diagnostics.append(f"zero variance: column {j} ({panel.asset_labels[j]})")

    live = np.flatnonzero(~constant)
    if live.size >= 2:
        corr = np.corrcoef(panel.returns[:, live], rowvar=False)
        for a in range(live.size):
            for b in range(a + 1, live.size):
                if corr[a, b] > DUPLICATE_CORRELATION:
                    i, j = live[a], live[b]
                    diagnostics.append(
                        f"duplicate pair: columns {i} and {j} "
                        f"({panel.asset_labels[i]}, {panel.asset_labels[j]})"
                    )
    for message in diagnostics:
        logger.warning(f"Panel diagnostic: {message}")
    return diagnostics
