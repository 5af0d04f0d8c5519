# ============================================================================
# EWP-SCS - SELECTION MASKS
# ============================================================================
"""
Asset selections as bitmasks and their Gray-code enumeration.

Bit j of a mask set means asset j is held. The empty selection is not
feasible, so the selection space is {1, ..., 2^N - 1}.

Gray-code order is the canonical enumeration order: consecutive masks
differ in one asset, so a portfolio's running return sum is updated
with a single column add or remove.
"""

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np

from .errors import InputError
from .panel import DEFAULT_N_MAX


class SelectionError(InputError):
    """Raised on invalid masks or enumeration ranges."""
    pass


@dataclass(frozen=True, slots=True)
class SelectionMask:
    """A nonzero subset of an N-asset universe."""
    bits: int
    n_assets: int

    def __post_init__(self) -> None:
        if self.n_assets < 1:
            raise SelectionError(f"Universe size must be positive, got {self.n_assets}")
        if not 0 < self.bits < (1 << self.n_assets):
            raise SelectionError(
                f"Mask {self.bits:#x} outside the nonzero range for N={self.n_assets}"
            )

    @property
    def weight(self) -> int:
        return weight(self)

    def support(self) -> List[int]:
        """Indices of held assets, ascending."""
        return [j for j in range(self.n_assets) if self.contains(j)]

    def contains(self, asset: int) -> bool:
        """True if asset `asset` is held."""
        return bool(self.bits >> asset & 1)

    def to_hex(self) -> str:
        """Serialize as e.g. '0x5b/17'."""
        return f"{self.bits:#x}/{self.n_assets}"

    @classmethod
    def from_hex(cls, text: str) -> "SelectionMask":
        try:
            bits_text, n_text = text.strip().split("/")
            return cls(int(bits_text, 16), int(n_text))
        except ValueError:
            raise SelectionError(f"Bad mask literal {text!r}, expected e.g. '0x5b/17'") from None

    @classmethod
    def from_assets(cls, assets: Sequence[int], n_assets: int) -> "SelectionMask":
        bits = 0
        for j in assets:
            if not 0 <= j < n_assets:
                raise SelectionError(f"Asset index {j} out of range for N={n_assets}")
            bits |= 1 << j
        return cls(bits, n_assets)

    @classmethod
    def from_labels(cls, labels: Sequence[str], universe: Sequence[str]) -> "SelectionMask":
        index = {label: j for j, label in enumerate(universe)}
        missing = [label for label in labels if label not in index]
        if missing:
            raise SelectionError(f"Unknown asset label(s): {', '.join(missing)}")
        return cls.from_assets([index[label] for label in labels], len(universe))

    def labels(self, universe: Sequence[str]) -> List[str]:
        return [universe[j] for j in self.support()]


@dataclass(frozen=True)
class GrayStep:
    """One element of the Gray-code stream."""
    mask: SelectionMask
    flipped_asset: int
    added: bool


@dataclass(frozen=True)
class MaxAssetsFilter:
    """Mask predicate keeping selections of at most `max_assets` assets."""
    max_assets: int

    def __call__(self, mask: SelectionMask) -> bool:
        return mask.weight <= self.max_assets


def to_gray_code(index: int) -> int:
    """Convert a counter index to its Gray code."""
    return (index >> 1) ^ index


def flipped_bit(index: int) -> int:
    """Bit that changes between Gray codes index-1 and index (index >= 1)."""
    return (index & -index).bit_length() - 1


def universe_size(n_assets: int) -> int:
    return (1 << n_assets) - 1


def check_universe(n_assets: int, n_max: int = DEFAULT_N_MAX) -> None:
    if not 1 <= n_assets <= n_max:
        raise SelectionError(f"N must be in [1, {n_max}], got {n_assets}")


def enumerate_gray(n_assets: int, n_max: int = DEFAULT_N_MAX) -> Iterator[GrayStep]:
    """
    Stream all nonzero masks in reflected Gray-code order.

    Starts from mask 1 (reported as asset 0 added); each later mask
    differs from its predecessor in exactly one bit.

    Raises:
        SelectionError: If n_assets is out of range
    """
    check_universe(n_assets, n_max)
    for index in range(1, 1 << n_assets):
        code = to_gray_code(index)
        bit = flipped_bit(index)
        yield GrayStep(SelectionMask(code, n_assets), bit, bool(code >> bit & 1))


def gray_block(start: int, stop: int) -> Iterator[Tuple[int, int, bool]]:
    """
    Raw Gray stream over counter indices [start, stop) as (bits, flipped, added).

    The first element is reported with flipped = -1: the caller seeds its
    running state from scratch there.
    """
    for index in range(start, stop):
        code = to_gray_code(index)
        if index == start:
            yield code, -1, True
            continue
        bit = flipped_bit(index)
        yield code, bit, bool(code >> bit & 1)


def is_strict_subset(a: SelectionMask, b: SelectionMask) -> bool:
    """True iff support(a) is a proper subset of support(b)."""
    if a.n_assets != b.n_assets:
        raise SelectionError(
            f"Masks over different universes: N={a.n_assets} vs N={b.n_assets}"
        )
    return a.bits != b.bits and a.bits & b.bits == a.bits


def weight(mask: SelectionMask) -> int:
    """Number of held assets."""
    return int(mask.bits).bit_count()


def bits_matrix(masks: Sequence[int], n_assets: int) -> np.ndarray:
    """0/1 matrix (len(masks) x N) of mask membership."""
    codes = np.asarray(masks, dtype=np.int64)
    return ((codes[:, None] >> np.arange(n_assets, dtype=np.int64)) & 1).astype(np.float64)
