# ============================================================================
# EWP-SCS - SIMULATION RANDOM STREAMS
# ============================================================================
"""
Counter-based random substreams.

Every draw is keyed by (master seed, run index, purpose, extra...), so a
run's population and panels do not depend on which worker executes it or
in what order.
"""

from typing import Dict

import numpy as np

PURPOSES: Dict[str, int] = {
    "graph": 1,
    "variance": 2,
    "mean": 3,
    "panel": 4,
}


def substream(seed: int, run: int, purpose: str, *extra: int) -> np.random.Generator:
    """Philox generator for one (seed, run, purpose, ...) key."""
    if purpose not in PURPOSES:
        raise KeyError(f"Unknown random stream purpose: {purpose}")
    key = [int(seed), int(run), PURPOSES[purpose], *(int(x) for x in extra)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))
