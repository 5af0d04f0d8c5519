# ============================================================================
# EWP-SCS - MONTE CARLO STUDY
# ============================================================================
"""
Monte Carlo estimates of expected SCS size, lower-boundary size and
coverage of the population-optimal set.

Each run draws its own population (see GeneratorSpec for the fixing
switches), samples one panel per T, and screens it once per loss at the
smallest alpha; the other alphas are re-thresholds of the same z values.
Runs are independent tasks on a process pool and are aggregated in run
order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ScsError
from ..losses import LossSpec
from ..metrics import lower_boundary
from ..screening import ScreenConfig, build_scs
from .generators import GeneratorSpec, SimulationError, build_population, sample_panel
from .population import true_optimum

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunRecord:
    run: int
    n: int
    T: int
    loss: str
    alpha: float
    scs_size: int = 0
    lb_size: int = 0
    covered: bool = False
    optimal: List[str] = field(default_factory=list)
    reference: str = ""
    status: str = "ok"


@dataclass(frozen=True)
class McCell:
    n: int
    loss: str
    T: int
    alpha: float
    runs: int
    excluded: int
    kappa: float
    kappa_se: float
    coverage: float
    coverage_se: float
    kappa_lower: float
    kappa_lower_se: float


@dataclass(frozen=True)
class McEstimates:
    cells: List[McCell]
    records: List[RunRecord]

    def cell(self, loss: str, T: int, alpha: float, n: Optional[int] = None) -> McCell:
        for c in self.cells:
            if c.loss == loss and c.T == T and math.isclose(c.alpha, alpha) and (n is None or c.n == n):
                return c
        raise KeyError(f"No Monte Carlo cell for loss={loss}, T={T}, alpha={alpha}, n={n}")

    def records_as_dicts(self) -> List[dict]:
        return [asdict(r) for r in self.records]


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    if len(values) == 0:
        return math.nan, math.nan
    if len(values) == 1:
        return float(values[0]), math.nan
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(len(values)))


def run_one(
    genspec: GeneratorSpec,
    specs: Sequence[LossSpec],
    alphas: Sequence[float],
    Ts: Sequence[int],
    run: int,
    cov_mode: str = "gaussian",
) -> List[RunRecord]:
    """All (loss, T, alpha) records of one Monte Carlo run."""
    population = build_population(genspec, run)
    optimal = {spec.to_string(): true_optimum(population, spec)[0] for spec in specs}
    config = ScreenConfig(alpha=min(alphas), cov_mode=cov_mode, worker_count=1)

    records: List[RunRecord] = []
    for T in Ts:
        panel = sample_panel(population, T, genspec.seed, run)
        for spec in specs:
            name = spec.to_string()
            s0 = optimal[name]
            base = dict(run=run, n=genspec.n, T=T, loss=name, optimal=[m.to_hex() for m in s0])
            try:
                scs = build_scs(panel, spec, config)
            except ScsError as e:
                logger.warning(f"Run {run}, T={T}, {name}: {e}")
                records.extend(RunRecord(alpha=a, status=f"degenerate: {e}", **base) for a in alphas)
                continue
            for alpha in alphas:
                at = scs.at_alpha(alpha)
                included = set(int(b) for b in at.included_bits())
                records.append(RunRecord(
                    alpha=alpha,
                    scs_size=at.included_count,
                    lb_size=len(lower_boundary(at)),
                    covered=all(m.bits in included for m in s0),
                    reference=at.reference.to_hex(),
                    **base,
                ))
    return records


def _run_task(task: tuple) -> List[RunRecord]:
    return run_one(*task)


def aggregate(records: Sequence[RunRecord]) -> List[McCell]:
    """Per (n, loss, T, alpha) means and standard errors over successful runs."""
    groups: Dict[tuple, List[RunRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.loss, r.T, r.alpha), []).append(r)

    cells = []
    for (n, loss, T, alpha), group in groups.items():
        ok = [r for r in group if r.status == "ok"]
        kappa = _mean_se(np.array([r.scs_size for r in ok], dtype=np.float64))
        coverage = _mean_se(np.array([r.covered for r in ok], dtype=np.float64))
        kappa_lower = _mean_se(np.array([r.lb_size for r in ok], dtype=np.float64))
        cells.append(McCell(
            n=n, loss=loss, T=T, alpha=alpha,
            runs=len(ok), excluded=len(group) - len(ok),
            kappa=kappa[0], kappa_se=kappa[1],
            coverage=coverage[0], coverage_se=coverage[1],
            kappa_lower=kappa_lower[0], kappa_lower_se=kappa_lower[1],
        ))
    return cells


def run_mc(
    genspec: GeneratorSpec,
    specs: Sequence[LossSpec],
    alphas: Sequence[float],
    Ts: Sequence[int],
    runs: int,
    threads: int = 1,
    cov_mode: str = "gaussian",
) -> McEstimates:
    """
    Monte Carlo estimates for every (loss, T, alpha) cell.

    Args:
        genspec: Population generator
        specs: Losses to screen with
        alphas: Significance levels
        Ts: Sample lengths
        runs: Number of runs (>= 2)
        threads: Worker processes (runs are distributed, screening is inline)

    Raises:
        SimulationError: On fewer than 2 runs or empty grids
    """
    if runs < 2:
        raise SimulationError(f"Need at least 2 runs, got {runs}")
    if not specs or not alphas or not Ts:
        raise SimulationError("Losses, alphas and Ts must be nonempty")

    logger.info(
        f"Monte Carlo: {runs} runs, N={genspec.n}, {type(genspec.model).__name__}, "
        f"T={list(Ts)}, {len(specs)} loss(es), {threads} worker(s)"
    )
    tasks = [(genspec, list(specs), list(alphas), list(Ts), run, cov_mode) for run in range(runs)]
    if threads <= 1:
        per_run = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            per_run = list(pool.map(_run_task, tasks))

    records = [r for run_records in per_run for r in run_records]
    cells = aggregate(records)
    excluded = sum(c.excluded for c in cells)
    if excluded:
        logger.warning(f"{excluded} cell-run(s) excluded as degenerate")
    return McEstimates(cells=cells, records=records)
