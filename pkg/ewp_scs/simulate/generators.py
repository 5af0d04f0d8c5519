# ============================================================================
# EWP-SCS - SYNTHETIC RETURN GENERATORS
# ============================================================================
"""
Gaussian return models with covariance D R D.

    Model1  correlation from a scale-free precision graph
    Model2  exchangeable correlation rho

Marginal variances are U[0.01, 0.03] and means follow
eta_j = -0.002 + Sigma_jj / 10 + eps_j with eps_j ~ N(0, 0.02).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Union

import networkx as nx
import numpy as np

from ..errors import InputError
from ..panel import ReturnPanel
from .rng import substream

logger = logging.getLogger(__name__)


class SimulationError(InputError):
    """Raised on invalid generator parameters or non-PD models."""
    pass


@dataclass(frozen=True)
class Model1:
    """Scale-free precision graph with edge weight v."""
    v: float = 1.0
    name = "model1"

    def __post_init__(self) -> None:
        if not self.v > 0:
            raise SimulationError(f"Model 1 needs v > 0, got {self.v}")


@dataclass(frozen=True)
class Model2:
    """Exchangeable correlation rho."""
    rho: float = 0.75
    name = "model2"

    def __post_init__(self) -> None:
        if not -1.0 < self.rho < 1.0:
            raise SimulationError(f"Model 2 needs rho in (-1, 1), got {self.rho}")


@dataclass(frozen=True)
class MeanRule:
    """eta_j = base + var_coef * Sigma_jj + eps_j."""
    base: float = -0.002
    var_coef: float = 0.1
    noise_param: float = 0.02
    noise_is_variance: bool = True

    @property
    def noise_sd(self) -> float:
        return math.sqrt(self.noise_param) if self.noise_is_variance else self.noise_param


@dataclass(frozen=True)
class GeneratorSpec:
    """
    Full description of a simulated population.

    fix_graph keeps one Model 1 graph for all runs; fix_population keeps
    one population (graph, variances and means) for all runs.
    """
    model: Union[Model1, Model2]
    n: int
    mean_rule: MeanRule = MeanRule()
    seed: int = 42
    fix_graph: bool = False
    fix_population: bool = False
    var_low: float = 0.01
    var_high: float = 0.03

    def __post_init__(self) -> None:
        if self.n < 1:
            raise SimulationError(f"N must be positive, got {self.n}")
        if not 0 < self.var_low <= self.var_high:
            raise SimulationError(f"Bad variance range [{self.var_low}, {self.var_high}]")
        if isinstance(self.model, Model2):
            check_rho(self.n, self.model.rho)


@dataclass(frozen=True, eq=False)
class PopulationModel:
    """Multivariate normal N(mean, covariance) with its Cholesky factor."""
    mean: np.ndarray
    covariance: np.ndarray
    factor: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        mean = np.asarray(self.mean, dtype=np.float64)
        cov = np.asarray(self.covariance, dtype=np.float64)
        if cov.shape != (len(mean), len(mean)):
            raise SimulationError(f"Covariance shape {cov.shape} does not match mean of length {len(mean)}")
        if not np.allclose(cov, cov.T, rtol=0.0, atol=1e-12):
            raise SimulationError("Covariance is not symmetric")
        try:
            factor = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise SimulationError(f"Covariance is not positive definite: {e}") from e
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "factor", factor)

    @property
    def n(self) -> int:
        return len(self.mean)


def check_rho(n: int, rho: float) -> None:
    """Exchangeable R is PD iff -1/(N-1) < rho < 1."""
    if not rho < 1.0 or (n > 1 and not rho > -1.0 / (n - 1)):
        raise SimulationError(
            f"rho={rho} not positive definite for N={n} "
            f"(needs {-1.0 / max(n - 1, 1):.4f} < rho < 1)"
        )


def gen_model2(n: int, rho: float) -> np.ndarray:
    """
    Exchangeable correlation matrix.

    Raises:
        SimulationError: If rho is outside (-1/(N-1), 1)
    """
    check_rho(n, rho)
    corr = np.full((n, n), float(rho))
    np.fill_diagonal(corr, 1.0)
    return corr


def scale_free_adjacency(n: int, seed: int) -> np.ndarray:
    """Preferential-attachment tree, one edge per new node."""
    if n < 2:
        return np.zeros((n, n))
    graph = nx.barabasi_albert_graph(n, 1, seed=seed)
    return nx.to_numpy_array(graph, nodelist=range(n), dtype=np.float64)


def gen_model1(n: int, v: float, seed: int) -> np.ndarray:
    """
    Correlation matrix from a scale-free precision graph.

    Omega = v * Theta + (|e| + 0.2) I with e the smallest eigenvalue of
    v * Theta; R is Omega^-1 rescaled to unit diagonal.
    """
    Model1(v)
    if n == 1:
        return np.ones((1, 1))
    weighted = v * scale_free_adjacency(n, seed)
    smallest = float(np.linalg.eigvalsh(weighted)[0])
    omega = weighted + (abs(smallest) + 0.2) * np.eye(n)
    inverse = np.linalg.inv(omega)
    inverse = 0.5 * (inverse + inverse.T)
    scale = np.sqrt(np.diag(inverse))
    corr = inverse / np.outer(scale, scale)
    np.fill_diagonal(corr, 1.0)
    return corr


def gen_mean_vector(
    sigma_diag: np.ndarray,
    rule: MeanRule = MeanRule(),
    rng: Optional[np.random.Generator] = None,
) -> np.ndarray:
    """eta_j = base + var_coef * Sigma_jj + eps_j."""
    sigma_diag = np.asarray(sigma_diag, dtype=np.float64)
    noise = np.zeros_like(sigma_diag)
    if rule.noise_sd > 0:
        if rng is None:
            raise SimulationError("A random generator is required for nonzero mean noise")
        noise = rng.normal(0.0, rule.noise_sd, size=sigma_diag.shape)
    return rule.base + rule.var_coef * sigma_diag + noise


def correlation_for(genspec: GeneratorSpec, run: int) -> np.ndarray:
    model = genspec.model
    if isinstance(model, Model2):
        return gen_model2(genspec.n, model.rho)
    graph_run = 0 if (genspec.fix_graph or genspec.fix_population) else run
    graph_seed = int(substream(genspec.seed, graph_run, "graph").integers(2 ** 62))
    return gen_model1(genspec.n, model.v, graph_seed)


def build_population(genspec: GeneratorSpec, run: int = 0) -> PopulationModel:
    """Population of one Monte Carlo run."""
    pop_run = 0 if genspec.fix_population else run
    corr = correlation_for(genspec, run)
    variances = substream(genspec.seed, pop_run, "variance").uniform(
        genspec.var_low, genspec.var_high, size=genspec.n
    )
    mean = gen_mean_vector(variances, genspec.mean_rule, substream(genspec.seed, pop_run, "mean"))
    sd = np.sqrt(variances)
    covariance = corr * np.outer(sd, sd)
    return PopulationModel(mean=mean, covariance=0.5 * (covariance + covariance.T))


def asset_labels(n: int) -> List[str]:
    return [f"X{j + 1}" for j in range(n)]


def sample_panel(model: PopulationModel, T: int, seed: int, run: int = 0) -> ReturnPanel:
    """
    T i.i.d. draws eta + F z from the run's panel substream.

    Raises:
        SimulationError: If T < 2
    """
    if T < 2:
        raise SimulationError(f"Need T >= 2, got {T}")
    z = substream(seed, run, "panel", T).standard_normal(size=(T, model.n))
    returns = model.mean + z @ model.factor.T
    return ReturnPanel(returns, asset_labels(model.n))
