"""Synthetic return models, population theory and Monte Carlo studies."""

from .generators import (
    GeneratorSpec,
    MeanRule,
    Model1,
    Model2,
    PopulationModel,
    SimulationError,
    build_population,
    gen_mean_vector,
    gen_model1,
    gen_model2,
    sample_panel,
)
from .montecarlo import McCell, McEstimates, RunRecord, run_mc
from .population import (
    TheoryResult,
    population_gamma,
    population_moments,
    theoretical_expected_size,
    true_optimum,
)
from .rng import substream

__all__ = [
    "GeneratorSpec",
    "McCell",
    "McEstimates",
    "MeanRule",
    "Model1",
    "Model2",
    "PopulationModel",
    "RunRecord",
    "SimulationError",
    "TheoryResult",
    "build_population",
    "gen_mean_vector",
    "gen_model1",
    "gen_model2",
    "population_gamma",
    "population_moments",
    "run_mc",
    "sample_panel",
    "substream",
    "theoretical_expected_size",
    "true_optimum",
]
