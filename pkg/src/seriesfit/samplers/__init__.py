"""MCMC and nested samplers plus the sampling controllers."""

from .adaptive import AdaptiveCovarianceMCMC
from .base import MCMCSampler
from .controller import (
    MCMC_METHODS,
    MCMCResult,
    NESTED_METHODS,
    run_mcmc,
    run_nested,
)
from .metropolis import RandomWalkMetropolis
from .nested import (
    NestedEllipsoidSampler,
    NestedRejectionSampler,
    NestedResult,
    NestedSamplingError,
)
from .population import PopulationMCMC

__all__ = [
    "AdaptiveCovarianceMCMC",
    "MCMCResult",
    "MCMC_METHODS",
    "MCMCSampler",
    "NESTED_METHODS",
    "NestedEllipsoidSampler",
    "NestedRejectionSampler",
    "NestedResult",
    "NestedSamplingError",
    "PopulationMCMC",
    "RandomWalkMetropolis",
    "run_mcmc",
    "run_nested",
]
