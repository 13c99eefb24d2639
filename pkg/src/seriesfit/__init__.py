"""seriesfit: derivative-free optimisation and Bayesian sampling for
time-series model calibration.

Wrap a forward model behind the minimal :class:`ForwardModel` contract,
pair it with data in a :class:`TimeSeriesProblem`, and run any of the
ask-and-tell optimisers or samplers over composable error measures and
log-densities. See README.md for a tour.
"""

__version__ = "0.1.0"

from .core import (
    EvaluationError,
    ForwardModel,
    RandomSource,
    TimeSeriesProblem,
    as_parameter_vector,
    residuals,
    simulate,
)
from .densities import (
    ComposedLogPrior,
    GaussianLogLikelihood,
    GaussianLogLikelihoodUnknownSigma,
    GaussianLogPrior,
    LogPDF,
    LogPosterior,
    UniformLogPrior,
)
from .diagnostics import (
    autocorrelation,
    distribution_check,
    effective_sample_size,
    rhat,
)
from .evaluation import ParallelEvaluator, SequentialEvaluator, evaluator
from .measures import (
    ErrorMeasure,
    MeanSquaredError,
    ProbabilityBasedError,
    RootMeanSquaredError,
    SumOfSquaresError,
)
from .optimisers import (
    CMAES,
    PSO,
    SNES,
    XNES,
    OptimisationResult,
    Optimiser,
    StoppingCriteria,
    curve_fit,
    fmin,
    run_optimisation,
)
from .samplers import (
    AdaptiveCovarianceMCMC,
    MCMCResult,
    MCMCSampler,
    NestedEllipsoidSampler,
    NestedRejectionSampler,
    NestedResult,
    NestedSamplingError,
    PopulationMCMC,
    RandomWalkMetropolis,
    run_mcmc,
    run_nested,
)
from .toys import (
    BimodalTarget,
    ConstantModel,
    GaussianTarget,
    LogisticModel,
    RosenbrockError,
    TwistedGaussianTarget,
    generate_synthetic_data,
)

__all__ = [
    "AdaptiveCovarianceMCMC",
    "BimodalTarget",
    "CMAES",
    "ComposedLogPrior",
    "ConstantModel",
    "ErrorMeasure",
    "EvaluationError",
    "ForwardModel",
    "GaussianLogLikelihood",
    "GaussianLogLikelihoodUnknownSigma",
    "GaussianLogPrior",
    "GaussianTarget",
    "LogPDF",
    "LogPosterior",
    "LogisticModel",
    "MCMCResult",
    "MCMCSampler",
    "MeanSquaredError",
    "NestedEllipsoidSampler",
    "NestedRejectionSampler",
    "NestedResult",
    "NestedSamplingError",
    "OptimisationResult",
    "Optimiser",
    "PSO",
    "ParallelEvaluator",
    "PopulationMCMC",
    "ProbabilityBasedError",
    "RandomSource",
    "RandomWalkMetropolis",
    "RootMeanSquaredError",
    "RosenbrockError",
    "SNES",
    "SequentialEvaluator",
    "StoppingCriteria",
    "SumOfSquaresError",
    "TimeSeriesProblem",
    "TwistedGaussianTarget",
    "UniformLogPrior",
    "XNES",
    "as_parameter_vector",
    "autocorrelation",
    "curve_fit",
    "distribution_check",
    "effective_sample_size",
    "evaluator",
    "fmin",
    "generate_synthetic_data",
    "residuals",
    "rhat",
    "run_mcmc",
    "run_nested",
    "run_optimisation",
    "simulate",
]
