"""Derivative-free ask-and-tell optimisers and the optimisation controller."""

from .base import Optimiser, StoppingCriteria
from .cmaes import CMAES
from .controller import (
    OPTIMISER_METHODS,
    OptimisationResult,
    curve_fit,
    fmin,
    run_optimisation,
)
from .nes import SNES, XNES
from .pso import PSO

__all__ = [
    "CMAES",
    "OPTIMISER_METHODS",
    "OptimisationResult",
    "Optimiser",
    "PSO",
    "SNES",
    "StoppingCriteria",
    "XNES",
    "curve_fit",
    "fmin",
    "run_optimisation",
]
