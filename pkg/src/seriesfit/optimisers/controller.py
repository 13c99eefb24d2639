"""Optimisation controller: drives ask/tell loops to a stopping criterion.

The controller owns everything outside the method itself: evaluating the
starting point, scoring populations (optionally across worker processes),
negating log-densities so every method minimises, bookkeeping of the best
point, per-iteration logging and the stopping rules.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..core import RandomSource, as_parameter_vector
from ..densities import LogPDF
from ..evaluation import evaluator
from ..measures import ProbabilityBasedError
from .base import Optimiser, StoppingCriteria
from .cmaes import CMAES
from .nes import SNES, XNES
from .pso import PSO

__all__ = [
    "OPTIMISER_METHODS",
    "OptimisationResult",
    "curve_fit",
    "fmin",
    "run_optimisation",
]

OPTIMISER_METHODS = {
    "cmaes": CMAES,
    "xnes": XNES,
    "snes": SNES,
    "pso": PSO,
}


@dataclass
class OptimisationResult:
    """Outcome of a controller run.

    ``best_score`` is on the minimisation scale: for a log-density target
    (``maximising=True``) it equals minus the best log-density found.
    ``log_records`` holds one ``(iteration, evaluations, best_score)``
    tuple per iteration, starting with the iteration-0 baseline.
    """

    best_parameters: np.ndarray
    best_score: float
    iterations: int
    evaluations: int
    stop_reason: str
    log_records: list
    seed: int
    method: str
    maximising: bool
    metadata: dict = field(default_factory=dict)

    @property
    def best_target_value(self):
        """Best score on the caller's scale (log-density if maximising)."""
        return -self.best_score if self.maximising else self.best_score


def resolve_method(method):
    """Map a method name or Optimiser subclass to the class to use."""
    if isinstance(method, str):
        try:
            return OPTIMISER_METHODS[method.lower()]
        except KeyError:
            raise ValueError(
                f"unknown optimiser {method!r}; "
                f"choose from {sorted(OPTIMISER_METHODS)}") from None
    if isinstance(method, type) and issubclass(method, Optimiser):
        return method
    raise TypeError("method must be a name or an Optimiser subclass")


def run_optimisation(score, x0, sigma0=0.1, method="cmaes", criteria=None,
                     workers=1, sink=None, seed=0, method_options=None):
    """Minimise ``score`` (or maximise it, if it is a :class:`LogPDF`).

    Loops ask -> evaluate -> tell until one of the stopping criteria in
    ``criteria`` fires. The starting point is evaluated once before the
    loop so a zero-iteration budget still returns a scored ``x0``.
    Evaluation failures score ``+inf`` and the run continues.

    ``sink``, if given, receives one record per iteration:
    ``(iteration, evaluations, best_score, seconds)``.
    """
    if criteria is None:
        raise ValueError("stopping criteria are required")
    if not isinstance(criteria, StoppingCriteria):
        raise TypeError("criteria must be a StoppingCriteria instance")
    x0 = as_parameter_vector(x0)
    maximising = isinstance(score, LogPDF)
    target = ProbabilityBasedError(score) if maximising else score

    cls = resolve_method(method)
    rng = RandomSource(seed)
    opt = cls(x0, sigma0, rng=rng, **(method_options or {}))

    records = []
    start = time.perf_counter()

    def log(iteration, evaluations, best):
        records.append((iteration, evaluations, best))
        if sink is not None:
            sink((iteration, evaluations, best, time.perf_counter() - start))

    with evaluator(target, workers) as ev:
        best_score = ev.evaluate([x0])[0]
        best_point = x0.copy()
        evaluations = 1
        iteration = 0
        unchanged = 0
        log(iteration, evaluations, best_score)

        while True:
            if criteria.max_iterations is not None \
                    and iteration >= criteria.max_iterations:
                stop_reason = "max_iterations"
                break
            if criteria.target_score is not None \
                    and best_score <= criteria.target_score:
                stop_reason = "target_score"
                break
            if criteria.max_unchanged_iterations is not None \
                    and unchanged >= criteria.max_unchanged_iterations:
                stop_reason = "max_unchanged_iterations"
                break

            population = opt.ask()
            scores = ev.evaluate(population)
            opt.tell(scores)
            iteration += 1
            evaluations += len(population)

            previous = best_score
            if opt.best_score < best_score:
                best_score = opt.best_score
                best_point = opt.best_point
            improvement = 0.0 if previous == best_score else previous - best_score
            unchanged = unchanged + 1 \
                if improvement < criteria.unchanged_threshold else 0
            log(iteration, evaluations, best_score)

    return OptimisationResult(
        best_parameters=best_point,
        best_score=best_score,
        iterations=iteration,
        evaluations=evaluations,
        stop_reason=stop_reason,
        log_records=records,
        seed=int(seed),
        method=opt.name,
        maximising=maximising,
        metadata={
            "method": opt.name,
            "hyperparameters": opt.hyperparameters(),
            "generator": RandomSource.ALGORITHM,
            "sigma0": np.atleast_1d(np.asarray(sigma0, dtype=float)).tolist(),
            "workers": int(workers),
        },
    )


_DEFAULT_CRITERIA = dict(max_iterations=10000, max_unchanged_iterations=200)


def fmin(function, x0, sigma0=0.1, method="cmaes", criteria=None, seed=0,
         workers=1):
    """Minimise an arbitrary scalar function; returns (best point, best score).

    Thin convenience wrapper over :func:`run_optimisation` for callables
    that are not built from a time-series problem.
    """
    if criteria is None:
        criteria = StoppingCriteria(**_DEFAULT_CRITERIA)
    result = run_optimisation(function, x0, sigma0, method=method,
                              criteria=criteria, seed=seed, workers=workers)
    return result.best_parameters, result.best_score


class _FunctionSumOfSquares:
    """Sum of squared differences between function(times, p) and data."""

    def __init__(self, function, times, observations):
        self._function = function
        self._times = np.asarray(times, dtype=float)
        obs = np.asarray(observations, dtype=float)
        if obs.ndim == 1:
            obs = obs.reshape(-1, 1)
        if obs.shape[0] != self._times.shape[0]:
            raise ValueError("observations and times have different lengths")
        self._observations = obs

    def __call__(self, parameters):
        y = np.asarray(self._function(self._times, parameters), dtype=float)
        if y.ndim == 1:
            y = y.reshape(-1, 1)
        if y.shape != self._observations.shape:
            raise ValueError(
                f"function returned shape {y.shape}, "
                f"expected {self._observations.shape}")
        r = y - self._observations
        return float(np.sum(r * r))


def curve_fit(function, times, observations, x0, sigma0=0.1, method="cmaes",
              criteria=None, seed=0, workers=1):
    """Fit ``function(times, params)`` to observations by least squares.

    Returns the best parameter vector found.
    """
    if criteria is None:
        criteria = StoppingCriteria(**_DEFAULT_CRITERIA)
    score = _FunctionSumOfSquares(function, times, observations)
    result = run_optimisation(score, x0, sigma0, method=method,
                              criteria=criteria, seed=seed, workers=workers)
    return result.best_parameters
