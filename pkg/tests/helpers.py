"""Shared test fixtures: tiny models and picklable score functions."""

import numpy as np

from seriesfit import ConstantModel, EvaluationError, ForwardModel, TimeSeriesProblem


class FailingModel(ForwardModel):
    """Raises on parameters with a negative first entry."""

    def __init__(self):
        super().__init__(n_parameters=1)

    def simulate(self, parameters, times):
        if parameters[0] < 0:
            raise EvaluationError("blew up", parameters=parameters)
        return np.full((len(times), 1), parameters[0])


class CountingLogPDF:
    """Wraps a log-density and counts evaluations."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    @property
    def n_parameters(self):
        return self.inner.n_parameters

    def __call__(self, parameters):
        self.calls += 1
        return self.inner(parameters)


def sphere(x):
    # module level so multiprocessing workers can pickle it
    return float(np.sum(np.asarray(x, dtype=float) ** 2))


def constant_problem(value, observations):
    """Single-output constant model with the given observations."""
    obs = np.asarray(observations, dtype=float)
    times = np.arange(float(len(obs)))
    problem = TimeSeriesProblem(ConstantModel(), times, obs)
    return problem, np.array([float(value)])
