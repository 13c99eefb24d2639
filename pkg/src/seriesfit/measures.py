"""Error measures: scalar functions of parameters to minimise.

All shipped measures are built from model-vs-data residuals and return a
finite value or ``+inf`` (for failed or infeasible evaluations), never NaN.
:class:`ProbabilityBasedError` turns any log-density into an error measure
so that maximum-likelihood estimation can reuse the optimisers.
"""

from __future__ import annotations

import abc
import math

import numpy as np

from .core import EvaluationError, as_parameter_vector

__all__ = [
    "ErrorMeasure",
    "MeanSquaredError",
    "ProbabilityBasedError",
    "RootMeanSquaredError",
    "SumOfSquaresError",
]


class ErrorMeasure(abc.ABC):
    """Callable returning a score to minimise for a parameter vector."""

    @property
    @abc.abstractmethod
    def n_parameters(self):
        """Dimension of the parameter space."""

    @abc.abstractmethod
    def __call__(self, parameters):
        """Evaluate the measure; returns a finite float or ``+inf``."""


def _guard(value):
    # Measures may overflow to +inf but must never return NaN.
    v = float(value)
    return math.inf if math.isnan(v) else v


class _ProblemMeasure(ErrorMeasure):
    """Shared base for measures defined on a time-series problem."""

    def __init__(self, problem):
        self._problem = problem

    @property
    def problem(self):
        return self._problem

    @property
    def n_parameters(self):
        return self._problem.n_parameters

    def _sum_of_squares(self, parameters):
        x = as_parameter_vector(parameters, self._problem.n_parameters)
        r = self._problem.residuals(x)
        return float(np.sum(r * r))


class SumOfSquaresError(_ProblemMeasure):
    """Sum over all times and outputs of squared residuals."""

    def __call__(self, parameters):
        try:
            return _guard(self._sum_of_squares(parameters))
        except EvaluationError:
            return math.inf


class MeanSquaredError(_ProblemMeasure):
    """Sum of squared residuals divided by (number of times x outputs)."""

    def __call__(self, parameters):
        try:
            n = self._problem.n_times * self._problem.n_outputs
            return _guard(self._sum_of_squares(parameters) / n)
        except EvaluationError:
            return math.inf


class RootMeanSquaredError(_ProblemMeasure):
    """Square root of the mean squared error."""

    def __call__(self, parameters):
        try:
            n = self._problem.n_times * self._problem.n_outputs
            return _guard(math.sqrt(self._sum_of_squares(parameters) / n))
        except EvaluationError:
            return math.inf


class ProbabilityBasedError(ErrorMeasure):
    """Negated log-density, so that minimising it maximises the density.

    Points outside the density's support (log-density ``-inf``) map to
    ``+inf``, which the optimisers treat as infeasible-but-survivable.
    """

    def __init__(self, log_pdf):
        self._log_pdf = log_pdf

    @property
    def log_pdf(self):
        return self._log_pdf

    @property
    def n_parameters(self):
        return self._log_pdf.n_parameters

    def __call__(self, parameters):
        return _guard(-self._log_pdf(parameters))
