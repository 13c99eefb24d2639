"""Log-densities over parameters: likelihoods, priors and posteriors.

All densities work on the natural-log scale and are unnormalised by
contract (the shipped priors happen to be normalised, which nested
sampling's evidence estimate relies on). Evaluations return a finite float
or ``-inf`` (zero density); never NaN, never ``+inf``.
"""

from __future__ import annotations

import abc
import math

import numpy as np

from .core import EvaluationError, as_parameter_vector

__all__ = [
    "ComposedLogPrior",
    "GaussianLogLikelihood",
    "GaussianLogLikelihoodUnknownSigma",
    "GaussianLogPrior",
    "LogPDF",
    "LogPosterior",
    "UniformLogPrior",
]

_LOG_2PI = math.log(2.0 * math.pi)


class LogPDF(abc.ABC):
    """Callable log-density over an n-dimensional parameter space."""

    @property
    @abc.abstractmethod
    def n_parameters(self):
        """Dimension of the parameter space."""

    @abc.abstractmethod
    def __call__(self, parameters):
        """Natural-log density; finite or ``-inf``, never NaN or ``+inf``."""

    def evaluate_batch(self, points):
        """Evaluate many points at once, shape (m, n) -> (m,).

        The default loops over :meth:`__call__`; subclasses with a cheap
        vectorised form override it. Semantics per point are identical to
        single evaluation.
        """
        return np.array([self(p) for p in np.asarray(points, dtype=float)])


def _guard(value):
    # Shipped densities must never leak NaN; map it to zero density.
    v = float(value)
    return -math.inf if math.isnan(v) else v


def _gaussian_data_log_likelihood(residuals, sigmas):
    """I.i.d. Gaussian log-likelihood of residuals, one sigma per output.

    Per output j with N time points:
        -(N/2) ln(2 pi) - N ln(sigma_j) - SSE_j / (2 sigma_j**2)
    written with ln(sigma) rather than ln(sigma**2) so extreme sigmas do
    not underflow, and with the SSE term forced to zero for an exact fit.
    """
    n = residuals.shape[0]
    total = 0.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for j, s in enumerate(sigmas):
            sse = float(np.sum(residuals[:, j] ** 2))
            term = 0.0 if sse == 0.0 else sse / (2.0 * s * s)
            if math.isnan(term):  # inf/inf from extreme residual overflow
                term = math.inf
            total += -0.5 * n * _LOG_2PI - n * math.log(s) - term
    return total


class GaussianLogLikelihood(LogPDF):
    """Gaussian likelihood of a time-series problem with known noise.

    ``sigma`` is the noise standard deviation, one value per model output
    (a scalar is broadcast). Parameters are the model parameters only.
    """

    def __init__(self, problem, sigma):
        self._problem = problem
        s = np.atleast_1d(np.asarray(sigma, dtype=float))
        if s.shape == (1,) and problem.n_outputs > 1:
            s = np.repeat(s, problem.n_outputs)
        if s.shape != (problem.n_outputs,):
            raise ValueError(
                f"expected {problem.n_outputs} noise values, got shape {s.shape}")
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise ValueError("noise standard deviations must be finite and positive")
        self._sigma = s

    @property
    def problem(self):
        return self._problem

    @property
    def sigma(self):
        return self._sigma.copy()

    @property
    def n_parameters(self):
        return self._problem.n_parameters

    def __call__(self, parameters):
        x = as_parameter_vector(parameters, self.n_parameters)
        try:
            r = self._problem.residuals(x)
        except EvaluationError:
            return -math.inf
        return _guard(_gaussian_data_log_likelihood(r, self._sigma))


class GaussianLogLikelihoodUnknownSigma(LogPDF):
    """Gaussian likelihood with the noise levels inferred jointly.

    The parameter vector is the model parameters followed by one noise
    standard deviation per output, appended in output order. Non-positive
    noise values are outside the support and return ``-inf``.
    """

    def __init__(self, problem):
        self._problem = problem

    @property
    def problem(self):
        return self._problem

    @property
    def n_parameters(self):
        return self._problem.n_parameters + self._problem.n_outputs

    def __call__(self, parameters):
        x = as_parameter_vector(parameters, self.n_parameters)
        nm = self._problem.n_parameters
        sigmas = x[nm:]
        if np.any(sigmas <= 0):
            return -math.inf
        try:
            r = self._problem.residuals(x[:nm])
        except EvaluationError:
            return -math.inf
        return _guard(_gaussian_data_log_likelihood(r, sigmas))


class UniformLogPrior(LogPDF):
    """Uniform density over an axis-aligned box.

    The support is closed at the lower edge and open at the upper edge, so
    direct sampling via ``lower + u * (upper - lower)`` with ``u in [0, 1)``
    is exact. Inside the box the value is ``-ln(volume)``; the prior is
    normalised.
    """

    def __init__(self, lower, upper):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("lower and upper bounds must be 1-d and equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("bounds must be finite")
        if not np.all(lo < hi):
            raise ValueError("every lower bound must be below its upper bound")
        self._lower = lo
        self._upper = hi
        self._log_volume = float(np.sum(np.log(hi - lo)))

    @property
    def lower(self):
        return self._lower.copy()

    @property
    def upper(self):
        return self._upper.copy()

    @property
    def n_parameters(self):
        return self._lower.shape[0]

    def __call__(self, parameters):
        x = as_parameter_vector(parameters, self.n_parameters)
        if np.all(x >= self._lower) and np.all(x < self._upper):
            return -self._log_volume
        return -math.inf

    def evaluate_batch(self, points):
        x = np.asarray(points, dtype=float)
        inside = np.all((x >= self._lower) & (x < self._upper), axis=1)
        return np.where(inside, -self._log_volume, -math.inf)

    def sample(self, rng, n=1):
        """Draw ``n`` points uniformly from the box, shape ``(n, d)``."""
        u = rng.random((int(n), self.n_parameters))
        return self._lower + u * (self._upper - self._lower)


class GaussianLogPrior(LogPDF):
    """Multivariate normal density (normalised, exact).

    ``covariance`` must be symmetric positive definite; this is checked at
    construction via a Cholesky factorisation.
    """

    def __init__(self, mean, covariance):
        m = np.atleast_1d(np.asarray(mean, dtype=float))
        c = np.atleast_2d(np.asarray(covariance, dtype=float))
        if m.ndim != 1 or c.shape != (m.shape[0], m.shape[0]):
            raise ValueError("mean must be 1-d and covariance square of matching size")
        if not np.allclose(c, c.T):
            raise ValueError("covariance must be symmetric")
        try:
            chol = np.linalg.cholesky(c)
        except np.linalg.LinAlgError as e:
            raise ValueError("covariance must be positive definite") from e
        self._mean = m
        self._covariance = c
        self._chol = chol
        d = m.shape[0]
        self._log_norm = -0.5 * d * _LOG_2PI - float(np.sum(np.log(np.diag(chol))))

    @property
    def mean(self):
        return self._mean.copy()

    @property
    def covariance(self):
        return self._covariance.copy()

    @property
    def n_parameters(self):
        return self._mean.shape[0]

    def __call__(self, parameters):
        x = as_parameter_vector(parameters, self.n_parameters)
        with np.errstate(over="ignore", invalid="ignore"):
            z = np.linalg.solve(self._chol, x - self._mean)
            return _guard(self._log_norm - 0.5 * float(z @ z))

    def evaluate_batch(self, points):
        x = np.asarray(points, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            z = np.linalg.solve(self._chol, (x - self._mean).T)
            out = self._log_norm - 0.5 * np.einsum("ij,ij->j", z, z)
        return np.where(np.isnan(out), -math.inf, out)

    def sample(self, rng, n=1):
        z = rng.standard_normal((int(n), self.n_parameters))
        return self._mean + z @ self._chol.T


class ComposedLogPrior(LogPDF):
    """Joint prior built from independent lower-dimensional components.

    Component densities are evaluated on consecutive slices of the
    parameter vector and summed; any component outside its support makes
    the joint value ``-inf``.
    """

    def __init__(self, *priors):
        if not priors:
            raise ValueError("at least one component prior is required")
        self._priors = tuple(priors)
        self._slices = []
        start = 0
        for p in self._priors:
            stop = start + p.n_parameters
            self._slices.append(slice(start, stop))
            start = stop
        self._n_parameters = start

    @property
    def components(self):
        return self._priors

    @property
    def n_parameters(self):
        return self._n_parameters

    def __call__(self, parameters):
        x = as_parameter_vector(parameters, self._n_parameters)
        total = 0.0
        for p, s in zip(self._priors, self._slices):
            v = p(x[s])
            if v == -math.inf:
                return -math.inf
            total += v
        return _guard(total)

    def sample(self, rng, n=1):
        parts = []
        for p in self._priors:
            if not hasattr(p, "sample"):
                raise TypeError(
                    f"component {type(p).__name__} does not support direct sampling")
            parts.append(np.atleast_2d(p.sample(rng, n)))
        return np.hstack(parts)


class LogPosterior(LogPDF):
    """Sum of a log-likelihood and a log-prior of the same dimension.

    The prior is evaluated first and the likelihood is skipped when the
    prior is ``-inf``, so expensive simulations never run outside the
    prior support.
    """

    def __init__(self, log_likelihood, log_prior):
        if log_likelihood.n_parameters != log_prior.n_parameters:
            raise ValueError(
                f"likelihood dimension {log_likelihood.n_parameters} does not match "
                f"prior dimension {log_prior.n_parameters}")
        self._log_likelihood = log_likelihood
        self._log_prior = log_prior

    @property
    def log_likelihood(self):
        return self._log_likelihood

    @property
    def log_prior(self):
        return self._log_prior

    @property
    def n_parameters(self):
        return self._log_prior.n_parameters

    def __call__(self, parameters):
        p = self._log_prior(parameters)
        if p == -math.inf:
            return -math.inf
        return _guard(p + self._log_likelihood(parameters))
