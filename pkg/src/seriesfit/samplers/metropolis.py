"""Random-walk Metropolis with a fixed Gaussian proposal."""

from __future__ import annotations

import math

import numpy as np

from .base import MCMCSampler, as_proposal_covariance

__all__ = ["RandomWalkMetropolis"]


class RandomWalkMetropolis(MCMCSampler):
    """Metropolis sampler proposing x' = x + N(0, proposal_covariance).

    A proposal is accepted with probability min(1, exp(logp(x') - logp(x)));
    proposals with zero density are always rejected. Scalars and vectors
    passed as ``proposal_covariance`` are per-coordinate variances.
    """

    def __init__(self, x0, proposal_covariance=1.0, rng=None):
        super().__init__(x0, rng)
        cov = as_proposal_covariance(proposal_covariance, self._n)
        try:
            self._chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise ValueError("proposal covariance must be positive definite") from e
        self._cov = cov

    @property
    def name(self):
        return "metropolis"

    @property
    def proposal_covariance(self):
        return self._cov.copy()

    def hyperparameters(self):
        return {"proposal_covariance": self._cov.tolist()}

    def _propose(self):
        z = self._rng.standard_normal(self._n)
        return self._current + self._chol @ z

    def _update(self, value):
        f = float(value)
        if math.isnan(f):
            f = -math.inf
        alpha = self.acceptance_probability(f - self._current_log_pdf)
        if self._rng.random() < alpha:
            self._current = self._proposed.copy()
            self._current_log_pdf = f
            self._record_acceptance()
