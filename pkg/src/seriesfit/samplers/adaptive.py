"""Adaptive-covariance Metropolis with global proposal scaling.

After a non-adaptive warm-up the proposal covariance is lambda * Sigma,
where Sigma tracks the chain's running covariance and the scalar lambda is
steered towards a 0.234 acceptance rate, both with the diminishing rate
gamma_t = (t + 1)^(-eta). This is the global-scaling variant in the spirit
of Haario-style adaptive Metropolis (Haario et al. 2001; Andrieu & Thoms
2008), using the acceptance *probability* rather than a binary outcome in
the scale update.
"""

from __future__ import annotations

import math

import numpy as np

from .base import MCMCSampler, as_proposal_covariance

__all__ = ["AdaptiveCovarianceMCMC"]


class AdaptiveCovarianceMCMC(MCMCSampler):
    """Metropolis sampler that learns its proposal covariance on the fly.

    For the first ``warmup`` steps proposals use ``initial_covariance``
    unchanged. From step ``warmup + 1`` on, step t proposes with
    ``lambda_t * Sigma_t + jitter * I`` and then updates, with
    ``gamma = (t + 1)**(-eta)`` and acceptance probability ``alpha``::

        mu     <- mu + gamma * (x - mu)
        Sigma  <- Sigma + gamma * ((x - mu)(x - mu)^T - Sigma)
        ln lam <- ln lam + gamma * (alpha - target_acceptance)

    where x is the chain position after the accept/reject step and the
    Sigma update uses the freshly updated mu.
    """

    def __init__(self, x0, initial_covariance=1.0, rng=None, warmup=100,
                 eta=0.6, target_acceptance=0.234, jitter=1e-9):
        super().__init__(x0, rng)
        cov = as_proposal_covariance(initial_covariance, self._n)
        try:
            self._initial_chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise ValueError("initial covariance must be positive definite") from e
        if not 0.5 < eta <= 1.0:
            raise ValueError("adaptation exponent eta must lie in (0.5, 1]")
        self._initial_cov = cov
        self._warmup = int(warmup)
        self._eta = float(eta)
        self._target = float(target_acceptance)
        self._jitter = float(jitter)
        self._mu = self._x0.copy()
        self._sigma_matrix = cov.copy()
        self._log_lambda = 0.0

    @property
    def name(self):
        return "adaptive"

    @property
    def adapted_mean(self):
        return self._mu.copy()

    @property
    def adapted_covariance(self):
        return self._sigma_matrix.copy()

    @property
    def proposal_scale(self):
        return math.exp(self._log_lambda)

    def hyperparameters(self):
        return {
            "warmup": self._warmup,
            "eta": self._eta,
            "target_acceptance": self._target,
            "jitter": self._jitter,
        }

    def _propose(self):
        if self._iteration < self._warmup:
            chol = self._initial_chol
        else:
            cov = math.exp(self._log_lambda) * self._sigma_matrix \
                + self._jitter * np.eye(self._n)
            chol = np.linalg.cholesky(cov)
        return self._current + chol @ self._rng.standard_normal(self._n)

    def _update(self, value):
        f = float(value)
        if math.isnan(f):
            f = -math.inf
        alpha = self.acceptance_probability(f - self._current_log_pdf)
        if self._rng.random() < alpha:
            self._current = self._proposed.copy()
            self._current_log_pdf = f
            self._record_acceptance()
        t = self._iteration  # already advanced; 1-based step number
        if t > self._warmup:
            gamma = (t + 1.0) ** (-self._eta)
            x = self._current
            self._mu = self._mu + gamma * (x - self._mu)
            d = x - self._mu
            self._sigma_matrix = self._sigma_matrix \
                + gamma * (np.outer(d, d) - self._sigma_matrix)
            self._log_lambda += gamma * (alpha - self._target)
