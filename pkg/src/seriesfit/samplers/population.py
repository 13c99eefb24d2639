"""Population MCMC: tempered parallel chains with exchange moves.

K internal chains target the tempered densities

    pi_i(x) = beta_i * loglik(x) + logprior(x),   0 = beta_1 < ... < beta_K = 1

where loglik = log_pdf - log_prior. Each step performs one Metropolis
update on a uniformly chosen chain, then proposes one swap between a
uniformly chosen adjacent pair, accepted with probability
min(1, exp((beta_{i+1} - beta_i) * (loglik(x_i) - loglik(x_{i+1})))).
Only the beta = 1 chain's history is the returned sample stream.
"""

from __future__ import annotations

import math

import numpy as np

from .base import MCMCSampler, as_proposal_covariance

__all__ = ["PopulationMCMC"]


class PopulationMCMC(MCMCSampler):
    """Tempered-chain sampler; tell() takes a (log_pdf, log_prior) pair.

    ``betas`` defaults to K uniformly spaced inverse temperatures on
    [0, 1] with K = ``n_temperatures``; at least two chains are required.
    All internal chains start from ``x0``.
    """

    needs_log_prior = True

    def __init__(self, x0, proposal_covariance=1.0, rng=None,
                 n_temperatures=10, betas=None):
        super().__init__(x0, rng)
        if betas is None:
            k = int(n_temperatures)
            if k < 2:
                raise ValueError("population MCMC needs at least 2 temperatures")
            betas = np.linspace(0.0, 1.0, k)
        else:
            betas = np.asarray(betas, dtype=float)
            if betas.ndim != 1 or betas.shape[0] < 2:
                raise ValueError("population MCMC needs at least 2 temperatures")
            if np.any(np.diff(betas) < 0):
                raise ValueError("inverse temperatures must be non-decreasing")
        self._betas = betas
        self._k = betas.shape[0]
        cov = as_proposal_covariance(proposal_covariance, self._n)
        try:
            self._chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise ValueError("proposal covariance must be positive definite") from e
        self._cov = cov
        self._points = None
        self._logliks = None
        self._logpriors = None
        self._logpdfs = None
        self._pending_chain = None
        self._swap_attempts = 0
        self._swap_accepts = 0

    @property
    def name(self):
        return "population"

    @property
    def betas(self):
        return self._betas.copy()

    @property
    def n_temperatures(self):
        return self._k

    @property
    def chain_points(self):
        """Current positions of all tempered chains, shape (K, n)."""
        return None if self._points is None else self._points.copy()

    @property
    def swap_acceptance_rate(self):
        return self._swap_accepts / self._swap_attempts if self._swap_attempts else 0.0

    def hyperparameters(self):
        return {
            "n_temperatures": self._k,
            "betas": self._betas.tolist(),
            "proposal_covariance": self._cov.tolist(),
        }

    def _unpack(self, value):
        try:
            log_pdf, log_prior = value
        except (TypeError, ValueError):
            raise TypeError(
                "population MCMC tell() expects a (log_pdf, log_prior) pair") from None
        log_pdf = float(log_pdf)
        log_prior = float(log_prior)
        if math.isnan(log_pdf):
            log_pdf = -math.inf
        if math.isnan(log_prior):
            log_prior = -math.inf
        return log_pdf, log_prior

    def _set_initial(self, value):
        log_pdf, log_prior = self._unpack(value)
        if not math.isfinite(log_pdf) or not math.isfinite(log_prior):
            raise ValueError("starting point has non-finite log-density")
        self._points = np.tile(self._x0, (self._k, 1))
        self._logliks = np.full(self._k, log_pdf - log_prior)
        self._logpriors = np.full(self._k, log_prior)
        self._logpdfs = np.full(self._k, log_pdf)
        self._current = self._x0.copy()
        self._current_log_pdf = log_pdf

    def _propose(self):
        k = int(self._rng.integers(self._k))
        self._pending_chain = k
        z = self._rng.standard_normal(self._n)
        return self._points[k] + self._chol @ z

    def _tempered(self, k, loglik, logprior):
        if logprior == -math.inf:
            return -math.inf
        # beta = 0 chains target the prior alone, even at zero likelihood
        scaled = 0.0 if self._betas[k] == 0.0 else self._betas[k] * loglik
        v = scaled + logprior
        return -math.inf if math.isnan(v) else v

    def _update(self, value):
        log_pdf, log_prior = self._unpack(value)
        k = self._pending_chain
        loglik = log_pdf - log_prior if log_prior > -math.inf else math.nan
        delta = self._tempered(k, loglik, log_prior) \
            - self._tempered(k, self._logliks[k], self._logpriors[k])
        alpha = 0.0 if math.isnan(delta) or log_prior == -math.inf \
            else self.acceptance_probability(delta)
        if self._rng.random() < alpha:
            self._points[k] = self._proposed
            self._logliks[k] = loglik
            self._logpriors[k] = log_prior
            self._logpdfs[k] = log_pdf
            self._record_acceptance()

        # one proposed exchange between a uniformly chosen adjacent pair
        j = int(self._rng.integers(self._k - 1))
        swap_delta = (self._betas[j + 1] - self._betas[j]) \
            * (self._logliks[j] - self._logliks[j + 1])
        self._swap_attempts += 1
        if self._rng.random() < self.acceptance_probability(swap_delta):
            self._swap_accepts += 1
            for arr in (self._points, self._logliks, self._logpriors, self._logpdfs):
                arr[[j, j + 1]] = arr[[j + 1, j]]

        self._current = self._points[-1].copy()
        self._current_log_pdf = float(self._logpdfs[-1])
