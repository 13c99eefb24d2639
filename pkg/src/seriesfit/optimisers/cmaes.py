"""Covariance matrix adaptation evolution strategy (CMA-ES).

Implements the standard (mu/mu_w, lambda) CMA-ES with cumulative step-size
adaptation and rank-one plus rank-mu covariance updates, following the
defaults of Hansen's reference formulation. Only score *ranks* enter the
update, so the proposal sequence is invariant under strictly monotone
transformations of the score.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Optimiser, rank_order

__all__ = ["CMAES"]


class CMAES(Optimiser):
    """CMA-ES minimiser with default population 4 + floor(3 ln n).

    The search distribution is N(m, sigma^2 C), started at ``x0`` with
    per-coordinate standard deviation ``sigma0``: the scalar step size is
    the geometric mean of ``sigma0`` and C starts as the matching diagonal.
    """

    def __init__(self, x0, sigma0=0.1, population_size=None, rng=None):
        super().__init__(x0, sigma0, rng)
        n = self._n
        lam = int(population_size) if population_size else 4 + int(3 * math.log(n))
        if lam < 2:
            raise ValueError("population size must be at least 2")
        mu = lam // 2
        w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1))
        w /= np.sum(w)
        mueff = 1.0 / float(np.sum(w ** 2))

        self._lam = lam
        self._mu = mu
        self._weights = w
        self._mueff = mueff
        self._cc = (4.0 + mueff / n) / (n + 4.0 + 2.0 * mueff / n)
        self._cs = (mueff + 2.0) / (n + mueff + 5.0)
        self._c1 = 2.0 / ((n + 1.3) ** 2 + mueff)
        self._cmu = min(
            1.0 - self._c1,
            2.0 * (mueff - 2.0 + 1.0 / mueff) / ((n + 2.0) ** 2 + mueff))
        self._damps = 1.0 + 2.0 * max(0.0, math.sqrt((mueff - 1.0) / (n + 1.0)) - 1.0) \
            + self._cs
        self._chi_n = math.sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n))

        self._mean = self._x0.copy()
        self._sigma = float(np.exp(np.mean(np.log(self._sigma0))))
        self._cov = np.diag((self._sigma0 / self._sigma) ** 2)
        self._p_sigma = np.zeros(n)
        self._p_c = np.zeros(n)
        self._eigen_stale = True
        self._last_y = None

    @property
    def name(self):
        return "cmaes"

    @property
    def population_size(self):
        return self._lam

    @property
    def mean(self):
        return self._mean.copy()

    @property
    def step_size(self):
        return self._sigma

    @property
    def covariance(self):
        return self._cov.copy()

    @property
    def evolution_paths(self):
        return self._p_sigma.copy(), self._p_c.copy()

    def hyperparameters(self):
        return {
            "population_size": self._lam,
            "mu": self._mu,
            "c_c": self._cc,
            "c_sigma": self._cs,
            "c_1": self._c1,
            "c_mu": self._cmu,
            "damping": self._damps,
        }

    def _decompose(self):
        if self._eigen_stale:
            vals, vecs = np.linalg.eigh(self._cov)
            self._d = np.sqrt(np.maximum(vals, 1e-300))
            self._b = vecs
            self._eigen_stale = False

    def _ask(self):
        self._decompose()
        z = self._rng.standard_normal((self._lam, self._n))
        self._last_y = (z * self._d) @ self._b.T
        return self._mean + self._sigma * self._last_y

    def _tell(self, scores):
        order = rank_order(scores)
        y_sel = self._last_y[order[: self._mu]]
        y_w = self._weights @ y_sel

        cs, cc = self._cs, self._cc
        # C^(-1/2) y_w, using the cached eigendecomposition
        c_inv_half_y = self._b @ ((self._b.T @ y_w) / self._d)
        self._p_sigma = (1.0 - cs) * self._p_sigma \
            + math.sqrt(cs * (2.0 - cs) * self._mueff) * c_inv_half_y
        norm_ps = float(np.linalg.norm(self._p_sigma))

        t = self._iteration + 1
        h_sigma = norm_ps / math.sqrt(1.0 - (1.0 - cs) ** (2 * t)) / self._chi_n \
            < 1.4 + 2.0 / (self._n + 1.0)
        self._p_c = (1.0 - cc) * self._p_c \
            + h_sigma * math.sqrt(cc * (2.0 - cc) * self._mueff) * y_w

        rank_one = np.outer(self._p_c, self._p_c)
        if not h_sigma:
            rank_one = rank_one + cc * (2.0 - cc) * self._cov
        rank_mu = (y_sel.T * self._weights) @ y_sel
        self._cov = (1.0 - self._c1 - self._cmu) * self._cov \
            + self._c1 * rank_one + self._cmu * rank_mu
        self._cov = 0.5 * (self._cov + self._cov.T)

        self._mean = self._mean + self._sigma * y_w
        self._sigma *= math.exp((cs / self._damps) * (norm_ps / self._chi_n - 1.0))
        self._eigen_stale = True
