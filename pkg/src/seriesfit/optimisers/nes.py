"""Natural evolution strategies: full-covariance (xNES) and separable (SNES).

Both methods move a Gaussian search distribution along the natural
gradient of a rank-based utility. xNES adapts a full shape matrix (unit
determinant, with a separate scalar scale); SNES keeps one standard
deviation per coordinate, trading adaptation power for O(n) updates.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Optimiser, rank_order

__all__ = ["SNES", "XNES"]


def log_rank_utilities(population_size):
    """Zero-sum utility weights from log-rank shaping (best rank first)."""
    ranks = np.arange(1, population_size + 1)
    u = np.maximum(0.0, np.log(population_size / 2.0 + 1.0) - np.log(ranks))
    return u / np.sum(u) - 1.0 / population_size


def default_shape_learning_rate(n):
    # (9 + 3 ln n) / (5 n sqrt(n)); mean learning rate stays at 1.
    return (9.0 + 3.0 * math.log(n)) / (5.0 * n * math.sqrt(n))


def _expm_symmetric(a):
    vals, vecs = np.linalg.eigh(a)
    return (vecs * np.exp(vals)) @ vecs.T


class _NESBase(Optimiser):
    def __init__(self, x0, sigma0=0.1, population_size=None, rng=None,
                 mean_learning_rate=1.0, shape_learning_rate=None):
        super().__init__(x0, sigma0, rng)
        lam = int(population_size) if population_size \
            else 4 + int(3 * math.log(self._n))
        if lam < 2:
            raise ValueError("population size must be at least 2")
        self._lam = lam
        self._utilities = log_rank_utilities(lam)
        self._eta_mean = float(mean_learning_rate)
        self._eta_shape = float(shape_learning_rate) if shape_learning_rate \
            else default_shape_learning_rate(self._n)
        self._mean = self._x0.copy()
        self._last_z = None

    @property
    def population_size(self):
        return self._lam

    @property
    def mean(self):
        return self._mean.copy()

    def hyperparameters(self):
        return {
            "population_size": self._lam,
            "mean_learning_rate": self._eta_mean,
            "shape_learning_rate": self._eta_shape,
        }


class XNES(_NESBase):
    """Exponential natural evolution strategy with a full shape matrix.

    The search distribution is N(mean, (sigma B)(sigma B)^T) where B has
    unit determinant; the multiplicative exponential-map updates keep the
    covariance symmetric positive definite by construction.
    """

    def __init__(self, x0, sigma0=0.1, population_size=None, rng=None,
                 mean_learning_rate=1.0, shape_learning_rate=None):
        super().__init__(x0, sigma0, population_size, rng,
                         mean_learning_rate, shape_learning_rate)
        self._sigma = float(np.exp(np.mean(np.log(self._sigma0))))
        self._shape = np.diag(self._sigma0 / self._sigma)
        self._identity = np.eye(self._n)

    @property
    def name(self):
        return "xnes"

    @property
    def step_size(self):
        return self._sigma

    @property
    def shape_matrix(self):
        return self._shape.copy()

    @property
    def covariance(self):
        a = self._sigma * self._shape
        return a @ a.T

    def _ask(self):
        self._last_z = self._rng.standard_normal((self._lam, self._n))
        return self._mean + self._sigma * (self._last_z @ self._shape.T)

    def _tell(self, scores):
        u = self._utilities
        z = self._last_z[rank_order(scores)]
        grad_mean = u @ z
        grad_m = (z.T * u) @ z - float(np.sum(u)) * self._identity
        grad_sigma = float(np.trace(grad_m)) / self._n
        grad_shape = grad_m - grad_sigma * self._identity

        self._mean = self._mean \
            + self._eta_mean * self._sigma * (self._shape @ grad_mean)
        self._sigma *= math.exp(0.5 * self._eta_shape * grad_sigma)
        self._shape = self._shape @ _expm_symmetric(0.5 * self._eta_shape * grad_shape)


class SNES(_NESBase):
    """Separable natural evolution strategy (one std per coordinate)."""

    def __init__(self, x0, sigma0=0.1, population_size=None, rng=None,
                 mean_learning_rate=1.0, shape_learning_rate=None):
        super().__init__(x0, sigma0, population_size, rng,
                         mean_learning_rate, shape_learning_rate)
        self._scales = self._sigma0.copy()

    @property
    def name(self):
        return "snes"

    @property
    def scales(self):
        return self._scales.copy()

    def _ask(self):
        self._last_z = self._rng.standard_normal((self._lam, self._n))
        return self._mean + self._scales * self._last_z

    def _tell(self, scores):
        u = self._utilities
        z = self._last_z[rank_order(scores)]
        grad_mean = u @ z
        grad_scale = u @ (z * z - 1.0)
        self._mean = self._mean + self._eta_mean * self._scales * grad_mean
        self._scales = self._scales * np.exp(0.5 * self._eta_shape * grad_scale)
