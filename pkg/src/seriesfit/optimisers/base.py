"""Ask-and-tell optimiser contract and shared state handling.

A method proposes a population of parameter vectors (``ask``), the caller
scores them however it likes (serially, in parallel, on another machine)
and hands the scores back (``tell``). All methods minimise; ``ask`` and
``tell`` must strictly alternate and the best-seen score never increases.
"""

from __future__ import annotations

import abc
import math

import numpy as np

from ..core import RandomSource, as_parameter_vector

__all__ = ["Optimiser", "StoppingCriteria"]


class StoppingCriteria:
    """Stopping rules for an optimisation run; at least one must be set.

    max_iterations: stop once this many ask/tell iterations have run.
    max_unchanged_iterations: stop after this many consecutive iterations
        in which the best score improved by less than ``unchanged_threshold``.
    target_score: stop as soon as the best (minimised) score reaches this.
    """

    def __init__(self, max_iterations=None, max_unchanged_iterations=None,
                 unchanged_threshold=1e-11, target_score=None):
        if max_iterations is None and max_unchanged_iterations is None \
                and target_score is None:
            raise ValueError("at least one stopping criterion must be set")
        if max_iterations is not None and int(max_iterations) < 0:
            raise ValueError("max_iterations must be non-negative")
        if max_unchanged_iterations is not None and int(max_unchanged_iterations) < 1:
            raise ValueError("max_unchanged_iterations must be positive")
        if unchanged_threshold < 0:
            raise ValueError("unchanged_threshold must be non-negative")
        self.max_iterations = None if max_iterations is None else int(max_iterations)
        self.max_unchanged_iterations = (
            None if max_unchanged_iterations is None else int(max_unchanged_iterations))
        self.unchanged_threshold = float(unchanged_threshold)
        self.target_score = None if target_score is None else float(target_score)

    def __repr__(self):
        parts = []
        if self.max_iterations is not None:
            parts.append(f"max_iterations={self.max_iterations}")
        if self.max_unchanged_iterations is not None:
            parts.append(f"max_unchanged_iterations={self.max_unchanged_iterations}")
            parts.append(f"unchanged_threshold={self.unchanged_threshold}")
        if self.target_score is not None:
            parts.append(f"target_score={self.target_score}")
        return f"StoppingCriteria({', '.join(parts)})"


class Optimiser(abc.ABC):
    """Base class for ask-and-tell minimisers.

    Subclasses implement ``_ask`` (return the population as an
    ``(m, n)`` array) and ``_tell`` (update internal state from the scores).
    The base class enforces the ask/tell alternation, validates score
    vectors and tracks the best point seen so far (strict improvement
    required, first seen wins on ties).
    """

    def __init__(self, x0, sigma0=0.1, rng=None):
        self._x0 = as_parameter_vector(x0)
        self._n = self._x0.shape[0]
        s = np.atleast_1d(np.asarray(sigma0, dtype=float))
        if s.shape == (1,):
            s = np.repeat(s, self._n)
        if s.shape != (self._n,):
            raise ValueError(f"sigma0 must be a scalar or length-{self._n} vector")
        if not np.all(np.isfinite(s)) or np.any(s <= 0):
            raise ValueError("sigma0 must be positive and finite")
        self._sigma0 = s
        self._rng = rng if rng is not None else RandomSource(0)
        self._awaiting_tell = False
        self._iteration = 0
        self._last_population = None
        self._best_point = None
        self._best_score = math.inf

    # -- protocol ---------------------------------------------------------

    def ask(self):
        """Return the next population of points to evaluate."""
        if self._awaiting_tell:
            raise RuntimeError("ask() called twice without an intervening tell()")
        xs = np.asarray(self._ask(), dtype=float)
        self._last_population = xs
        self._awaiting_tell = True
        return [xs[i].copy() for i in range(xs.shape[0])]

    def tell(self, scores):
        """Pass back one score per point from the last ask, in order."""
        if not self._awaiting_tell:
            raise RuntimeError("tell() called before ask()")
        f = np.asarray(scores, dtype=float)
        if f.shape != (self._last_population.shape[0],):
            raise ValueError(
                f"expected {self._last_population.shape[0]} scores, got shape {f.shape}")
        if np.any(np.isnan(f)):
            raise ValueError("scores must not contain NaN (use +inf for failures)")
        self._tell(f)
        for i, s in enumerate(f):
            if s < self._best_score:
                self._best_score = float(s)
                self._best_point = self._last_population[i].copy()
        self._iteration += 1
        self._awaiting_tell = False

    # -- subclass hooks ----------------------------------------------------

    @abc.abstractmethod
    def _ask(self):
        """Return the population to evaluate, shape ``(m, n_parameters)``."""

    @abc.abstractmethod
    def _tell(self, scores):
        """Update internal state from the scores of the last population."""

    @property
    @abc.abstractmethod
    def name(self):
        """Short lowercase method identifier (used in logs and the CLI)."""

    @property
    @abc.abstractmethod
    def population_size(self):
        """Number of points returned by each ask()."""

    def hyperparameters(self):
        """Method configuration recorded in run metadata."""
        return {"population_size": self.population_size}

    # -- inspection --------------------------------------------------------

    @property
    def n_parameters(self):
        return self._n

    @property
    def iteration(self):
        return self._iteration

    @property
    def best_point(self):
        return None if self._best_point is None else self._best_point.copy()

    @property
    def best_score(self):
        return self._best_score


def rank_order(scores):
    """Indices sorting scores ascending; stable, so ties keep ask order.

    Stability makes the proposal sequence of rank-based methods invariant
    under any strictly monotone transformation of the scores.
    """
    return np.argsort(scores, kind="stable")
