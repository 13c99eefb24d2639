"""Ask-and-tell contract for single-chain MCMC samplers.

The very first ask() returns the starting point itself so the caller can
score it; from then on each ask() proposes one point and the matching
tell() performs the accept/reject step and returns the new chain position.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import RandomSource, as_parameter_vector

__all__ = ["MCMCSampler", "as_proposal_covariance"]


def as_proposal_covariance(value, n):
    """Coerce a scalar/vector/matrix into an (n, n) covariance matrix.

    Scalars and vectors are interpreted as per-coordinate *variances*.
    """
    c = np.asarray(value, dtype=float)
    if c.ndim == 0:
        c = np.full(n, float(c))
    if c.ndim == 1:
        if c.shape != (n,):
            raise ValueError(f"expected {n} proposal variances, got {c.shape[0]}")
        c = np.diag(c)
    if c.shape != (n, n):
        raise ValueError(f"proposal covariance must be {n}x{n}, got {c.shape}")
    if not np.all(np.isfinite(c)):
        raise ValueError("proposal covariance contains non-finite values")
    return c


class MCMCSampler:
    """Base class enforcing the ask/tell alternation and chain bookkeeping.

    Subclasses implement ``_propose()`` and ``_update(value)``; ``_update``
    runs after the iteration counter has been advanced and must set
    ``self._current`` / ``self._current_log_pdf`` and call
    ``self._record_acceptance()`` when a move is accepted.
    """

    #: set by samplers whose tell() needs (log_pdf, log_prior) pairs
    needs_log_prior = False

    def __init__(self, x0, rng=None):
        self._x0 = as_parameter_vector(x0)
        self._n = self._x0.shape[0]
        self._rng = rng if rng is not None else RandomSource(0)
        self._current = None
        self._current_log_pdf = None
        self._iteration = 0
        self._accepted = 0
        self._awaiting_tell = False
        self._initialised = False
        self._proposed = None

    # -- protocol ----------------------------------------------------------

    def ask(self):
        if self._awaiting_tell:
            raise RuntimeError("ask() called twice without an intervening tell()")
        if not self._initialised:
            proposal = self._x0
        else:
            proposal = self._propose()
        self._proposed = np.asarray(proposal, dtype=float)
        self._awaiting_tell = True
        return self._proposed.copy()

    def tell(self, value):
        if not self._awaiting_tell:
            raise RuntimeError("tell() called before ask()")
        self._awaiting_tell = False
        if not self._initialised:
            self._set_initial(value)
            self._initialised = True
        else:
            self._iteration += 1
            self._update(value)
        return self._current.copy()

    # -- subclass hooks ----------------------------------------------------

    def _set_initial(self, value):
        f = float(value)
        if not math.isfinite(f):
            raise ValueError("starting point has non-finite log-density")
        self._current = self._x0.copy()
        self._current_log_pdf = f

    def _propose(self):
        raise NotImplementedError

    def _update(self, value):
        raise NotImplementedError

    def _record_acceptance(self):
        self._accepted += 1

    @staticmethod
    def acceptance_probability(delta):
        """min(1, exp(delta)), safe against overflow and -inf."""
        if delta >= 0:
            return 1.0
        return math.exp(delta)

    # -- inspection ----------------------------------------------------------

    @property
    def n_parameters(self):
        return self._n

    @property
    def current_point(self):
        return None if self._current is None else self._current.copy()

    @property
    def current_log_pdf(self):
        return self._current_log_pdf

    @property
    def iteration(self):
        """Number of completed post-initialisation steps."""
        return self._iteration

    @property
    def acceptances(self):
        return self._accepted

    @property
    def acceptance_rate(self):
        return self._accepted / self._iteration if self._iteration else 0.0

    def hyperparameters(self):
        return {}
