"""Nested sampling for evidence estimation: rejection and ellipsoidal variants.

A population of N live points drawn from the prior is shrunk through a
rising likelihood threshold. At iteration i the lowest-likelihood point is
recorded with prior-volume weight w_i = X_{i-1} - X_i, X_i = exp(-i / N),
and replaced by a new prior draw above the threshold. The evidence
Z = sum L_i w_i (accumulated in log space) plus the final live-point
contribution; the statistical error of log Z is estimated as sqrt(H / N)
with H the information (Skilling 2006).

The rejection variant draws replacements directly from the prior. The
ellipsoidal variant (after an initial rejection phase) draws uniformly
from an enlarged minimum-volume ellipsoid fitted to the live points,
rejecting draws outside the prior support or below the threshold, which
cuts the number of likelihood evaluations sharply once the live set has
contracted (Mukherjee et al. 2006).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import EvaluationError, RandomSource

__all__ = [
    "NestedEllipsoidSampler",
    "NestedRejectionSampler",
    "NestedResult",
    "NestedSamplingError",
]


class NestedSamplingError(RuntimeError):
    """A nested run could not continue (e.g. the rejection cap was hit)."""


@dataclass
class NestedResult:
    """Completed nested-sampling run.

    ``samples``/``log_likelihoods``/``log_weights`` hold the discarded
    points in threshold order (the final live points are appended with
    their remainder weights). ``posterior_weights`` are proportional to
    L_i * w_i and sum to one.
    """

    log_evidence: float
    log_evidence_se: float
    information: float
    iterations: int
    n_evaluations: int
    n_live: int
    stop_reason: str
    samples: np.ndarray
    log_likelihoods: np.ndarray
    log_weights: np.ndarray
    seed: int
    method: str
    metadata: dict = field(default_factory=dict)

    @property
    def posterior_weights(self):
        w = self.log_likelihoods + self.log_weights
        finite = np.isfinite(w)
        out = np.zeros_like(w)
        if np.any(finite):
            m = np.max(w[finite])
            out[finite] = np.exp(w[finite] - m)
            out /= np.sum(out)
        return out

    def sample_posterior(self, n, rng):
        """Draw ``n`` posterior samples from the weighted discarded points."""
        idx = rng.generator.choice(
            self.samples.shape[0], size=int(n), replace=True,
            p=self.posterior_weights)
        return self.samples[idx]


def fit_ellipsoid(points, enlargement=1.1):
    """Bounding ellipsoid of ``points``: centre and a transform T.

    ``x = centre + T @ u`` maps the unit ball to the ellipsoid. The fit is
    the empirical-covariance ellipsoid scaled to contain every point, with
    squared radii inflated by ``enlargement``; a 1e-12 identity jitter
    keeps degenerate point sets (e.g. all identical) factorisable.
    """
    pts = np.asarray(points, dtype=float)
    n = pts.shape[1]
    centre = pts.mean(axis=0)
    cov = np.atleast_2d(np.cov(pts.T)) + 1e-12 * np.eye(n)
    diffs = pts - centre
    d2 = np.einsum("ij,ij->i", diffs, np.linalg.solve(cov, diffs.T).T)
    scale = float(np.max(d2)) * float(enlargement)
    if scale <= 0:
        scale = 1e-12
    transform = np.linalg.cholesky(cov * scale)
    return centre, transform


def _uniform_ball(rng, n):
    z = rng.standard_normal(n)
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return np.zeros(n)
    return z / norm * float(rng.random()) ** (1.0 / n)


class _NestedSamplerBase:
    """Shared live-point bookkeeping and evidence accumulation."""

    def __init__(self, log_likelihood, log_prior, n_live=400, rng=None,
                 max_rejection_draws=10 ** 6):
        if not hasattr(log_prior, "sample"):
            raise TypeError(
                "nested sampling needs a prior that supports direct draws "
                "(uniform, Gaussian or composed)")
        if int(n_live) < 2:
            raise ValueError("need at least 2 live points")
        self._log_likelihood = log_likelihood
        self._log_prior = log_prior
        self._n_live = int(n_live)
        self._rng = rng if rng is not None else RandomSource(0)
        self._max_draws = int(max_rejection_draws)
        self._n_evaluations = 0
        self._live_points = None
        # buffered prior candidates for the rejection loop
        self._pool_points = None
        self._pool_logliks = None
        self._pool_index = 0
        self._batch_size = 64

    @property
    def n_live(self):
        return self._n_live

    @property
    def n_evaluations(self):
        """Number of log-likelihood evaluations so far."""
        return self._n_evaluations

    def _evaluate(self, x):
        self._n_evaluations += 1
        try:
            v = float(self._log_likelihood(x))
        except EvaluationError:
            return -math.inf
        return -math.inf if math.isnan(v) else v

    def _evaluate_batch(self, points):
        self._n_evaluations += points.shape[0]
        try:
            values = np.asarray(
                self._log_likelihood.evaluate_batch(points), dtype=float)
        except AttributeError:
            values = np.empty(points.shape[0])
            for i, x in enumerate(points):
                try:
                    values[i] = float(self._log_likelihood(x))
                except EvaluationError:
                    values[i] = -math.inf
        return np.where(np.isnan(values), -math.inf, values)

    def _draw_from_prior(self, threshold):
        """Rejection sampling from the prior until loglik >= threshold.

        Prior candidates are drawn and scored in batches and the unused
        tail is kept for later replacements: candidates are i.i.d. prior
        draws, so screening leftovers against a new (higher) threshold
        is still exact, and no evaluation is wasted.
        """
        attempts = 0
        while attempts < self._max_draws:
            if self._pool_points is not None:
                while self._pool_index < self._pool_logliks.shape[0]:
                    i = self._pool_index
                    self._pool_index += 1
                    attempts += 1
                    if self._pool_logliks[i] >= threshold:
                        self._batch_size = min(8192, max(64, 2 * attempts))
                        return self._pool_points[i].copy(), float(self._pool_logliks[i])
            points = np.asarray(
                self._log_prior.sample(self._rng, self._batch_size), dtype=float)
            self._pool_points = points
            self._pool_logliks = self._evaluate_batch(points)
            self._pool_index = 0
        raise NestedSamplingError(
            f"no prior draw above log-likelihood {threshold!r} within "
            f"{self._max_draws} attempts; the live set may have collapsed "
            f"onto a likelihood plateau")

    def _replacement(self, threshold, iteration):
        return self._draw_from_prior(threshold)

    def run(self, max_iterations=100000, remainder_tolerance=1e-3, sink=None):
        """Run until the live-point remainder is negligible or the cap hits.

        ``remainder_tolerance`` stops the run once the maximal remaining
        live-point contribution drops below that fraction of the
        accumulated evidence; pass 0 or None to disable and run exactly
        ``max_iterations`` iterations. ``sink`` receives
        ``(iteration, n_evaluations, log_evidence_so_far)`` per iteration.
        """
        n = self._n_live
        rng = self._rng
        live_points = np.asarray(self._log_prior.sample(rng, n), dtype=float)
        live_logliks = np.array([self._evaluate(x) for x in live_points])
        self._live_points = live_points

        points, logliks, logweights = [], [], []
        log_z = -math.inf
        # ln(X_{i-1} - X_i) = -(i - 1)/N + ln(1 - e^(-1/N))
        log_shell = math.log1p(-math.exp(-1.0 / n))
        stop_reason = "max_iterations"
        iteration = 0
        while iteration < int(max_iterations):
            iteration += 1
            worst = int(np.argmin(live_logliks))
            l_min = float(live_logliks[worst])
            log_w = -(iteration - 1) / n + log_shell
            points.append(live_points[worst].copy())
            logliks.append(l_min)
            logweights.append(log_w)
            log_z = np.logaddexp(log_z, l_min + log_w)

            x, f = self._replacement(l_min, iteration)
            live_points[worst] = x
            live_logliks[worst] = f

            if sink is not None:
                sink((iteration, self._n_evaluations, float(log_z)))
            if remainder_tolerance:
                log_remainder = float(np.max(live_logliks)) - iteration / n
                if log_remainder < math.log(remainder_tolerance) + log_z:
                    stop_reason = "remainder"
                    break

        # final live-point contribution: each gets X_M / N
        log_x_final = -iteration / n
        order = np.argsort(live_logliks, kind="stable")
        for idx in order:
            points.append(live_points[idx].copy())
            logliks.append(float(live_logliks[idx]))
            logweights.append(log_x_final - math.log(n))
            log_z = np.logaddexp(log_z, logliks[-1] + logweights[-1])

        logliks = np.array(logliks)
        logweights = np.array(logweights)
        log_z = float(log_z)
        with np.errstate(invalid="ignore"):
            p = np.exp(logliks + logweights - log_z)
        mask = p > 0
        information = float(np.sum(p[mask] * logliks[mask]) - log_z) if np.any(mask) \
            else 0.0
        information = max(information, 0.0)

        return NestedResult(
            log_evidence=log_z,
            log_evidence_se=math.sqrt(information / n),
            information=information,
            iterations=iteration,
            n_evaluations=self._n_evaluations,
            n_live=n,
            stop_reason=stop_reason,
            samples=np.array(points),
            log_likelihoods=logliks,
            log_weights=logweights,
            seed=self._rng.seed,
            method=self.name,
            metadata={
                "generator": RandomSource.ALGORITHM,
                "hyperparameters": self.hyperparameters(),
            },
        )

    def hyperparameters(self):
        return {"n_live": self._n_live, "max_rejection_draws": self._max_draws}


class NestedRejectionSampler(_NestedSamplerBase):
    """Nested sampler drawing every replacement directly from the prior."""

    name = "nested-rejection"


class NestedEllipsoidSampler(_NestedSamplerBase):
    """Nested sampler proposing from a fitted bounding ellipsoid.

    The first ``first_phase_iterations`` iterations use prior rejection;
    afterwards replacements are drawn uniformly from the minimum-volume
    ellipsoid of the live points (inflated by ``enlargement`` and refitted
    every ``refit_interval`` iterations). Ellipsoid draws outside the prior
    support are rejected without costing a likelihood evaluation.
    """

    name = "nested-ellipsoid"

    def __init__(self, log_likelihood, log_prior, n_live=400, rng=None,
                 max_rejection_draws=10 ** 6, enlargement=1.1,
                 first_phase_iterations=1000, refit_interval=100):
        super().__init__(log_likelihood, log_prior, n_live, rng,
                         max_rejection_draws)
        if float(enlargement) < 1.0:
            raise ValueError("enlargement factor must be at least 1")
        self._enlargement = float(enlargement)
        self._first = int(first_phase_iterations)
        self._refit = int(refit_interval)
        self._centre = None
        self._transform = None
        self._last_fit = None

    def hyperparameters(self):
        h = super().hyperparameters()
        h.update({
            "enlargement": self._enlargement,
            "first_phase_iterations": self._first,
            "refit_interval": self._refit,
        })
        return h

    def run(self, max_iterations=100000, remainder_tolerance=1e-3, sink=None):
        # _replacement needs the current live set for ellipsoid fits
        self._centre = None
        self._last_fit = None
        return super().run(max_iterations, remainder_tolerance, sink)

    def _replacement(self, threshold, iteration):
        if iteration <= self._first:
            return self._draw_from_prior(threshold)
        if self._centre is None or iteration - self._last_fit >= self._refit:
            self._centre, self._transform = fit_ellipsoid(
                self._live_points, self._enlargement)
            self._last_fit = iteration
        n = self._live_points.shape[1]
        for _ in range(self._max_draws):
            x = self._centre + self._transform @ _uniform_ball(self._rng, n)
            if self._log_prior(x) == -math.inf:
                continue
            f = self._evaluate(x)
            if f >= threshold:
                return x, f
        raise NestedSamplingError(
            f"no ellipsoid draw above log-likelihood {threshold!r} within "
            f"{self._max_draws} attempts")
