"""Convergence and correctness diagnostics for sampler output.

Implements the plain Gelman-Rubin statistic (no chain splitting or rank
normalisation), an initial-positive-sequence effective sample size, FFT
autocorrelation, and a Kolmogorov-Smirnov comparison of samples against
analytic marginals used for statistical regression checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import kolmogorov

__all__ = [
    "DistributionCheckResult",
    "autocorrelation",
    "distribution_check",
    "effective_sample_size",
    "rhat",
]


def _rhat_1d(chains):
    m, n = chains.shape
    means = chains.mean(axis=1)
    within = float(np.mean(np.var(chains, axis=1, ddof=1)))
    between_over_n = float(np.var(means, ddof=1))  # = B / n
    if within == 0.0:
        return 1.0 if between_over_n == 0.0 else math.inf
    return math.sqrt(((n - 1) / n * within + between_over_n) / within)


def rhat(chains):
    """Gelman-Rubin potential scale reduction, per dimension.

    ``chains`` has shape (m, n) for one dimension or (m, n, d); needs at
    least two chains of at least two samples. All-constant, identical
    chains return 1 by convention; constant chains at different values
    return ``+inf``.
    """
    c = np.asarray(chains, dtype=float)
    if c.ndim == 2:
        c = c[:, :, None]
    if c.ndim != 3:
        raise ValueError("chains must have shape (m, n) or (m, n, d)")
    m, n, d = c.shape
    if m < 2 or n < 2:
        raise ValueError("rhat needs at least 2 chains of at least 2 samples")
    out = np.array([_rhat_1d(c[:, :, j]) for j in range(d)])
    return float(out[0]) if np.asarray(chains).ndim == 2 else out


def autocorrelation(chain, max_lag):
    """Normalised autocorrelations rho_0..rho_max_lag (biased estimator).

    ``rho_0`` is always 1; a zero-variance chain returns zeros beyond
    lag 0 by convention.
    """
    x = np.asarray(chain, dtype=float)
    if x.ndim != 1:
        raise ValueError("chain must be 1-d")
    n = x.shape[0]
    max_lag = int(max_lag)
    if not 0 <= max_lag < n:
        raise ValueError("max_lag must satisfy 0 <= max_lag < len(chain)")
    x = x - x.mean()
    c0 = float(np.dot(x, x)) / n
    rho = np.zeros(max_lag + 1)
    rho[0] = 1.0
    if c0 == 0.0:
        return rho
    size = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(x, size)
    acov = np.fft.irfft(f * np.conj(f), size)[: max_lag + 1] / n
    rho = acov / acov[0]
    rho[0] = 1.0
    return rho


def effective_sample_size(chain):
    """Autocorrelation-discounted sample count, clipped to [1, n].

    Uses ESS = n / (1 + 2 * sum(rho_k)), summing consecutive lag pairs
    (rho_1 + rho_2), (rho_3 + rho_4), ... until the first non-positive
    pair sum. A zero-variance chain returns n by convention. 1-d input
    gives a float, (n, d) input one value per column.
    """
    x = np.asarray(chain, dtype=float)
    if x.ndim == 2:
        return np.array([effective_sample_size(x[:, j]) for j in range(x.shape[1])])
    if x.ndim != 1:
        raise ValueError("chain must be 1-d or 2-d")
    n = x.shape[0]
    if n < 10:
        raise ValueError("effective_sample_size needs at least 10 samples")
    if float(np.var(x)) == 0.0:
        return float(n)
    rho = autocorrelation(x, n - 1)
    total = 0.0
    k = 1
    while k + 1 < n:
        pair = rho[k] + rho[k + 1]
        if pair <= 0.0:
            break
        total += pair
        k += 2
    ess = n / (1.0 + 2.0 * total)
    return float(min(max(ess, 1.0), n))


@dataclass
class DistributionCheckResult:
    """Per-dimension KS statistics and the overall verdict."""

    passed: bool
    statistics: np.ndarray
    p_values: np.ndarray
    alpha: float

    def __bool__(self):
        return self.passed


def _ks_statistic(values, cdf):
    xs = np.sort(values)
    n = xs.shape[0]
    try:
        f = np.asarray(cdf(xs), dtype=float)
        if f.shape != xs.shape:
            raise ValueError
    except Exception:
        f = np.array([float(cdf(v)) for v in xs])
    steps = np.arange(1, n + 1) / n
    d_plus = float(np.max(steps - f))
    d_minus = float(np.max(f - (steps - 1.0 / n)))
    return max(d_plus, d_minus)


def distribution_check(samples, cdfs, alpha=0.001):
    """One-sample KS test of each marginal against an analytic CDF.

    ``samples`` is (n,) or (n, d) with n >= 500; ``cdfs`` is one callable
    per dimension (a single callable is accepted for 1-d input). P-values
    come from the asymptotic Kolmogorov distribution; the check fails if
    any marginal has p < alpha. The default alpha of 0.001 is deliberately
    loose to bound the false-alarm rate in repeated regression runs.
    An empty dimension list passes vacuously. Deterministic given the
    samples.
    """
    x = np.asarray(samples, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("samples must be 1-d or 2-d")
    if callable(cdfs):
        cdfs = [cdfs]
    cdfs = list(cdfs)
    if len(cdfs) == 0:
        return DistributionCheckResult(True, np.array([]), np.array([]), alpha)
    if len(cdfs) != x.shape[1]:
        raise ValueError(f"got {len(cdfs)} reference CDFs for {x.shape[1]} dimensions")
    n = x.shape[0]
    if n < 500:
        raise ValueError("distribution_check needs at least 500 samples")
    stats = np.array([_ks_statistic(x[:, j], cdfs[j]) for j in range(x.shape[1])])
    p_values = np.array([float(kolmogorov(math.sqrt(n) * d)) for d in stats])
    return DistributionCheckResult(bool(np.all(p_values >= alpha)),
                                   stats, p_values, float(alpha))
