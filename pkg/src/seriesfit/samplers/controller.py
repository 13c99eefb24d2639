"""Sampling controllers: multi-chain MCMC runs and nested-sampling runs.

``run_mcmc`` runs independent chains with a shared method configuration
but distinct seeds (chain j uses ``seed XOR (j + 1)``), optionally one
worker process per chain; results are merged deterministically by chain
index, so a parallel run is bit-identical to a sequential one.
"""

from __future__ import annotations

import math
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from ..core import EvaluationError, RandomSource, as_parameter_vector
from ..densities import LogPosterior
from .adaptive import AdaptiveCovarianceMCMC
from .metropolis import RandomWalkMetropolis
from .nested import NestedEllipsoidSampler, NestedRejectionSampler
from .population import PopulationMCMC

__all__ = [
    "MCMC_METHODS",
    "MCMCResult",
    "NESTED_METHODS",
    "run_mcmc",
    "run_nested",
]

MCMC_METHODS = {
    "metropolis": RandomWalkMetropolis,
    "adaptive": AdaptiveCovarianceMCMC,
    "population": PopulationMCMC,
}

NESTED_METHODS = {
    "nested-rejection": NestedRejectionSampler,
    "nested-ellipsoid": NestedEllipsoidSampler,
}


@dataclass
class MCMCResult:
    """Outcome of a multi-chain MCMC run.

    ``chains`` has shape ``(n_chains, iterations + 1, n)``: row 0 is the
    starting point, then one row per iteration. ``log_records`` holds one
    ``(iteration, evaluations, acceptance_rates)`` tuple per iteration,
    with the cumulative per-chain acceptance rates at that iteration.
    """

    chains: np.ndarray
    acceptance_rates: list
    iterations: int
    evaluations: int
    log_records: list
    seed: int
    method: str
    metadata: dict = field(default_factory=dict)

    @property
    def n_chains(self):
        return self.chains.shape[0]

    def thinned(self, factor):
        """Chains with every ``factor``-th row kept (never applied silently)."""
        factor = int(factor)
        if factor < 1:
            raise ValueError("thinning factor must be at least 1")
        return self.chains[:, ::factor, :]


def _safe_log_pdf(log_pdf, x):
    try:
        v = float(log_pdf(x))
    except EvaluationError:
        return -math.inf
    return -math.inf if math.isnan(v) else v


def _run_chain(args):
    """Run one full chain; module-level so chains can run in worker processes."""
    (log_pdf, log_prior, x0, chain_seed, chain_index, method_name, options,
     iterations) = args
    cls = MCMC_METHODS[method_name]
    rng = RandomSource(chain_seed)
    sampler = cls(x0, rng=rng, **options)

    needs_prior = sampler.needs_log_prior
    if needs_prior and log_prior is None:
        raise ValueError(
            f"method {method_name!r} needs a log-prior; pass one explicitly or "
            f"use a LogPosterior target")

    def score(x):
        f = _safe_log_pdf(log_pdf, x)
        if needs_prior:
            return f, _safe_log_pdf(log_prior, x)
        return f

    n = len(x0)
    chain = np.empty((iterations + 1, n))
    accept_flags = np.zeros(iterations, dtype=bool)

    x = sampler.ask()
    try:
        chain[0] = sampler.tell(score(x))
    except ValueError as e:
        raise ValueError(f"chain {chain_index}: {e}") from None

    evaluations = 1
    for t in range(1, iterations + 1):
        x = sampler.ask()
        before = sampler.acceptances
        chain[t] = sampler.tell(score(x))
        accept_flags[t - 1] = sampler.acceptances > before
        evaluations += 1

    return {
        "chain": chain,
        "accept_flags": accept_flags,
        "evaluations": evaluations,
        "acceptance_rate": sampler.acceptance_rate,
        "hyperparameters": sampler.hyperparameters(),
        "name": sampler.name,
    }


def run_mcmc(log_pdf, n_chains, x0, method="adaptive", iterations=1000,
             sigma0=1.0, workers=1, sink=None, seed=0, log_prior=None,
             method_options=None):
    """Sample ``log_pdf`` with ``n_chains`` independent chains.

    ``x0`` is either one starting point shared by every chain or a
    sequence of one starting point per chain; every starting point must
    have finite log-density. ``sigma0`` sets per-coordinate proposal
    standard deviations (ignored if ``method_options`` provides an
    explicit covariance). Population MCMC needs a log-prior, taken from a
    :class:`LogPosterior` target automatically or passed via ``log_prior``.

    ``sink`` receives ``(iteration, evaluations, acceptance_rates)`` per
    iteration. Returns an :class:`MCMCResult` with the full chains
    (starting points included).
    """
    n_chains = int(n_chains)
    if n_chains < 1:
        raise ValueError("need at least one chain")
    iterations = int(iterations)
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if isinstance(method, str):
        method_name = method.lower()
        if method_name not in MCMC_METHODS:
            raise ValueError(
                f"unknown MCMC method {method!r}; choose from {sorted(MCMC_METHODS)}")
    else:
        matches = [k for k, v in MCMC_METHODS.items() if v is method]
        if not matches:
            raise TypeError("method must be a name or a registered sampler class")
        method_name = matches[0]

    x0 = np.asarray(x0, dtype=float)
    if x0.ndim == 1:
        x0 = np.tile(x0, (n_chains, 1))
    if x0.shape[0] != n_chains:
        raise ValueError(f"got {x0.shape[0]} starting points for {n_chains} chains")
    starts = [as_parameter_vector(row) for row in x0]

    if log_prior is None and isinstance(log_pdf, LogPosterior):
        log_prior = log_pdf.log_prior

    options = dict(method_options or {})
    cov_key = "initial_covariance" if method_name == "adaptive" \
        else "proposal_covariance"
    if cov_key not in options:
        s = np.atleast_1d(np.asarray(sigma0, dtype=float))
        if s.shape == (1,):
            s = np.repeat(s, starts[0].shape[0])
        options[cov_key] = np.diag(s ** 2)

    seed = int(seed)
    jobs = [
        (log_pdf, log_prior, starts[j], seed ^ (j + 1), j, method_name,
         options, iterations)
        for j in range(n_chains)
    ]

    if int(workers) > 1 and n_chains > 1:
        with multiprocessing.Pool(processes=min(int(workers), n_chains)) as pool:
            outcomes = pool.map(_run_chain, jobs)
    else:
        outcomes = [_run_chain(job) for job in jobs]

    chains = np.stack([o["chain"] for o in outcomes])
    evaluations = sum(o["evaluations"] for o in outcomes)

    records = []
    if iterations > 0:
        cum = np.stack([np.cumsum(o["accept_flags"]) for o in outcomes])
        steps = np.arange(1, iterations + 1)
        rates = cum / steps
        per_step_evals = n_chains
        for t in steps:
            rec = (int(t), n_chains + int(t) * per_step_evals,
                   tuple(float(r) for r in rates[:, t - 1]))
            records.append(rec)
            if sink is not None:
                sink(rec)

    return MCMCResult(
        chains=chains,
        acceptance_rates=[o["acceptance_rate"] for o in outcomes],
        iterations=iterations,
        evaluations=evaluations,
        log_records=records,
        seed=seed,
        method=outcomes[0]["name"],
        metadata={
            "method": outcomes[0]["name"],
            "hyperparameters": outcomes[0]["hyperparameters"],
            "generator": RandomSource.ALGORITHM,
            "chain_seeds": [seed ^ (j + 1) for j in range(n_chains)],
            "workers": int(workers),
        },
    )


def run_nested(log_likelihood, log_prior, method="nested-rejection",
               n_live=400, seed=0, sink=None, max_iterations=100000,
               remainder_tolerance=1e-3, method_options=None):
    """Estimate the evidence of ``log_likelihood`` under ``log_prior``.

    ``method`` is ``"nested-rejection"`` or ``"nested-ellipsoid"``
    (``"rejection"``/``"ellipsoid"`` accepted as shorthand). Returns a
    :class:`NestedResult`.
    """
    if isinstance(method, str):
        name = method.lower()
        if not name.startswith("nested-"):
            name = f"nested-{name}"
        if name not in NESTED_METHODS:
            raise ValueError(
                f"unknown nested method {method!r}; "
                f"choose from {sorted(NESTED_METHODS)}")
        cls = NESTED_METHODS[name]
    else:
        cls = method
    sampler = cls(log_likelihood, log_prior, n_live=n_live,
                  rng=RandomSource(seed), **(method_options or {}))
    return sampler.run(max_iterations=max_iterations,
                       remainder_tolerance=remainder_tolerance, sink=sink)
