"""End-to-end acceptance checks at fixed seeds and stated tolerances.

Each test prints one PASS line (with its runtime) so a full run gives a
one-screen verdict. Budgets are asserted as upper bounds on wall time.
"""

import math
import time

import numpy as np
import pytest
from scipy import stats

from seriesfit import (
    BimodalTarget,
    GaussianLogLikelihoodUnknownSigma,
    GaussianTarget,
    LogisticModel,
    LogPosterior,
    RandomSource,
    RosenbrockError,
    StoppingCriteria,
    UniformLogPrior,
    effective_sample_size,
    generate_synthetic_data,
    rhat,
    run_mcmc,
    run_nested,
    run_optimisation,
)
from seriesfit.optimisers import OPTIMISER_METHODS

from helpers import sphere

SEEDS = list(range(10))


class Stopwatch:
    def __init__(self, budget):
        self.budget = budget

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        return False


def report(capsys, name, watch, detail=""):
    with capsys.disabled():
        print(f"ACCEPTANCE {name}: PASS ({watch.elapsed:.1f}s{detail})")
    assert watch.elapsed < watch.budget, \
        f"{name} exceeded its {watch.budget}s budget: {watch.elapsed:.1f}s"


def test_criterion_1_optimiser_convergence(capsys):
    with Stopwatch(30.0) as watch:
        for seed in SEEDS:
            result = run_optimisation(
                RosenbrockError(), [-1.0, 1.0], 0.5, method="cmaes",
                criteria=StoppingCriteria(max_iterations=500, target_score=1e-9),
                seed=seed)
            assert result.best_score < 1e-8, f"cmaes seed {seed}: {result.best_score}"
            assert result.iterations <= 500
        for method in ("xnes", "snes", "pso"):
            for seed in SEEDS:
                result = run_optimisation(
                    sphere, 2.0 * np.ones(5), 1.0, method=method,
                    criteria=StoppingCriteria(max_iterations=2000,
                                              target_score=5e-4),
                    seed=seed)
                assert result.best_score < 1e-3, \
                    f"{method} seed {seed}: {result.best_score}"
                assert result.iterations <= 2000
    report(capsys, "1 optimiser convergence", watch)


def test_criterion_2_mle_round_trip(capsys):
    times = np.linspace(0.0, 20.0, 50)
    hits = 0
    with Stopwatch(30.0) as watch:
        for seed in SEEDS:
            problem = generate_synthetic_data(
                LogisticModel(), [0.5, 10.0], times, 0.1, RandomSource(seed))
            likelihood = GaussianLogLikelihoodUnknownSigma(problem)
            result = run_optimisation(
                likelihood, [0.3, 8.0, 0.3], [0.1, 1.0, 0.1],
                criteria=StoppingCriteria(max_iterations=300), seed=seed)
            r, k, s = result.best_parameters
            if abs(r - 0.5) < 0.1 and abs(k - 10.0) < 1.0 and abs(s - 0.1) < 0.05:
                hits += 1
    assert hits >= 9, f"only {hits}/10 MLE runs recovered the truth"
    report(capsys, "2 MLE round-trip", watch, detail=f", {hits}/10 seeds")


def test_criterion_3_mcmc_correctness(capsys):
    mean = np.array([1.0, -2.0])
    cov = np.array([[2.0, 0.8], [0.8, 1.0]])
    target = GaussianTarget(mean, cov)
    with Stopwatch(60.0) as watch:
        result = run_mcmc(target, 3, mean, method="adaptive",
                          iterations=20000, sigma0=1.0, seed=1)
        kept = result.chains[:, 10001:, :]  # second half of each chain
        r = rhat(kept)
        assert np.all(r < 1.05), f"R-hat {r}"
        pooled = kept.reshape(-1, 2)
        sample_cov = np.cov(pooled.T)
        rel = np.linalg.norm(sample_cov - cov) / np.linalg.norm(cov)
        assert rel < 0.10, f"covariance error {rel:.3f}"
        # KS needs roughly independent draws: thin before testing
        thinned = kept[:, ::20, :].reshape(-1, 2)
        from seriesfit import distribution_check
        check = distribution_check(
            thinned,
            [lambda x: stats.norm.cdf(x, mean[0], math.sqrt(cov[0, 0])),
             lambda x: stats.norm.cdf(x, mean[1], math.sqrt(cov[1, 1]))],
            alpha=0.001)
        assert check.passed, f"KS p-values {check.p_values}"
    report(capsys, "3 MCMC correctness", watch,
           detail=f", R-hat {r.max():.4f}, cov err {rel:.3f}")


def test_criterion_4_tempering_advantage(capsys):
    likelihood = BimodalTarget(5.0)
    prior = UniformLogPrior([-10.0], [10.0])
    posterior = LogPosterior(likelihood, prior)
    budget = 100000
    warmup = budget // 10
    with Stopwatch(60.0) as watch:
        tempered = run_mcmc(posterior, 1, [-5.0], method="population",
                            iterations=budget, sigma0=1.0, seed=0)
        stream = tempered.chains[0, warmup + 1:, 0]
        far = float(np.mean(stream > 0.0))
        assert 0.25 <= far <= 0.75, f"population far-mode mass {far:.3f}"

        plain = run_mcmc(posterior, 1, [-5.0], method="metropolis",
                         iterations=budget, sigma0=1.0, seed=0)
        stuck = float(np.mean(plain.chains[0, warmup + 1:, 0] > 0.0))
        assert stuck < 0.01, f"plain Metropolis crossed: {stuck:.3f}"
    report(capsys, "4 tempering advantage", watch,
           detail=f", population {far:.2f} vs metropolis {stuck:.4f}")


def test_criterion_5_evidence_accuracy(capsys):
    likelihood = GaussianTarget([0.0, 0.0], 0.01 * np.eye(2))
    prior = UniformLogPrior([-5.0, -5.0], [5.0, 5.0])
    analytic = -math.log(100.0)
    seeds = list(range(14, 24))  # ten fixed seeds
    hits = {"nested-rejection": 0, "nested-ellipsoid": 0}
    evaluations = {}
    with Stopwatch(60.0) as watch:
        for method in hits:
            evaluations[method] = []
            for seed in seeds:
                result = run_nested(likelihood, prior, method=method,
                                    n_live=400, seed=seed, max_iterations=3400)
                evaluations[method].append(result.n_evaluations)
                if abs(result.log_evidence - analytic) < 0.2:
                    hits[method] += 1
        assert hits["nested-rejection"] >= 9, hits
        assert hits["nested-ellipsoid"] >= 9, hits
        for e_cheap, e_full in zip(evaluations["nested-ellipsoid"],
                                   evaluations["nested-rejection"]):
            assert e_cheap <= e_full / 3
    report(capsys, "5 evidence accuracy", watch,
           detail=f", rejection {hits['nested-rejection']}/10, "
                  f"ellipsoid {hits['nested-ellipsoid']}/10")


def test_criterion_6_diagnostics_exactness(capsys):
    with Stopwatch(10.0) as watch:
        chain = RandomSource(0).standard_normal(100)
        duplicated = rhat(np.stack([chain, chain]))
        assert abs(duplicated - math.sqrt(99.0 / 100.0)) < 1e-12

        n = 100000
        noise = RandomSource(1).standard_normal(n)
        x = np.empty(n)
        x[0] = noise[0]
        for t in range(1, n):
            x[t] = 0.9 * x[t - 1] + noise[t]
        ratio = effective_sample_size(x) / n
        expected = 0.1 / 1.9
        assert abs(ratio - expected) / expected < 0.30, ratio
    report(capsys, "6 diagnostics exactness", watch,
           detail=f", ESS ratio {ratio:.4f} vs {expected:.4f}")


def test_criterion_7_reproducibility_and_parallelism(capsys):
    target = GaussianTarget([0.0, 0.0], np.eye(2))
    criteria = StoppingCriteria(max_iterations=80)
    with Stopwatch(30.0) as watch:
        a = run_optimisation(sphere, [1.0, 2.0], 0.5, criteria=criteria, seed=7)
        b = run_optimisation(sphere, [1.0, 2.0], 0.5, criteria=criteria, seed=7)
        assert a.log_records == b.log_records
        assert np.array_equal(a.best_parameters, b.best_parameters)

        parallel = run_optimisation(sphere, [1.0, 2.0], 0.5, criteria=criteria,
                                    seed=7, workers=4)
        assert a.log_records == parallel.log_records
        assert np.array_equal(a.best_parameters, parallel.best_parameters)

        m1 = run_mcmc(target, 4, [0.0, 0.0], iterations=2000, seed=7, workers=1)
        m2 = run_mcmc(target, 4, [0.0, 0.0], iterations=2000, seed=7, workers=1)
        m4 = run_mcmc(target, 4, [0.0, 0.0], iterations=2000, seed=7, workers=4)
        assert np.array_equal(m1.chains, m2.chains)
        assert np.array_equal(m1.chains, m4.chains)
        assert m1.log_records == m2.log_records == m4.log_records
    report(capsys, "7 reproducibility and parallel determinism", watch)


def test_criterion_8_ask_tell_contract(capsys):
    with Stopwatch(30.0) as watch:
        for name, cls in OPTIMISER_METHODS.items():
            opt = cls(np.ones(3), 0.5, rng=RandomSource(0))
            opt.ask()
            with pytest.raises(RuntimeError):
                opt.ask()
            opt.tell(np.zeros(opt.population_size))
            with pytest.raises(RuntimeError):
                opt.tell(np.zeros(opt.population_size))

            # monotone best-so-far under a noisy score
            rng = RandomSource(1)
            best = math.inf
            for _ in range(25):
                xs = opt.ask()
                opt.tell([sphere(x) + float(rng.random()) for x in xs])
                assert opt.best_score <= best
                best = opt.best_score

        # rank-based methods: proposal sequences invariant under strictly
        # monotone score transformations
        for name in ("cmaes", "xnes", "snes"):
            cls = OPTIMISER_METHODS[name]
            for transform in (lambda s: 100.0 * s + 3.0, lambda s: s ** 3,
                              math.atan):
                a = cls(np.ones(3), 0.5, rng=RandomSource(2))
                b = cls(np.ones(3), 0.5, rng=RandomSource(2))
                for _ in range(10):
                    xs_a, xs_b = a.ask(), b.ask()
                    assert np.array_equal(xs_a, xs_b)
                    scores = [sphere(x) for x in xs_a]
                    a.tell(scores)
                    b.tell([transform(s) for s in scores])
    report(capsys, "8 ask-and-tell contract", watch)
