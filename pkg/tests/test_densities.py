import math

import numpy as np
import pytest
from scipy import optimize

from seriesfit import (
    ComposedLogPrior,
    ConstantModel,
    GaussianLogLikelihood,
    GaussianLogLikelihoodUnknownSigma,
    GaussianLogPrior,
    LogPosterior,
    RandomSource,
    SumOfSquaresError,
    TimeSeriesProblem,
    UniformLogPrior,
)

from helpers import CountingLogPDF, constant_problem

LOG_2PI = math.log(2.0 * math.pi)


class TestGaussianLogLikelihood:
    def test_perfect_fit_single_point(self):
        problem, p = constant_problem(2.0, [2.0])
        assert GaussianLogLikelihood(problem, 1.0)(p) == pytest.approx(
            -0.5 * LOG_2PI, rel=1e-15)

    def test_perfect_fit_four_points(self):
        problem, p = constant_problem(2.0, [2.0] * 4)
        assert GaussianLogLikelihood(problem, 1.0)(p) == pytest.approx(
            -2.0 * LOG_2PI, rel=1e-15)

    def test_matches_independent_formula(self):
        # -(N/2) ln(2 pi sigma^2) - SSE / (2 sigma^2), SSE computed by the
        # measures module
        rng = RandomSource(42)
        times = np.linspace(0.0, 3.0, 7)
        for _ in range(30):
            obs = rng.standard_normal(7)
            sigma = float(rng.uniform(0.1, 3.0))
            problem = TimeSeriesProblem(ConstantModel(), times, obs)
            p = rng.standard_normal(1)
            sse = SumOfSquaresError(problem)(p)
            expected = -0.5 * 7 * math.log(2.0 * math.pi * sigma ** 2) \
                - sse / (2.0 * sigma ** 2)
            got = GaussianLogLikelihood(problem, sigma)(p)
            assert got == pytest.approx(expected, rel=1e-12)

    def test_ranking_reverses_sse(self):
        rng = RandomSource(3)
        problem, _ = constant_problem(0.0, rng.standard_normal(5))
        lik = GaussianLogLikelihood(problem, 1.0)
        sse = SumOfSquaresError(problem)
        for _ in range(20):
            p, q = rng.standard_normal((2, 1))
            assert (sse(p) < sse(q)) == (lik(p) > lik(q))

    def test_sigma_validated_at_construction(self):
        problem, _ = constant_problem(0.0, [1.0])
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(ValueError):
                GaussianLogLikelihood(problem, bad)

    def test_per_output_sigma(self):
        model = ConstantModel(n_outputs=2)
        problem = TimeSeriesProblem(model, [0.0], [[1.0, 2.0]])
        lik = GaussianLogLikelihood(problem, [1.0, 2.0])
        expected = (-0.5 * LOG_2PI - 0.0) \
            + (-0.5 * math.log(2.0 * math.pi * 4.0) - 0.0)
        assert lik([1.0, 2.0]) == pytest.approx(expected, rel=1e-14)

    def test_never_nan_or_plus_inf(self):
        problem, _ = constant_problem(0.0, [1.0, -1.0])
        lik = GaussianLogLikelihood(problem, 1e-3)
        for p in ([1e150], [-1e150], [0.0], [1e-300]):
            v = lik(p)
            assert not math.isnan(v) and v < math.inf


class TestUnknownSigma:
    def test_non_positive_sigma_outside_support(self):
        problem, _ = constant_problem(0.0, [1.0])
        lik = GaussianLogLikelihoodUnknownSigma(problem)
        assert lik([0.0, 0.0]) == -math.inf
        assert lik([0.0, -1.0]) == -math.inf

    def test_consistent_with_known_sigma(self):
        problem, _ = constant_problem(0.0, [1.0, 2.0, 0.5])
        unknown = GaussianLogLikelihoodUnknownSigma(problem)
        known = GaussianLogLikelihood(problem, 1.0)
        assert unknown([0.3, 1.0]) == known([0.3])

    def test_sigma_hat_from_numerical_maximisation(self):
        # residuals (1, -1): maximising over sigma should give
        # sigma_hat**2 = SSE / N = 1; check against a 1-d numerical oracle
        problem, p = constant_problem(0.0, [1.0, -1.0])
        lik = GaussianLogLikelihoodUnknownSigma(problem)
        res = optimize.minimize_scalar(
            lambda s: -lik([0.0, s]), bounds=(1e-3, 10.0), method="bounded",
            options={"xatol": 1e-10})
        assert res.x == pytest.approx(1.0, abs=1e-6)
        # and our evaluation is maximal there
        assert lik([0.0, 1.0]) > lik([0.0, 1.0 + 1e-4])
        assert lik([0.0, 1.0]) > lik([0.0, 1.0 - 1e-4])

    def test_dimension(self):
        model = ConstantModel(n_outputs=2)
        problem = TimeSeriesProblem(model, [0.0], [[1.0, 2.0]])
        assert GaussianLogLikelihoodUnknownSigma(problem).n_parameters == 4

    def test_perfect_fit_tiny_sigma_stays_finite(self):
        problem, _ = constant_problem(0.0, [0.0, 0.0])
        lik = GaussianLogLikelihoodUnknownSigma(problem)
        v = lik([0.0, 1e-300])
        assert math.isfinite(v) and v > 0.0


class TestUniformLogPrior:
    def test_unit_box(self):
        prior = UniformLogPrior([0.0, 0.0], [1.0, 1.0])
        assert prior([0.5, 0.5]) == 0.0

    def test_volume(self):
        prior = UniformLogPrior([0.0, 0.0], [2.0, 5.0])
        assert prior([1.0, 1.0]) == pytest.approx(-math.log(10.0), rel=1e-15)

    def test_outside_support(self):
        prior = UniformLogPrior([0.0], [1.0])
        assert prior([1.5]) == -math.inf
        assert prior([-0.5]) == -math.inf

    def test_boundary_closed_low_open_high(self):
        prior = UniformLogPrior([0.0], [1.0])
        assert prior([0.0]) == 0.0
        assert prior([1.0]) == -math.inf

    def test_bounds_validated(self):
        with pytest.raises(ValueError):
            UniformLogPrior([0.0], [0.0])
        with pytest.raises(ValueError):
            UniformLogPrior([0.0, 1.0], [1.0])

    def test_density_integrates_to_one(self):
        # Monte-Carlo over an enclosing box; 1e5 points within 1%
        prior = UniformLogPrior([-1.0, 0.0], [2.0, 0.5])
        rng = RandomSource(11)
        lo, hi = np.array([-2.0, -1.0]), np.array([3.0, 1.0])
        pts = lo + rng.random((10 ** 5, 2)) * (hi - lo)
        values = np.exp(prior.evaluate_batch(pts))
        estimate = values.mean() * np.prod(hi - lo)
        assert estimate == pytest.approx(1.0, abs=0.01)

    def test_sampling_stays_in_support(self):
        prior = UniformLogPrior([0.0, -1.0], [1.0, 1.0])
        draws = prior.sample(RandomSource(2), 1000)
        assert np.all(prior.evaluate_batch(draws) > -math.inf)


class TestGaussianLogPrior:
    def test_at_mean_identity_covariance(self):
        for d in (1, 2, 5):
            prior = GaussianLogPrior(np.zeros(d), np.eye(d))
            assert prior(np.zeros(d)) == pytest.approx(-0.5 * d * LOG_2PI, rel=1e-15)

    def test_one_dim_closed_form(self):
        prior = GaussianLogPrior([0.0], [[1.0]])
        assert prior([1.0]) == pytest.approx(-0.5 * LOG_2PI - 0.5, rel=1e-15)

    def test_symmetry(self):
        prior = GaussianLogPrior([1.0, -1.0], [[2.0, 0.5], [0.5, 1.0]])
        rng = RandomSource(9)
        for _ in range(20):
            v = rng.standard_normal(2)
            mean = np.array([1.0, -1.0])
            assert prior(mean + v) == pytest.approx(prior(mean - v), rel=1e-12)

    def test_spd_required(self):
        with pytest.raises(ValueError, match="positive definite"):
            GaussianLogPrior([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            GaussianLogPrior([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])

    def test_batch_matches_scalar(self):
        prior = GaussianLogPrior([0.5, -0.5], [[1.0, 0.3], [0.3, 2.0]])
        pts = RandomSource(3).standard_normal((50, 2))
        batch = prior.evaluate_batch(pts)
        for i, p in enumerate(pts):
            assert batch[i] == pytest.approx(prior(p), rel=1e-14)

    def test_sample_moments(self):
        prior = GaussianLogPrior([2.0], [[0.25]])
        draws = prior.sample(RandomSource(4), 20000)
        assert draws.mean() == pytest.approx(2.0, abs=0.02)
        assert draws.std() == pytest.approx(0.5, abs=0.02)


class TestComposedLogPrior:
    def test_single_component_identity(self):
        inner = UniformLogPrior([0.0], [2.0])
        composed = ComposedLogPrior(inner)
        assert composed([1.0]) == inner([1.0])

    def test_two_unit_boxes(self):
        composed = ComposedLogPrior(UniformLogPrior([0.0], [1.0]),
                                    UniformLogPrior([0.0], [1.0]))
        assert composed([0.5, 0.5]) == 0.0

    def test_out_of_support_absorbs(self):
        composed = ComposedLogPrior(UniformLogPrior([0.0], [1.0]),
                                    GaussianLogPrior([0.0], [[1.0]]))
        assert composed([2.0, 0.0]) == -math.inf

    def test_dimension_check(self):
        composed = ComposedLogPrior(UniformLogPrior([0.0], [1.0]),
                                    UniformLogPrior([0.0], [1.0]))
        with pytest.raises(ValueError):
            composed([0.5])

    def test_matches_block_diagonal_gaussian(self):
        a = GaussianLogPrior([1.0], [[2.0]])
        b = GaussianLogPrior([-1.0, 0.5], [[1.0, 0.2], [0.2, 0.5]])
        composed = ComposedLogPrior(a, b)
        joint = GaussianLogPrior(
            [1.0, -1.0, 0.5],
            [[2.0, 0.0, 0.0], [0.0, 1.0, 0.2], [0.0, 0.2, 0.5]])
        rng = RandomSource(21)
        for _ in range(100):
            p = rng.standard_normal(3) * 2.0
            assert composed(p) == pytest.approx(joint(p), rel=1e-12)

    def test_sample_concatenates(self):
        composed = ComposedLogPrior(UniformLogPrior([0.0], [1.0]),
                                    UniformLogPrior([10.0], [11.0]))
        draws = composed.sample(RandomSource(5), 100)
        assert draws.shape == (100, 2)
        assert np.all((draws[:, 0] >= 0.0) & (draws[:, 0] < 1.0))
        assert np.all((draws[:, 1] >= 10.0) & (draws[:, 1] < 11.0))


class TestLogPosterior:
    def test_short_circuits_on_zero_prior(self):
        problem, _ = constant_problem(0.0, [1.0])
        lik = CountingLogPDF(GaussianLogLikelihood(problem, 1.0))
        posterior = LogPosterior(lik, UniformLogPrior([0.0], [1.0]))
        assert posterior([2.0]) == -math.inf
        assert lik.calls == 0
        posterior([0.5])
        assert lik.calls == 1

    def test_flat_prior_is_additive_identity(self):
        problem, _ = constant_problem(0.0, [1.0])
        lik = GaussianLogLikelihood(problem, 1.0)
        posterior = LogPosterior(lik, UniformLogPrior([-0.5], [0.5]))
        assert posterior([0.2]) == lik([0.2])

    def test_perfect_fit_value(self):
        problem, p = constant_problem(0.5, [0.5])
        lik = GaussianLogLikelihood(problem, 1.0)
        posterior = LogPosterior(lik, UniformLogPrior([0.0], [1.0]))
        assert posterior(p) == pytest.approx(-0.9189385332046727, abs=1e-9)

    def test_dimension_mismatch(self):
        problem, _ = constant_problem(0.0, [1.0])
        lik = GaussianLogLikelihood(problem, 1.0)
        with pytest.raises(ValueError):
            LogPosterior(lik, UniformLogPrior([0.0, 0.0], [1.0, 1.0]))


def test_no_density_returns_nan_or_plus_inf():
    problem, _ = constant_problem(0.0, [1.0, -2.0])
    densities = [
        GaussianLogLikelihood(problem, 0.5),
        GaussianLogLikelihoodUnknownSigma(problem),
        UniformLogPrior([-1.0], [1.0]),
        GaussianLogPrior([0.0], [[1.0]]),
    ]
    extremes = [0.0, 1e-300, 1e300, -1e300, 12345.0]
    for density in densities:
        for value in extremes:
            p = np.full(density.n_parameters, value)
            v = density(p)
            assert not math.isnan(v)
            assert v < math.inf
