import math

import numpy as np
import pytest
from scipy import stats

from seriesfit import (
    RandomSource,
    autocorrelation,
    distribution_check,
    effective_sample_size,
    rhat,
)


class TestRhat:
    def test_duplicated_chain(self):
        # two identical chains: B = 0, so R-hat = sqrt((n-1)/n) exactly
        rng = RandomSource(0)
        for n in (100, 1000):
            chain = rng.standard_normal(n)
            value = rhat(np.stack([chain, chain]))
            assert value == pytest.approx(math.sqrt((n - 1) / n), abs=1e-12)
        assert rhat(np.stack([chain[:100], chain[:100]])) == pytest.approx(
            0.99498743710662, abs=1e-10)

    def test_equal_constant_chains(self):
        chains = np.ones((2, 50))
        assert rhat(chains) == 1.0

    def test_different_constant_chains(self):
        chains = np.stack([np.zeros(50), np.ones(50)])
        assert rhat(chains) == math.inf

    def test_independent_normal_chains_near_one(self):
        rng = RandomSource(1)
        chains = rng.standard_normal((2, 10000))
        assert 0.99 <= rhat(chains) <= 1.01

    def test_affine_invariance(self):
        rng = RandomSource(2)
        chains = rng.standard_normal((3, 500))
        a = rhat(chains)
        b = rhat(2.5 * chains - 7.0)
        assert a == pytest.approx(b, abs=1e-10)

    def test_per_dimension(self):
        rng = RandomSource(3)
        chains = rng.standard_normal((3, 400, 2))
        values = rhat(chains)
        assert values.shape == (2,)
        assert np.all(values > 0.9)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            rhat(np.zeros((1, 100)))
        with pytest.raises(ValueError):
            rhat(np.zeros((2, 1)))


class TestAutocorrelation:
    def test_lag_zero_is_one(self):
        rng = RandomSource(4)
        rho = autocorrelation(rng.standard_normal(100), 10)
        assert rho[0] == 1.0

    def test_alternating_chain(self):
        chain = np.tile([1.0, -1.0], 500)
        rho = autocorrelation(chain, 2)
        # biased estimator: rho_1 = -(n - 1)/n
        assert rho[1] == pytest.approx(-1.0, abs=2e-3)
        assert rho[2] == pytest.approx(1.0, abs=4e-3)

    def test_white_noise_bound(self):
        rng = RandomSource(5)
        n = 10000
        rho = autocorrelation(rng.standard_normal(n), 200)
        inside = np.abs(rho[1:]) < 3.0 / math.sqrt(n)
        assert inside.mean() >= 0.95

    def test_zero_variance_convention(self):
        rho = autocorrelation(np.ones(50), 5)
        assert rho[0] == 1.0
        assert np.all(rho[1:] == 0.0)

    def test_matches_direct_computation(self):
        rng = RandomSource(6)
        x = rng.standard_normal(64)
        rho = autocorrelation(x, 5)
        xm = x - x.mean()
        c0 = np.dot(xm, xm) / 64
        for k in range(1, 6):
            ck = np.dot(xm[:-k], xm[k:]) / 64
            assert rho[k] == pytest.approx(ck / c0, rel=1e-10)

    def test_max_lag_validated(self):
        with pytest.raises(ValueError):
            autocorrelation(np.zeros(10), 10)


class TestEffectiveSampleSize:
    def test_iid_draws(self):
        rng = RandomSource(7)
        ess = effective_sample_size(rng.standard_normal(10000))
        assert 0.8 * 10000 <= ess <= 10000

    def test_constant_chain_convention(self):
        assert effective_sample_size(np.full(100, 3.3)) == 100

    def test_ar1_analytic(self):
        # AR(1) with coefficient 0.9: ESS/n -> (1-0.9)/(1+0.9)
        rng = RandomSource(8)
        n = 100000
        noise = rng.standard_normal(n)
        x = np.empty(n)
        x[0] = noise[0]
        for t in range(1, n):
            x[t] = 0.9 * x[t - 1] + noise[t]
        ratio = effective_sample_size(x) / n
        expected = 0.1 / 1.9
        assert abs(ratio - expected) / expected < 0.30

    def test_bounds(self):
        # a strong linear trend pushes the raw estimate below 1; clipping
        # keeps it within [1, n]
        trend = np.arange(100.0)
        ess = effective_sample_size(trend)
        assert 1.0 <= ess <= 100.0
        rng = RandomSource(9)
        anti = np.tile([1.0, -1.0], 500) + 0.01 * rng.standard_normal(1000)
        assert 1.0 <= effective_sample_size(anti) <= 1000.0

    def test_per_column(self):
        rng = RandomSource(10)
        values = effective_sample_size(rng.standard_normal((1000, 3)))
        assert values.shape == (3,)

    def test_minimum_length(self):
        with pytest.raises(ValueError):
            effective_sample_size(np.zeros(9))


class TestDistributionCheck:
    def test_calibration(self):
        # samples drawn from the reference itself pass >= 99/100 times
        passes = 0
        for rep in range(100):
            draws = RandomSource(1000 + rep).standard_normal(1000)
            if distribution_check(draws, stats.norm.cdf, alpha=0.001).passed:
                passes += 1
        assert passes >= 99

    def test_power(self):
        draws = RandomSource(11).standard_normal(5000) + 1.0
        assert not distribution_check(draws, stats.norm.cdf, alpha=0.001).passed

    def test_statistic_matches_scipy(self):
        draws = RandomSource(12).standard_normal(800)
        result = distribution_check(draws, stats.norm.cdf)
        expected = stats.kstest(draws, stats.norm.cdf)
        assert result.statistics[0] == pytest.approx(expected.statistic, rel=1e-12)

    def test_vacuous_pass_on_empty_dimensions(self):
        result = distribution_check(np.zeros((600, 0)), [])
        assert result.passed

    def test_deterministic(self):
        draws = RandomSource(13).standard_normal((700, 2))
        cdfs = [stats.norm.cdf, stats.norm.cdf]
        a = distribution_check(draws, cdfs)
        b = distribution_check(draws, cdfs)
        assert a.passed == b.passed
        assert np.array_equal(a.statistics, b.statistics)
        assert np.array_equal(a.p_values, b.p_values)

    def test_minimum_samples(self):
        with pytest.raises(ValueError):
            distribution_check(np.zeros(499), stats.norm.cdf)

    def test_scalar_cdf_fallback(self):
        # non-vectorised CDFs are applied pointwise
        draws = RandomSource(14).standard_normal(600)
        result = distribution_check(draws, lambda v: float(stats.norm.cdf(v)))
        assert result.passed
