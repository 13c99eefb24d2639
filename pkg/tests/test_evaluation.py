import math

import numpy as np
import pytest

from seriesfit import EvaluationError, ParallelEvaluator, SequentialEvaluator, evaluator

from helpers import sphere


def flaky(x):
    if x[0] > 1.0:
        raise EvaluationError("out of range", parameters=x)
    if x[0] < -1.0:
        return math.nan
    return float(x[0])


POINTS = [np.array([v]) for v in (-2.0, -0.5, 0.0, 0.5, 2.0)]


def test_sequential_maps_failures_to_inf():
    results = SequentialEvaluator(flaky).evaluate(POINTS)
    assert results == [math.inf, -0.5, 0.0, 0.5, math.inf]


def test_parallel_matches_sequential_in_order():
    with ParallelEvaluator(flaky, workers=3) as parallel:
        assert parallel.evaluate(POINTS) == SequentialEvaluator(flaky).evaluate(POINTS)


def test_parallel_preserves_submission_order():
    points = [np.array([float(i)]) for i in range(20)]
    with ParallelEvaluator(sphere, workers=4) as parallel:
        assert parallel.evaluate(points) == [float(i * i) for i in range(20)]


def test_factory_picks_implementation():
    assert isinstance(evaluator(sphere, 1), SequentialEvaluator)
    parallel = evaluator(sphere, 2)
    assert isinstance(parallel, ParallelEvaluator)
    parallel.close()


def test_worker_count_validated():
    with pytest.raises(ValueError):
        ParallelEvaluator(sphere, workers=0)
