"""Batch score evaluation, in-process or across worker processes.

Failed evaluations (:class:`~seriesfit.core.EvaluationError`) and NaN
results become ``+inf`` so derivative-free methods can keep running
through bad parameter regions. Parallel evaluation preserves submission
order, which keeps multi-worker runs bit-identical to sequential ones.
"""

from __future__ import annotations

import math
import multiprocessing
from functools import partial

from .core import EvaluationError

__all__ = ["ParallelEvaluator", "SequentialEvaluator", "evaluator"]


def _safe_call(function, x):
    try:
        value = float(function(x))
    except EvaluationError:
        return math.inf
    return math.inf if math.isnan(value) else value


class SequentialEvaluator:
    """Evaluates points one by one in the calling process."""

    def __init__(self, function):
        self._function = function

    def evaluate(self, points):
        f = self._function
        return [_safe_call(f, x) for x in points]

    def close(self):
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


class ParallelEvaluator:
    """Evaluates points with a pool of worker processes.

    The score function and its arguments must be picklable. Results are
    returned in submission order regardless of completion order.
    """

    def __init__(self, function, workers):
        workers = int(workers)
        if workers < 1:
            raise ValueError("need at least one worker")
        self._function = function
        self._pool = multiprocessing.Pool(processes=workers)

    def evaluate(self, points):
        return self._pool.map(partial(_safe_call, self._function), list(points))

    def close(self):
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def evaluator(function, workers=1):
    """Return a sequential evaluator for ``workers == 1``, parallel otherwise."""
    if int(workers) <= 1:
        return SequentialEvaluator(function)
    return ParallelEvaluator(function, workers)
