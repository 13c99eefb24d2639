"""Forward-model contract, time-series problems and the seedable random source.

Everything downstream (error measures, log-densities, optimisers, samplers)
is built on three things defined here: a :class:`ForwardModel` that turns a
parameter vector into simulated outputs, a :class:`TimeSeriesProblem` that
pairs a model with observed data, and a :class:`RandomSource` that makes
every stochastic method reproducible from a single 64-bit seed.
"""

from __future__ import annotations

import abc

import numpy as np

__all__ = [
    "EvaluationError",
    "ForwardModel",
    "RandomSource",
    "TimeSeriesProblem",
    "as_parameter_vector",
    "residuals",
    "simulate",
]


class EvaluationError(RuntimeError):
    """A forward simulation failed (overflow, solver breakdown, bad output).

    Carries the parameter vector that caused the failure so that controllers
    can report it. Optimisers and samplers treat a failed evaluation as an
    infinitely bad score instead of aborting the run.
    """

    def __init__(self, message, parameters=None):
        super().__init__(message)
        self.parameters = None if parameters is None else np.asarray(parameters, dtype=float)


def as_parameter_vector(values, n_parameters=None):
    """Validate and return ``values`` as a 1-d float array.

    Raises ``ValueError`` if the input is not one-dimensional, contains
    non-finite entries, or (when ``n_parameters`` is given) has the wrong
    length.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"parameter vector must be 1-d, got shape {x.shape}")
    if n_parameters is not None and x.shape[0] != int(n_parameters):
        raise ValueError(
            f"expected a parameter vector of length {int(n_parameters)}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"parameter vector contains non-finite entries: {x!r}")
    return x


class ForwardModel(abc.ABC):
    """A deterministic simulator mapping parameters to time-series outputs.

    Subclasses call ``super().__init__(n_parameters, n_outputs)`` and
    implement :meth:`simulate`. ``simulate`` must be deterministic: identical
    ``(parameters, times)`` inputs yield identical outputs. Set
    ``parallel_safe=False`` if an implementation cannot be invoked
    concurrently from several worker processes.
    """

    def __init__(self, n_parameters, n_outputs=1, parallel_safe=True):
        n_parameters = int(n_parameters)
        n_outputs = int(n_outputs)
        if n_parameters < 1:
            raise ValueError("a model needs at least one parameter")
        if n_outputs < 1:
            raise ValueError("a model needs at least one output")
        self._n_parameters = n_parameters
        self._n_outputs = n_outputs
        self._parallel_safe = bool(parallel_safe)

    @property
    def n_parameters(self):
        return self._n_parameters

    @property
    def n_outputs(self):
        return self._n_outputs

    @property
    def parallel_safe(self):
        return self._parallel_safe

    @abc.abstractmethod
    def simulate(self, parameters, times):
        """Return model outputs at ``times``, shape ``(len(times), n_outputs)``.

        A 1-d return value is accepted for single-output models.
        Implementations should raise :class:`EvaluationError` on internal
        failure; any other exception or a non-finite output is converted to
        one by :func:`simulate`.
        """


def _validate_times(times):
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.shape[0] < 1:
        raise ValueError("times must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(t)):
        raise ValueError("times contain non-finite values")
    if t.shape[0] > 1 and not np.all(np.diff(t) > 0):
        raise ValueError("times must be strictly increasing")
    return t


def simulate(model, parameters, times, _validated_times=False):
    """Run ``model`` at ``parameters`` over ``times`` and validate the output.

    Returns an array of shape ``(len(times), n_outputs)``. Dimension
    mismatches raise ``ValueError``; model-internal failures (including
    non-finite outputs) raise :class:`EvaluationError` carrying the
    offending parameter vector.
    """
    x = as_parameter_vector(parameters, model.n_parameters)
    t = np.asarray(times, dtype=float) if _validated_times else _validate_times(times)
    try:
        y = np.asarray(model.simulate(x, t), dtype=float)
    except EvaluationError:
        raise
    except Exception as e:
        raise EvaluationError(f"model simulation failed: {e}", parameters=x) from e
    if y.ndim == 1:
        y = y.reshape(-1, 1)
    if y.shape != (t.shape[0], model.n_outputs):
        raise ValueError(
            f"model returned shape {y.shape}, expected {(t.shape[0], model.n_outputs)}")
    if not np.all(np.isfinite(y)):
        raise EvaluationError("model produced non-finite output", parameters=x)
    return y


class TimeSeriesProblem:
    """A forward model plus sampling times and observed values.

    ``observations`` must have one row per time point and one column per
    model output (a 1-d sequence is accepted for single-output models).
    All inputs are validated eagerly here so that evaluation, the hot path,
    does not re-check them.
    """

    def __init__(self, model, times, observations, metadata=None):
        self._model = model
        self._times = _validate_times(times)
        obs = np.asarray(observations, dtype=float)
        if obs.ndim == 1:
            obs = obs.reshape(-1, 1)
        if obs.ndim != 2:
            raise ValueError(f"observations must be 1-d or 2-d, got shape {obs.shape}")
        if obs.shape[0] != self._times.shape[0]:
            raise ValueError(
                f"got {obs.shape[0]} observation rows for {self._times.shape[0]} times")
        if obs.shape[1] != model.n_outputs:
            raise ValueError(
                f"got {obs.shape[1]} observation columns for a model with "
                f"{model.n_outputs} outputs")
        if not np.all(np.isfinite(obs)):
            raise ValueError("observations contain non-finite values")
        self._observations = obs
        self._times.flags.writeable = False
        self._observations.flags.writeable = False
        self.metadata = dict(metadata) if metadata else {}

    @property
    def model(self):
        return self._model

    @property
    def times(self):
        return self._times

    @property
    def observations(self):
        return self._observations

    @property
    def n_parameters(self):
        return self._model.n_parameters

    @property
    def n_outputs(self):
        return self._model.n_outputs

    @property
    def n_times(self):
        return self._times.shape[0]

    @property
    def parallel_safe(self):
        return self._model.parallel_safe

    def simulate(self, parameters):
        """Simulate the model at this problem's time points."""
        return simulate(self._model, parameters, self._times, _validated_times=True)

    def residuals(self, parameters):
        """Return ``simulate(parameters) - observations``."""
        return self.simulate(parameters) - self._observations


def residuals(problem, parameters):
    """Functional alias for :meth:`TimeSeriesProblem.residuals`."""
    return problem.residuals(parameters)


class RandomSource:
    """Seedable random source shared by all stochastic methods.

    Wraps a fixed, well-known 64-bit generator (PCG64) so that identical
    seeds produce identical draw sequences across runs and platforms. The
    generator identity is recorded in run metadata as :data:`ALGORITHM`.

    A source is never shared between workers or chains; use :meth:`split`
    to derive an independent sub-stream.
    """

    ALGORITHM = "pcg64"

    def __init__(self, seed):
        seed = int(seed)
        if not 0 <= seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self._seed = seed
        self._generator = np.random.Generator(np.random.PCG64(seed))

    @property
    def seed(self):
        return self._seed

    @property
    def generator(self):
        """The underlying :class:`numpy.random.Generator`."""
        return self._generator

    def split(self, index):
        """Return a new source with seed ``seed XOR (index + 1)``.

        Used to give worker ``index`` (or chain ``index``) its own stream
        while keeping the whole run reproducible from one seed.
        """
        index = int(index)
        if index < 0:
            raise ValueError("split index must be non-negative")
        return RandomSource(self._seed ^ (index + 1))

    # Thin draw helpers; anything else goes through .generator.
    def random(self, size=None):
        return self._generator.random(size)

    def standard_normal(self, size=None):
        return self._generator.standard_normal(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        return self._generator.uniform(low, high, size)

    def integers(self, low, high=None, size=None):
        return self._generator.integers(low, high, size)

    def __repr__(self):
        return f"RandomSource(seed={self._seed})"
