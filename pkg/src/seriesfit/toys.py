"""Analytic benchmark models and targets with known optima and moments.

These are the workhorses of the test suite: a closed-form logistic growth
model (no ODE solver involved), the Rosenbrock valley for optimisers, and
Gaussian / banana / bimodal targets with documented means and covariances
for checking samplers statistically.
"""

from __future__ import annotations

import math

import numpy as np

from .core import ForwardModel, TimeSeriesProblem, as_parameter_vector, simulate
from .densities import GaussianLogPrior, LogPDF
from .measures import ErrorMeasure

__all__ = [
    "BimodalTarget",
    "ConstantModel",
    "GaussianTarget",
    "LogisticModel",
    "RosenbrockError",
    "TwistedGaussianTarget",
    "generate_synthetic_data",
]


class ConstantModel(ForwardModel):
    """Outputs one constant level per output: output j is ``parameters[j]``."""

    def __init__(self, n_outputs=1):
        super().__init__(n_parameters=n_outputs, n_outputs=n_outputs)

    def simulate(self, parameters, times):
        return np.tile(np.asarray(parameters, dtype=float), (len(times), 1))


class LogisticModel(ForwardModel):
    """Logistic growth with parameters (r, K) and fixed initial value y0.

        y(t) = K / (1 + (K / y0 - 1) * exp(-r * t))

    y(0) equals y0 exactly and y tends to the carrying capacity K for
    r > 0. The initial value is fixed (not inferred) so the standard
    calibration problem stays two-dimensional.
    """

    def __init__(self, y0=1.0):
        super().__init__(n_parameters=2)
        y0 = float(y0)
        if not (y0 > 0 and math.isfinite(y0)):
            raise ValueError("initial value y0 must be positive and finite")
        self._y0 = y0

    @property
    def y0(self):
        return self._y0

    def simulate(self, parameters, times):
        r, k = parameters
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            return k / (1.0 + (k / self._y0 - 1.0) * np.exp(-r * np.asarray(times)))


class RosenbrockError(ErrorMeasure):
    """The 2-d Rosenbrock valley, minimum 0 at (1, 1)."""

    @property
    def n_parameters(self):
        return 2

    def __call__(self, parameters):
        x, y = as_parameter_vector(parameters, 2)
        return float((1.0 - x) ** 2 + 100.0 * (y - x * x) ** 2)


class GaussianTarget(GaussianLogPrior):
    """Multivariate normal benchmark target (mean and covariance exact)."""


class TwistedGaussianTarget(LogPDF):
    """Banana-shaped 2-d target obtained by warping a wide Gaussian.

    The variables (x1, x2 + b*x1**2 - 100*b) are independent normals with
    variances (100, 1), so the warp parameter ``b`` bends the long axis
    into a curved ridge. Analytic moments: mean (0, 0), covariance
    diag(100, 1 + 20000*b**2).
    """

    def __init__(self, b=0.1):
        self._b = float(b)

    @property
    def b(self):
        return self._b

    @property
    def mean(self):
        return np.zeros(2)

    @property
    def covariance(self):
        return np.diag([100.0, 1.0 + 20000.0 * self._b ** 2])

    @property
    def n_parameters(self):
        return 2

    def __call__(self, parameters):
        x1, x2 = as_parameter_vector(parameters, 2)
        u = x2 + self._b * x1 * x1 - 100.0 * self._b
        log_norm = -math.log(2.0 * math.pi) - 0.5 * math.log(100.0)
        return log_norm - 0.5 * (x1 * x1 / 100.0 + u * u)


class BimodalTarget(LogPDF):
    """1-d mixture of two unit-variance normals at -separation and +separation.

    With weights (w1, w2) the analytic mean is separation * (w2 - w1) and
    the variance is 1 + separation**2 - mean**2.
    """

    def __init__(self, separation=5.0, weights=(0.5, 0.5)):
        self._separation = float(separation)
        w = np.asarray(weights, dtype=float)
        if w.shape != (2,) or np.any(w <= 0):
            raise ValueError("weights must be two positive numbers")
        self._weights = w / np.sum(w)

    @property
    def separation(self):
        return self._separation

    @property
    def weights(self):
        return self._weights.copy()

    @property
    def mean(self):
        return self._separation * (self._weights[1] - self._weights[0])

    @property
    def variance(self):
        return 1.0 + self._separation ** 2 - self.mean ** 2

    @property
    def n_parameters(self):
        return 1

    def __call__(self, parameters):
        (x,) = as_parameter_vector(parameters, 1)
        s = self._separation
        log_norm = -0.5 * math.log(2.0 * math.pi)
        a = math.log(self._weights[0]) - 0.5 * (x + s) ** 2
        b = math.log(self._weights[1]) - 0.5 * (x - s) ** 2
        hi = max(a, b)
        return log_norm + hi + math.log1p(math.exp(min(a, b) - hi))


def generate_synthetic_data(model, parameters, times, sigma, rng):
    """Simulate ``model`` and add i.i.d. Gaussian noise of std ``sigma``.

    ``sigma`` may be a scalar or one value per output; ``sigma=0`` gives
    noiseless data. The true parameters and noise level are recorded in the
    returned problem's metadata.
    """
    x = as_parameter_vector(parameters, model.n_parameters)
    y = simulate(model, x, times)
    s = np.atleast_1d(np.asarray(sigma, dtype=float))
    if s.shape == (1,) and model.n_outputs > 1:
        s = np.repeat(s, model.n_outputs)
    if s.shape != (model.n_outputs,):
        raise ValueError(f"expected {model.n_outputs} noise values, got shape {s.shape}")
    if np.any(s < 0):
        raise ValueError("noise standard deviations must be non-negative")
    noise = rng.standard_normal(y.shape) * s
    return TimeSeriesProblem(
        model, times, y + noise,
        metadata={"true_parameters": x.tolist(), "noise_sigma": s.tolist()})
