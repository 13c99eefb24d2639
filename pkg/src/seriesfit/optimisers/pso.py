"""Particle swarm optimisation with constriction-factor defaults.

Velocity update per particle: v <- w v + c1 r1 (pbest - x) + c2 r2 (gbest - x)
with w = 0.729 and c1 = c2 = 1.494. Particles start uniformly in
x0 +/- 3 sigma0 and velocities are clamped per coordinate to the width of
that initial box. Only score comparisons drive the update, so proposals
are invariant under strictly monotone score transformations.
"""

from __future__ import annotations

import math

import numpy as np

from .base import Optimiser

__all__ = ["PSO"]


class PSO(Optimiser):
    """Particle swarm minimiser with default swarm 10 + floor(2 sqrt(n))."""

    def __init__(self, x0, sigma0=0.1, population_size=None, rng=None,
                 inertia=0.729, cognitive=1.494, social=1.494):
        super().__init__(x0, sigma0, rng)
        swarm = int(population_size) if population_size \
            else 10 + int(2 * math.sqrt(self._n))
        if swarm < 2:
            raise ValueError("swarm size must be at least 2")
        self._swarm = swarm
        self._inertia = float(inertia)
        self._cognitive = float(cognitive)
        self._social = float(social)

        half_box = 3.0 * self._sigma0
        self._v_max = 2.0 * half_box
        u = self._rng.random((swarm, self._n))
        self._positions = self._x0 + (2.0 * u - 1.0) * half_box
        self._velocities = np.zeros((swarm, self._n))
        self._pbest_positions = None
        self._pbest_scores = np.full(swarm, math.inf)
        self._gbest_position = None
        self._gbest_score = math.inf

    @property
    def name(self):
        return "pso"

    @property
    def population_size(self):
        return self._swarm

    @property
    def positions(self):
        return self._positions.copy()

    @property
    def velocities(self):
        return self._velocities.copy()

    @property
    def personal_best_points(self):
        return None if self._pbest_positions is None else self._pbest_positions.copy()

    @property
    def personal_best_scores(self):
        return self._pbest_scores.copy()

    @property
    def global_best_point(self):
        return None if self._gbest_position is None else self._gbest_position.copy()

    def hyperparameters(self):
        return {
            "population_size": self._swarm,
            "inertia": self._inertia,
            "cognitive": self._cognitive,
            "social": self._social,
        }

    def _ask(self):
        if self._pbest_positions is not None:
            r1 = self._rng.random((self._swarm, self._n))
            r2 = self._rng.random((self._swarm, self._n))
            self._velocities = (
                self._inertia * self._velocities
                + self._cognitive * r1 * (self._pbest_positions - self._positions)
                + self._social * r2 * (self._gbest_position - self._positions))
            np.clip(self._velocities, -self._v_max, self._v_max,
                    out=self._velocities)
            self._positions = self._positions + self._velocities
        return self._positions

    def _tell(self, scores):
        if self._pbest_positions is None:
            self._pbest_positions = self._positions.copy()
            self._pbest_scores = scores.copy()
        else:
            improved = scores < self._pbest_scores
            self._pbest_positions[improved] = self._positions[improved]
            self._pbest_scores[improved] = scores[improved]
        # strict improvement, first seen wins
        for i in range(self._swarm):
            if self._pbest_scores[i] < self._gbest_score:
                self._gbest_score = float(self._pbest_scores[i])
                self._gbest_position = self._pbest_positions[i].copy()
        if self._gbest_position is None:
            # every score so far is +inf; anchor on the first particle
            self._gbest_position = self._pbest_positions[0].copy()
