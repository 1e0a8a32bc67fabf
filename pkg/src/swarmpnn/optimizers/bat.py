"""Bat-inspired search: frequency-tuned velocities, loudness-gated greedy
acceptance and a loudness-scaled local walk around the best solution."""

from __future__ import annotations

import numpy as np

from .base import FeBudget, Optimizer, Population


class BatSearch(Optimizer):
    name = "bat"

    def __init__(self, dim, bounds, seed, loudness=10.0, alpha=0.9, gamma=0.9,
                 min_f=0.0, max_f=1.0):
        super().__init__(dim, bounds, seed)
        self.initial_loudness = float(loudness)
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        self.min_f = float(min_f)
        self.max_f = float(max_f)
        self._velocities = None
        self._loudness = None
        self._pulse0 = None
        self._pulse = None
        self._generation = 0

    def _attach(self, pop: Population) -> None:
        if self._velocities is None or len(self._velocities) != pop.size:
            self._velocities = np.zeros_like(pop.positions)
            self._loudness = np.full(pop.size, self.initial_loudness)
            self._pulse0 = self.rng.uniform(size=pop.size)
            self._pulse = self._pulse0.copy()

    def step(self, pop: Population, objective, budget: FeBudget) -> None:
        self._attach(pop)
        self.ensure_evaluated(pop, objective, budget)
        self.sync_archive(pop)
        if self.best_position is None:
            return
        self._generation += 1
        mean_loudness = float(self._loudness.mean())
        for i in range(pop.size):
            if self.halted(budget):
                return
            beta = self.rng.uniform()
            freq = self.min_f + (self.max_f - self.min_f) * beta
            self._velocities[i] += (pop.positions[i] - self.best_position) * freq
            candidate = pop.positions[i] + self._velocities[i]
            if self.rng.uniform() > self._pulse[i]:
                walk = self.rng.uniform(-1.0, 1.0, size=self.dim)
                candidate = self.best_position + walk * mean_loudness
            candidate = self.reflect(candidate)
            value = self.evaluate(candidate, objective, budget)
            if value <= pop.fitness[i] and self.rng.uniform() < self._loudness[i]:
                pop.positions[i] = candidate
                pop.fitness[i] = value
                self._loudness[i] *= self.alpha
                self._pulse[i] = self._pulse0[i] * (
                    1.0 - np.exp(-self.gamma * self._generation))
