"""Flower pollination: Levy-flight moves toward the best solution with
probability ``switch_p``, otherwise local mixing of two random members."""

from __future__ import annotations

import math

import numpy as np

from .base import FeBudget, Optimizer, Population

LEVY_BETA = 1.5


def _levy_sigma(beta: float) -> float:
    return (
        math.gamma(1.0 + beta) * math.sin(math.pi * beta / 2.0)
        / (math.gamma((1.0 + beta) / 2.0) * beta * 2.0 ** ((beta - 1.0) / 2.0))
    ) ** (1.0 / beta)


class FlowerPollination(Optimizer):
    name = "fpa"

    def __init__(self, dim, bounds, seed, switch_p=0.8):
        super().__init__(dim, bounds, seed)
        self.switch_p = float(switch_p)
        self._sigma = _levy_sigma(LEVY_BETA)

    def _levy_steps(self) -> np.ndarray:
        u = self.rng.normal(0.0, self._sigma, size=self.dim)
        v = self.rng.normal(0.0, 1.0, size=self.dim)
        return u / np.abs(v) ** (1.0 / LEVY_BETA)

    def step(self, pop: Population, objective, budget: FeBudget) -> None:
        self.ensure_evaluated(pop, objective, budget)
        self.sync_archive(pop)
        if self.best_position is None:
            return
        for i in range(pop.size):
            if self.halted(budget):
                return
            if self.rng.uniform() < self.switch_p:
                steps = self._levy_steps()
                candidate = pop.positions[i] + steps * (
                    self.best_position - pop.positions[i])
            else:
                a, b = self.rng.choice(pop.size, size=2, replace=False)
                eps = self.rng.uniform()
                candidate = pop.positions[i] + eps * (
                    pop.positions[a] - pop.positions[b])
            candidate = self.reflect(candidate)
            value = self.evaluate(candidate, objective, budget)
            if value < pop.fitness[i]:
                pop.positions[i] = candidate
                pop.fitness[i] = value
