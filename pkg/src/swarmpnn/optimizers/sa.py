"""Simulated annealing over a population of independent annealers sharing
one temperature schedule with Boltzmann acceptance."""

from __future__ import annotations

import numpy as np

from .base import FeBudget, Optimizer, Population


class SimulatedAnnealing(Optimizer):
    name = "sa"

    def __init__(self, dim, bounds, seed, temperature=100.0, alpha=0.9,
                 s_t=1e-8, d=0.01):
        super().__init__(dim, bounds, seed)
        self.initial_temperature = float(temperature)
        self.alpha = float(alpha)
        self.s_t = float(s_t)
        self.d = float(d)
        self.temperature = float(temperature)

    def step(self, pop: Population, objective, budget: FeBudget) -> None:
        self.ensure_evaluated(pop, objective, budget)
        self.sync_archive(pop)
        sigma = self.d * (self.upper - self.lower)
        for i in range(pop.size):
            if self.halted(budget):
                return
            proposal = self.reflect(
                pop.positions[i] + self.rng.normal(0.0, sigma, size=self.dim))
            value = self.evaluate(proposal, objective, budget)
            delta = value - pop.fitness[i]
            if delta <= 0.0 or self.rng.uniform() < np.exp(-delta / self.temperature):
                pop.positions[i] = proposal
                pop.fitness[i] = value
        self.temperature *= self.alpha
        if self.temperature < self.s_t:
            # restart the cooling schedule while budget remains
            self.temperature = self.initial_temperature
