"""Particle swarm optimization, canonical global-best formulation."""

from __future__ import annotations

import numpy as np

from .base import FeBudget, Optimizer, Population

OMEGA_END = 0.4  # inertia floor reached when the FE budget runs out


class ParticleSwarm(Optimizer):
    name = "pso"

    def __init__(self, dim, bounds, seed, omega=1.0, c1=0.5, c2=1.0,
                 adjust_omega=True):
        super().__init__(dim, bounds, seed)
        self.omega = float(omega)
        self.c1 = float(c1)
        self.c2 = float(c2)
        self.adjust_omega = bool(adjust_omega)
        self._velocities = None
        self._pbest = None
        self._pbest_fit = None

    def _attach(self, pop: Population) -> None:
        if self._velocities is None or len(self._velocities) != pop.size:
            self._velocities = np.zeros_like(pop.positions)
            self._pbest = pop.positions.copy()
            self._pbest_fit = np.full(pop.size, np.inf)

    def _current_omega(self, budget: FeBudget) -> float:
        if not self.adjust_omega or not np.isfinite(budget.cap) or budget.cap <= 0:
            return self.omega
        progress = min(1.0, budget.used / budget.cap)
        return self.omega + (OMEGA_END - self.omega) * progress

    def step(self, pop: Population, objective, budget: FeBudget) -> None:
        self._attach(pop)
        self.ensure_evaluated(pop, objective, budget)
        improved = pop.fitness < self._pbest_fit
        self._pbest[improved] = pop.positions[improved]
        self._pbest_fit[improved] = pop.fitness[improved]
        self.sync_archive(pop)
        if self.best_position is None:
            return
        omega = self._current_omega(budget)
        for i in range(pop.size):
            if self.halted(budget):
                return
            r1 = self.rng.uniform(size=self.dim)
            r2 = self.rng.uniform(size=self.dim)
            self._velocities[i] = (
                omega * self._velocities[i]
                + self.c1 * r1 * (self._pbest[i] - pop.positions[i])
                + self.c2 * r2 * (self.best_position - pop.positions[i])
            )
            pop.positions[i] = self.reflect(pop.positions[i] + self._velocities[i])
            pop.fitness[i] = self.evaluate(pop.positions[i], objective, budget)
            if pop.fitness[i] < self._pbest_fit[i]:
                self._pbest[i] = pop.positions[i].copy()
                self._pbest_fit[i] = pop.fitness[i]
