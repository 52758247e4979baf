"""Real-coded genetic baseline with elitism, blend crossover, and Gaussian mutation.

Each generation is rebuilt from three blocks: the best individuals copied
unchanged, children blended from tournament-selected parents, and
tournament-selected individuals with Gaussian gene noise. Block sizes
follow configured fractions, with rounding remainders absorbed by the
mutation block. An alternative "rates" mode treats the crossover and
mutation numbers as per-individual probabilities instead.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass

from .errors import ConfigError, ShapeError
from .optim import BestTracker, Country, CountingObjective, RunTrace, resolve_bounds


@dataclass
class GaConfig:
    population_size: int = 1000
    num_generations: int = 200
    elite_fraction: float = 0.15
    crossover_fraction: float = 0.50
    mutation_fraction: float = 0.35
    per_gene_mutation_prob: float = 0.02
    mutation_sd_fraction: float = 0.1
    search_bounds: tuple = (-1.0, 1.0)
    seed: int = 0
    mode: str = "fractions"  # "fractions": next-generation composition; "rates": per-individual probabilities

    def validate(self):
        if self.population_size < 2:
            raise ConfigError(f"population_size must be >= 2, got {self.population_size}")
        if self.num_generations < 1:
            raise ConfigError(f"num_generations must be >= 1, got {self.num_generations}")
        for name in ("elite_fraction", "crossover_fraction", "mutation_fraction",
                     "per_gene_mutation_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {value}")
        if self.mutation_sd_fraction < 0:
            raise ConfigError(f"mutation_sd_fraction must be >= 0, got {self.mutation_sd_fraction}")
        if self.mode not in ("fractions", "rates"):
            raise ConfigError(f"mode must be 'fractions' or 'rates', got {self.mode!r}")
        if self.mode == "fractions":
            total = self.elite_fraction + self.crossover_fraction + self.mutation_fraction
            if abs(total - 1.0) > 1e-12:
                raise ConfigError(
                    f"elite + crossover + mutation fractions must sum to 1, got {total}"
                )


def select_parent(costs: np.ndarray, rng) -> int:
    """Binary tournament: two uniform draws, lower cost wins, ties split evenly.

    Returns the winning index.
    """
    n = costs.shape[0]
    if n == 0:
        raise ShapeError("cannot select from an empty population")
    i, j = rng.integers(0, n, size=2)
    if costs[i] < costs[j]:
        return int(i)
    if costs[j] < costs[i]:
        return int(j)
    return int(i if rng.random() < 0.5 else j)


def crossover(a: np.ndarray, b: np.ndarray, rng, low=None, high=None):
    """Whole-arithmetic blend: per gene, child1 = alpha*a + (1-alpha)*b, child2 mirrored."""
    if a.shape != b.shape:
        raise ShapeError(f"parents differ in shape: {a.shape} vs {b.shape}")
    alpha = rng.uniform(0.0, 1.0, size=a.shape)
    child1 = alpha * a + (1.0 - alpha) * b
    child2 = (1.0 - alpha) * a + alpha * b
    if low is not None:
        np.clip(child1, low, high, out=child1)
        np.clip(child2, low, high, out=child2)
    return child1, child2


def mutate(v: np.ndarray, rng, per_gene_prob: float, sd: np.ndarray, low, high) -> np.ndarray:
    """Per-gene Gaussian noise, applied with the given probability.

    sd is the per-dimension noise scale. If no gene is picked, one uniform
    random gene is forced so a mutant never equals its source by default.
    The result is clamped to bounds.
    """
    mask = rng.random(v.shape[0]) < per_gene_prob
    if not mask.any():
        mask[rng.integers(0, v.shape[0])] = True
    out = v.copy()
    idx = np.flatnonzero(mask)
    out[idx] += rng.standard_normal(idx.shape[0]) * sd[idx]
    np.clip(out, low, high, out=out)
    return out


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _block_sizes(config: GaConfig) -> tuple[int, int, int]:
    n = config.population_size
    n_elite = _round_half_up(config.elite_fraction * n)
    n_cross = _round_half_up(config.crossover_fraction * n)
    n_elite = min(n_elite, n)
    n_cross = min(n_cross, n - n_elite)
    return n_elite, n_cross, n - n_elite - n_cross


def run(config: GaConfig, objective, dim: int, observer=None) -> tuple[Country, RunTrace]:
    """Generational loop; returns the best individual ever seen and the trace."""
    config.validate()
    rng = np.random.default_rng(config.seed)
    evaluator = objective if isinstance(objective, CountingObjective) else CountingObjective(objective)
    low, high = resolve_bounds(config.search_bounds, dim)
    sd = config.mutation_sd_fraction * (high - low)

    population = rng.uniform(low, high, size=(config.population_size, dim))
    costs = evaluator.evaluate(population)
    tracker = BestTracker()
    tracker.offer(population, costs)

    n_elite, n_cross, n_mut = _block_sizes(config)
    trace = RunTrace(step_name="generation")

    for generation in range(1, config.num_generations + 1):
        order = np.argsort(costs, kind="stable")
        elite = population[order[:n_elite]].copy()
        elite_costs = costs[order[:n_elite]].copy()

        if config.mode == "fractions":
            children = _crossover_block(population, costs, n_cross, rng, low, high)
            mutants = _mutation_block(population, costs, n_mut, rng, config, sd, low, high)
        else:
            children, mutants = _rates_blocks(population, costs,
                                              config.population_size - n_elite,
                                              rng, config, sd, low, high)
        fresh = np.vstack([children, mutants]) if (len(children) or len(mutants)) \
            else np.empty((0, dim))
        fresh_costs = evaluator.evaluate(fresh)

        population = np.vstack([elite, fresh])
        costs = np.concatenate([elite_costs, fresh_costs])
        tracker.offer(population, costs)

        mean_elite = float(np.mean(elite_costs)) if n_elite else float(np.mean(costs))
        trace.append(tracker.cost, mean_elite, 1, evaluator.calls)
        if observer is not None:
            observer(generation, population, costs, tracker.cost)

    trace.best = tracker.as_country()
    return tracker.as_country(), trace


def _crossover_block(population, costs, n_cross, rng, low, high):
    children = []
    while len(children) < n_cross:
        pa = select_parent(costs, rng)
        pb = select_parent(costs, rng)
        c1, c2 = crossover(population[pa], population[pb], rng, low, high)
        children.append(c1)
        children.append(c2)
    return np.array(children[:n_cross]) if children else np.empty((0, population.shape[1]))


def _mutation_block(population, costs, n_mut, rng, config, sd, low, high):
    mutants = [
        mutate(population[select_parent(costs, rng)], rng,
               config.per_gene_mutation_prob, sd, low, high)
        for _ in range(n_mut)
    ]
    return np.array(mutants) if mutants else np.empty((0, population.shape[1]))


def _rates_blocks(population, costs, n_fill, rng, config, sd, low, high):
    """Alternative mode: crossover_fraction / mutation_fraction act as probabilities."""
    raw = []
    while len(raw) < n_fill:
        pa = select_parent(costs, rng)
        pb = select_parent(costs, rng)
        if rng.random() < config.crossover_fraction:
            c1, c2 = crossover(population[pa], population[pb], rng, low, high)
        else:
            c1, c2 = population[pa].copy(), population[pb].copy()
        raw.append(c1)
        raw.append(c2)
    out = []
    for child in raw[:n_fill]:
        if rng.random() < config.mutation_fraction:
            child = mutate(child, rng, config.per_gene_mutation_prob, sd, low, high)
        out.append(child)
    return np.array(out), np.empty((0, population.shape[1]))
