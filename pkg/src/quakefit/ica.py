"""Imperialist competitive optimizer over flat real vectors.

A random population of countries is ranked by cost; the best become
imperialists and the rest are dealt to them as colonies in proportion to
relative imperialist power. Each decade colonies drift toward their
imperialist (assimilation), a fraction is re-rolled uniformly
(revolution), a colony that beats its imperialist takes over (swap), and
the weakest empire loses its weakest colony to a stronger rival
(competition) until empires collapse into one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .optim import BestTracker, Country, CountingObjective, RunTrace, resolve_bounds


@dataclass
class IcaConfig:
    num_countries: int = 1000
    num_imperialists: int = 100
    num_decades: int = 200
    assimilation_coeff: float = 2.0
    colony_cost_weight: float = 0.05
    revolution_rate: float = 0.1
    search_bounds: tuple = (-1.0, 1.0)
    seed: int = 0
    convergence_epsilon: float = 1e-6

    def validate(self):
        if not 1 <= self.num_imperialists < self.num_countries:
            raise ConfigError(
                f"need 1 <= num_imperialists < num_countries, got "
                f"{self.num_imperialists} / {self.num_countries}"
            )
        if self.num_decades < 1:
            raise ConfigError(f"num_decades must be >= 1, got {self.num_decades}")
        if self.assimilation_coeff <= 0:
            raise ConfigError(f"assimilation_coeff must be > 0, got {self.assimilation_coeff}")
        if not 0.0 <= self.colony_cost_weight <= 1.0:
            raise ConfigError(f"colony_cost_weight must be in [0, 1], got {self.colony_cost_weight}")
        if not 0.0 <= self.revolution_rate <= 1.0:
            raise ConfigError(f"revolution_rate must be in [0, 1], got {self.revolution_rate}")


@dataclass
class Empire:
    """An imperialist with its colonies; costs are kept in step with positions."""

    imperialist_position: np.ndarray
    imperialist_cost: float
    colony_positions: np.ndarray  # (k, dim)
    colony_costs: np.ndarray  # (k,)

    @property
    def n_colonies(self) -> int:
        return self.colony_costs.shape[0]

    @property
    def n_countries(self) -> int:
        return 1 + self.n_colonies

    def total_cost(self, colony_cost_weight: float) -> float:
        colony_part = float(np.mean(self.colony_costs)) if self.n_colonies else 0.0
        return self.imperialist_cost + colony_cost_weight * colony_part


def _as_evaluator(objective):
    return objective if isinstance(objective, CountingObjective) else CountingObjective(objective)


def _apportion_colonies(imperialist_costs: np.ndarray, n_colonies: int) -> np.ndarray:
    """Colony counts per imperialist, proportional to normalized power.

    Power of imperialist n is its cost minus the worst imperialist cost;
    the share is the power normalized by the total. Counts are assigned by
    largest remainder, and every empire keeps at least one colony when
    there are enough to go around.
    """
    n_imp = imperialist_costs.shape[0]
    power = imperialist_costs - imperialist_costs.max()
    total = power.sum()
    if total == 0.0:
        share = np.full(n_imp, 1.0 / n_imp)
    else:
        share = np.abs(power / total)
    raw = share * n_colonies
    counts = np.floor(raw).astype(int)
    remainder = n_colonies - counts.sum()
    if remainder > 0:
        order = np.lexsort((np.arange(n_imp), -(raw - counts)))
        counts[order[:remainder]] += 1
    if n_colonies >= n_imp:
        for i in range(n_imp):
            if counts[i] == 0:
                donor = int(np.argmax(counts))
                counts[donor] -= 1
                counts[i] += 1
    return counts


def initialize(config: IcaConfig, objective, dim: int, rng=None) -> list[Empire]:
    """Sample the initial countries and deal them into empires."""
    config.validate()
    if dim < 1:
        raise ConfigError(f"dim must be >= 1, got {dim}")
    if rng is None:
        rng = np.random.default_rng(config.seed)
    low, high = resolve_bounds(config.search_bounds, dim)
    evaluator = _as_evaluator(objective)
    positions = rng.uniform(low, high, size=(config.num_countries, dim))
    costs = evaluator.evaluate(positions)

    order = np.argsort(costs, kind="stable")
    positions = positions[order]
    costs = costs[order]
    n_imp = config.num_imperialists
    n_col = config.num_countries - n_imp
    counts = _apportion_colonies(costs[:n_imp], n_col)

    colony_pool = rng.permutation(n_col) + n_imp
    empires = []
    start = 0
    for i in range(n_imp):
        picked = colony_pool[start:start + counts[i]]
        start += counts[i]
        empires.append(Empire(
            imperialist_position=positions[i].copy(),
            imperialist_cost=float(costs[i]),
            colony_positions=positions[picked].copy(),
            colony_costs=costs[picked].copy(),
        ))
    return empires


def assimilate(empire: Empire, objective, coeff: float, low, high, rng) -> Empire:
    """Move every colony toward the imperialist.

    Each dimension advances by an independent U(0, coeff) fraction of its
    gap to the imperialist, so with coeff 2 a colony can overshoot. Moved
    colonies are clamped to bounds and re-costed.
    """
    k = empire.n_colonies
    if k == 0:
        return empire
    evaluator = _as_evaluator(objective)
    steps = rng.uniform(0.0, coeff, size=(k, empire.colony_positions.shape[1]))
    empire.colony_positions += steps * (empire.imperialist_position - empire.colony_positions)
    np.clip(empire.colony_positions, low, high, out=empire.colony_positions)
    empire.colony_costs = evaluator.evaluate(empire.colony_positions)
    return empire


def revolve(empire: Empire, objective, rate: float, low, high, rng) -> Empire:
    """Re-roll floor(rate * colonies) randomly chosen colonies uniformly in bounds."""
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"revolution rate must be in [0, 1], got {rate}")
    n_revolve = int(math.floor(rate * empire.n_colonies))
    if n_revolve == 0:
        return empire
    evaluator = _as_evaluator(objective)
    chosen = rng.choice(empire.n_colonies, size=n_revolve, replace=False)
    dim = empire.colony_positions.shape[1]
    fresh = rng.uniform(low, high, size=(n_revolve, dim))
    empire.colony_positions[chosen] = fresh
    empire.colony_costs[chosen] = evaluator.evaluate(fresh)
    return empire


def swap_if_better(empire: Empire) -> Empire:
    """Exchange roles when a colony beats the imperialist (first best wins ties)."""
    if empire.n_colonies == 0:
        return empire
    j = int(np.argmin(empire.colony_costs))
    if empire.colony_costs[j] < empire.imperialist_cost:
        old_pos = empire.imperialist_position.copy()
        old_cost = empire.imperialist_cost
        empire.imperialist_position = empire.colony_positions[j].copy()
        empire.imperialist_cost = float(empire.colony_costs[j])
        empire.colony_positions[j] = old_pos
        empire.colony_costs[j] = old_cost
    return empire


def _give_colony(winner: Empire, position: np.ndarray, cost: float):
    winner.colony_positions = np.vstack([winner.colony_positions, position[None, :]]) \
        if winner.n_colonies else position[None, :].copy()
    winner.colony_costs = np.append(winner.colony_costs, cost)


def compete(empires: list[Empire], colony_cost_weight: float, rng) -> list[Empire]:
    """One imperialistic-competition event.

    The weakest empire (largest total cost) surrenders its weakest colony
    to a winner drawn with probability proportional to power (total-cost
    deficit against the weakest). A weakest empire that already has no
    colonies dissolves instead: its imperialist joins the winner as a
    colony. Dissolution therefore takes a later event than the transfer
    that emptied the empire.
    """
    if len(empires) < 2:
        return empires
    totals = np.array([e.total_cost(colony_cost_weight) for e in empires])
    weakest = int(np.argmax(totals))
    power = np.maximum(totals.max() - totals, 0.0)
    power[weakest] = 0.0
    if power.sum() == 0.0:
        probs = np.ones(len(empires))
        probs[weakest] = 0.0
        probs /= probs.sum()
    else:
        probs = power / power.sum()
    winner_idx = int(rng.choice(len(empires), p=probs))
    winner = empires[winner_idx]
    loser = empires[weakest]

    if loser.n_colonies > 0:
        j = int(np.argmax(loser.colony_costs))
        _give_colony(winner, loser.colony_positions[j].copy(), float(loser.colony_costs[j]))
        keep = np.ones(loser.n_colonies, dtype=bool)
        keep[j] = False
        loser.colony_positions = loser.colony_positions[keep]
        loser.colony_costs = loser.colony_costs[keep]
    else:
        _give_colony(winner, loser.imperialist_position.copy(), loser.imperialist_cost)
        empires = [e for i, e in enumerate(empires) if i != weakest]
    return empires


def run(config: IcaConfig, objective, dim: int, observer=None) -> tuple[Country, RunTrace]:
    """Full optimization loop; returns the best country ever seen and the trace.

    Stops after num_decades, or earlier once a single empire remains whose
    mean colony cost sits within convergence_epsilon of its imperialist.
    The optional observer(decade, empires, best_cost) is called each decade
    after assimilation, revolution, and the swap step, before competition
    reshapes empire membership.
    """
    config.validate()
    rng = np.random.default_rng(config.seed)
    evaluator = _as_evaluator(objective)
    low, high = resolve_bounds(config.search_bounds, dim)
    empires = initialize(config, evaluator, dim, rng=rng)

    tracker = BestTracker()
    for empire in empires:
        tracker.offer_one(empire.imperialist_position, empire.imperialist_cost)
        tracker.offer(empire.colony_positions, empire.colony_costs)

    trace = RunTrace(step_name="decade")
    for decade in range(1, config.num_decades + 1):
        for empire in empires:
            assimilate(empire, evaluator, config.assimilation_coeff, low, high, rng)
            revolve(empire, evaluator, config.revolution_rate, low, high, rng)
            swap_if_better(empire)
            # post-swap the imperialist is the empire minimum, and competition
            # never changes costs, so offering imperialists here sees every
            # live country's cost
            tracker.offer_one(empire.imperialist_position, empire.imperialist_cost)
        if observer is not None:
            observer(decade, empires, tracker.cost)
        empires = compete(empires, config.colony_cost_weight, rng)
        mean_imp = float(np.mean([e.imperialist_cost for e in empires]))
        trace.append(tracker.cost, mean_imp, len(empires), evaluator.calls)
        if len(empires) == 1:
            lone = empires[0]
            spread = (float(np.mean(lone.colony_costs)) - lone.imperialist_cost
                      if lone.n_colonies else 0.0)
            if abs(spread) < config.convergence_epsilon:
                break
    trace.best = tracker.as_country()
    return tracker.as_country(), trace
