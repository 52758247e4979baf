"""Shared scaffolding for the population optimizers.

Both optimizers work on flat float64 vectors inside a box, track a
best-ever candidate, and emit a per-iteration trace with a common CSV
schema. All randomness flows through one numpy Generator owned by the run
coordinator, so a fixed seed reproduces a run bit for bit; objective
evaluations never consume random numbers.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ObjectiveError


@dataclass
class Country:
    """One candidate solution: a parameter vector and its cached cost."""

    position: np.ndarray
    cost: float


@dataclass
class RunTrace:
    """Per-iteration optimizer progress plus the best candidate found."""

    step_name: str  # "decade" or "generation"
    best_cost: list[float] = field(default_factory=list)
    mean_leader_cost: list[float] = field(default_factory=list)
    num_groups: list[int] = field(default_factory=list)
    objective_calls: list[int] = field(default_factory=list)
    best: Country | None = None

    def append(self, best_cost: float, mean_leader_cost: float, num_groups: int,
               objective_calls: int):
        self.best_cost.append(best_cost)
        self.mean_leader_cost.append(mean_leader_cost)
        self.num_groups.append(num_groups)
        self.objective_calls.append(objective_calls)

    def __len__(self) -> int:
        return len(self.best_cost)


def write_trace_csv(trace: RunTrace, path):
    """Write the trace with the shared column layout.

    The first column is named after the optimizer's iteration unit; the
    rest are identical across optimizers so traces stay comparable.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"{trace.step_name},best_cost,mean_imperialist_cost,num_empires,objective_calls\n")
        for i in range(len(trace)):
            fh.write(
                f"{i + 1},{repr(trace.best_cost[i])},{repr(trace.mean_leader_cost[i])},"
                f"{trace.num_groups[i]},{trace.objective_calls[i]}\n"
            )


def resolve_bounds(bounds, dim: int):
    """Normalize a bounds spec to (low, high) float64 arrays of length dim.

    Accepts a (low, high) scalar pair, a pair of length-dim arrays, or a
    sequence of per-dimension (low, high) pairs.
    """
    arr = np.asarray(bounds, dtype=np.float64)
    if arr.shape == (2,):
        low = np.full(dim, arr[0])
        high = np.full(dim, arr[1])
    elif arr.shape == (2, dim):
        low, high = arr[0].copy(), arr[1].copy()
    elif arr.shape == (dim, 2):
        low, high = arr[:, 0].copy(), arr[:, 1].copy()
    else:
        raise ConfigError(f"cannot interpret bounds of shape {arr.shape} for dim {dim}")
    if not np.all(low < high):
        raise ConfigError("every dimension needs low < high bounds")
    return low, high


class CountingObjective:
    """Wraps a cost function, counting evaluations and rejecting non-finite costs.

    The wrapped object may be a plain callable mapping a 1-D vector to a
    float, or may expose a vectorized ``batch(positions) -> costs`` method.
    """

    def __init__(self, objective):
        self._objective = objective
        self._batch = getattr(objective, "batch", None)
        self.calls = 0

    def evaluate(self, positions: np.ndarray) -> np.ndarray:
        """Costs for an (m, dim) matrix of positions."""
        m = positions.shape[0]
        if m == 0:
            return np.empty(0, dtype=np.float64)
        if self._batch is not None:
            costs = np.asarray(self._batch(positions), dtype=np.float64)
        else:
            costs = np.array([self._objective(positions[i]) for i in range(m)],
                             dtype=np.float64)
        self.calls += m
        bad = np.flatnonzero(~np.isfinite(costs))
        if bad.size:
            i = int(bad[0])
            head = np.array2string(positions[i][:8], precision=6)
            raise ObjectiveError(
                f"objective returned {costs[i]!r} at position index {i}, vector {head}"
            )
        return costs

    def evaluate_one(self, position: np.ndarray) -> float:
        return float(self.evaluate(position.reshape(1, -1))[0])


class BestTracker:
    """Keeps the lowest-cost candidate ever observed."""

    def __init__(self):
        self.cost = np.inf
        self.position: np.ndarray | None = None

    def offer(self, positions: np.ndarray, costs: np.ndarray):
        if costs.size == 0:
            return
        i = int(np.argmin(costs))
        if costs[i] < self.cost:
            self.cost = float(costs[i])
            self.position = positions[i].copy()

    def offer_one(self, position: np.ndarray, cost: float):
        if cost < self.cost:
            self.cost = float(cost)
            self.position = position.copy()

    def as_country(self) -> Country:
        if self.position is None:
            raise ObjectiveError("no candidate was ever evaluated")
        return Country(position=self.position.copy(), cost=self.cost)
