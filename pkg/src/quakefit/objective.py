"""Cost functions for the optimizers.

The regression objective scores a flat parameter vector by running the
network over a feature matrix and returning the mean squared error
against the targets. Each candidate is scored independently of the rest
of its population, so batch evaluation (threaded or not) returns exactly
the same numbers as scoring candidates one at a time.
"""

from __future__ import annotations

import numpy as np

from concurrent.futures import ThreadPoolExecutor

from . import kernels, metrics
from .errors import ConfigError, ShapeError
from .mlp import MlpTopology


class RegressionObjective:
    """Mean squared error of the network on a fixed (features, targets) pair."""

    def __init__(self, topology: MlpTopology, features: np.ndarray, targets: np.ndarray,
                 threads: int = 1):
        if threads < 1:
            raise ConfigError(f"threads must be >= 1, got {threads}")
        features = np.ascontiguousarray(features, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64).ravel()
        if features.ndim != 2:
            raise ShapeError(f"features must be 2-d, got {features.ndim}-d")
        if features.shape[0] != targets.shape[0]:
            raise ShapeError(
                f"features and targets disagree on row count: "
                f"{features.shape[0]} vs {targets.shape[0]}"
            )
        if features.shape[1] != topology.input_dim:
            raise ShapeError(
                f"feature width {features.shape[1]} does not match "
                f"input_dim {topology.input_dim}"
            )
        if topology.output_dim != 1:
            raise ShapeError("regression objective requires a single output")
        self.topology = topology
        self.features = features
        self.targets = targets
        self.threads = threads
        self.dim = topology.param_count()
        self._sizes = topology.layer_sizes

    def __call__(self, params: np.ndarray) -> float:
        params = np.ascontiguousarray(params, dtype=np.float64)
        out = kernels.forward_batch(params, self._sizes, self.features)
        return metrics.mse(out[:, 0], self.targets)

    def batch(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.float64)
        m = positions.shape[0]
        if self.threads == 1 or m < 2 * self.threads:
            return np.array([self(positions[i]) for i in range(m)], dtype=np.float64)
        costs = np.empty(m, dtype=np.float64)
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for i, cost in zip(range(m), pool.map(self, positions)):
                costs[i] = cost
        return costs


class _ArrayFunction:
    """Wraps a scalar test function; batch form is the row-by-row loop."""

    def __init__(self, fn, name: str):
        self._fn = fn
        self.name = name

    def __call__(self, x: np.ndarray) -> float:
        return self._fn(np.asarray(x, dtype=np.float64))

    def batch(self, positions: np.ndarray) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.float64)
        return np.array([self._fn(positions[i]) for i in range(positions.shape[0])],
                        dtype=np.float64)


def _sphere(x: np.ndarray) -> float:
    return float(np.sum(x * x))


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.shape[0] + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def _rosenbrock(x: np.ndarray) -> float:
    a = x[1:] - x[:-1] * x[:-1]
    b = 1.0 - x[:-1]
    return float(np.sum(100.0 * a * a + b * b))


BENCHMARK_FUNCTIONS = {
    "sphere": _ArrayFunction(_sphere, "sphere"),
    "rastrigin": _ArrayFunction(_rastrigin, "rastrigin"),
    "rosenbrock": _ArrayFunction(_rosenbrock, "rosenbrock"),
}


def benchmark_function(name: str) -> _ArrayFunction:
    try:
        return BENCHMARK_FUNCTIONS[name]
    except KeyError:
        known = ", ".join(sorted(BENCHMARK_FUNCTIONS))
        raise ConfigError(f"unknown test function {name!r} (known: {known})") from None
