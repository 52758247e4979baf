import numpy as np
import pytest

from quakefit import dataset as ds
from quakefit import mlp, objective
from quakefit.errors import ConfigError, ObjectiveError, ShapeError
from quakefit.optim import (
    BestTracker,
    CountingObjective,
    RunTrace,
    resolve_bounds,
    write_trace_csv,
)

TOPOLOGY = mlp.MlpTopology(input_dim=6, hidden_sizes=(5, 3), output_dim=1)


def make_objective(n=40, seed=0, threads=1):
    records = ds.make_synthetic(n, seed=seed, noise_sd=0.05)
    data = ds.build_dataset(records, seed=seed)
    return objective.RegressionObjective(
        TOPOLOGY, data.features[data.train_indices],
        data.targets[data.train_indices], threads=threads)


def test_call_is_mse_of_forward():
    obj = make_objective()
    rng = np.random.default_rng(1)
    params = rng.uniform(-1, 1, obj.dim)
    preds = mlp.batch_forward(params, TOPOLOGY, obj.features)
    expected = float(np.mean((preds - obj.targets) ** 2))
    assert obj(params) == expected


def test_dim_is_parameter_count():
    assert make_objective().dim == mlp.param_count(TOPOLOGY)


def test_batch_matches_row_loop_bitwise():
    obj = make_objective()
    rng = np.random.default_rng(2)
    positions = rng.uniform(-1, 1, (12, obj.dim))
    batch = obj.batch(positions)
    one_at_a_time = np.array([obj(positions[i]) for i in range(12)])
    assert np.array_equal(batch, one_at_a_time)


def test_threaded_batch_identical():
    single = make_objective(threads=1)
    threaded = make_objective(threads=2)
    rng = np.random.default_rng(3)
    positions = rng.uniform(-1, 1, (16, single.dim))
    assert np.array_equal(single.batch(positions), threaded.batch(positions))


def test_constructor_validation():
    records = ds.make_synthetic(30, seed=4)
    data = ds.build_dataset(records, seed=4)
    feats = data.features[data.train_indices]
    targs = data.targets[data.train_indices]
    with pytest.raises(ConfigError):
        objective.RegressionObjective(TOPOLOGY, feats, targs, threads=0)
    with pytest.raises(ShapeError):
        objective.RegressionObjective(TOPOLOGY, feats[:, :4], targs)
    with pytest.raises(ShapeError):
        objective.RegressionObjective(TOPOLOGY, feats, targs[:-1])
    with pytest.raises(ShapeError):
        objective.RegressionObjective(TOPOLOGY, feats.ravel(), targs)
    wide = mlp.MlpTopology(input_dim=6, hidden_sizes=(4,), output_dim=2)
    with pytest.raises(ShapeError):
        objective.RegressionObjective(wide, feats, targs)


def test_sphere_minimum():
    fn = objective.benchmark_function("sphere")
    assert fn(np.zeros(5)) == 0.0
    assert fn(np.array([1.0, 2.0])) == 5.0


def test_rastrigin_minimum():
    fn = objective.benchmark_function("rastrigin")
    assert fn(np.zeros(4)) == pytest.approx(0.0, abs=1e-12)
    assert fn(np.array([0.5])) > 0


def test_rosenbrock_minimum():
    fn = objective.benchmark_function("rosenbrock")
    assert fn(np.ones(6)) == 0.0
    assert fn(np.zeros(2)) == 1.0


def test_benchmark_function_batch_matches_scalar():
    rng = np.random.default_rng(5)
    positions = rng.uniform(-2, 2, (10, 4))
    for name in ("sphere", "rastrigin", "rosenbrock"):
        fn = objective.benchmark_function(name)
        batch = fn.batch(positions)
        scalar = np.array([fn(positions[i]) for i in range(10)])
        assert np.array_equal(batch, scalar)


def test_unknown_benchmark_function():
    with pytest.raises(ConfigError) as exc:
        objective.benchmark_function("ackley")
    message = str(exc.value)
    assert "ackley" in message and "sphere" in message


def test_counting_objective_counts_calls():
    counter = CountingObjective(lambda v: float(v.sum()))
    counter.evaluate(np.ones((5, 3)))
    counter.evaluate_one(np.ones(3))
    assert counter.calls == 6


def test_counting_objective_uses_batch_when_available():
    class Tracker:
        used_batch = False

        def __call__(self, v):
            raise AssertionError("scalar path should not run")

        def batch(self, positions):
            Tracker.used_batch = True
            return np.zeros(positions.shape[0])

    counter = CountingObjective(Tracker())
    counter.evaluate(np.ones((4, 2)))
    assert Tracker.used_batch
    assert counter.calls == 4


def test_counting_objective_rejects_non_finite():
    counter = CountingObjective(lambda v: float("inf") if v[0] > 0 else 0.0)
    positions = np.array([[-1.0], [2.0], [-3.0]])
    with pytest.raises(ObjectiveError) as exc:
        counter.evaluate(positions)
    assert "index 1" in str(exc.value)


def test_counting_objective_empty_batch():
    counter = CountingObjective(lambda v: 0.0)
    out = counter.evaluate(np.empty((0, 3)))
    assert out.shape == (0,)
    assert counter.calls == 0


def test_resolve_bounds_scalar_pair():
    low, high = resolve_bounds((-2.0, 3.0), 4)
    assert np.array_equal(low, np.full(4, -2.0))
    assert np.array_equal(high, np.full(4, 3.0))


def test_resolve_bounds_per_dimension():
    pairs = [(-1.0, 1.0), (0.0, 5.0), (-3.0, -1.0)]
    low, high = resolve_bounds(pairs, 3)
    assert low.tolist() == [-1.0, 0.0, -3.0]
    assert high.tolist() == [1.0, 5.0, -1.0]


def test_resolve_bounds_rejects_bad_input():
    with pytest.raises(ConfigError):
        resolve_bounds((1.0, -1.0), 3)
    with pytest.raises(ConfigError):
        resolve_bounds(np.zeros((3, 3)), 3)


def test_best_tracker_keeps_minimum():
    tracker = BestTracker()
    tracker.offer(np.array([[1.0], [2.0]]), np.array([5.0, 3.0]))
    assert tracker.cost == 3.0
    tracker.offer_one(np.array([9.0]), 4.0)
    assert tracker.cost == 3.0
    tracker.offer_one(np.array([0.5]), 1.0)
    best = tracker.as_country()
    assert best.cost == 1.0 and best.position[0] == 0.5


def test_best_tracker_empty_raises():
    with pytest.raises(ObjectiveError):
        BestTracker().as_country()


def test_write_trace_csv(tmp_path):
    trace = RunTrace(step_name="decade")
    trace.append(2.5, 3.0, 4, 100)
    trace.append(1.25, 2.0, 3, 200)
    path = tmp_path / "trace.csv"
    write_trace_csv(trace, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "decade,best_cost,mean_imperialist_cost,num_empires,objective_calls"
    assert lines[1] == "1,2.5,3.0,4,100"
    assert lines[2] == "2,1.25,2.0,3,200"
