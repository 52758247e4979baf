"""End-to-end guarantees the package commits to.

Each test checks one numbered guarantee and prints a single verdict line
with the measured values, so a full run reads as a checklist. Budgets are
wall-clock seconds on one core; tolerances are pinned next to each check.
The final test is a reported measurement of the optimizer comparison, not
a hard gate: it validates the report structure and records the observed
win fraction.
"""

import json
import math
from time import perf_counter

import numpy as np
import pytest

from quakefit import cli, dataset as ds, ga, ica, metrics, mlp
from quakefit.objective import RegressionObjective

TOPOLOGY = mlp.MlpTopology(input_dim=6, hidden_sizes=(16, 24), output_dim=1)


def report(check_id, ok, detail, capsys):
    verdict = "PASS" if ok else "FAIL"
    with capsys.disabled():
        print(f"\n[{check_id}] {verdict}: {detail}")
    assert ok, f"{check_id}: {detail}"


def naive_forward(params, sizes, row):
    """Hand-rolled reference: explicit loops, bias-first accumulation."""
    pos = 0
    acts = [float(x) for x in row]
    last = len(sizes) - 1
    for layer in range(1, len(sizes)):
        fan_in, width = sizes[layer - 1], sizes[layer]
        rows = []
        for _ in range(width):
            rows.append([float(p) for p in params[pos:pos + fan_in]])
            pos += fan_in
        biases = [float(p) for p in params[pos:pos + width]]
        pos += width
        nxt = []
        for n in range(width):
            acc = biases[n]
            for i in range(fan_in):
                acc += rows[n][i] * acts[i]
            nxt.append(math.tanh(acc) if layer < last else acc)
        acts = nxt
    return acts[0]


def test_c01_parameter_count(capsys):
    t0 = perf_counter()
    count = mlp.param_count(TOPOLOGY)
    elapsed = perf_counter() - t0
    ok = count == 545 and elapsed < 1.0
    report("c1", ok,
           f"6-16-24-1 network flattens to {count} parameters "
           f"(want exactly 545); {elapsed:.3f}s (budget 1s)", capsys)


def test_c02_forward_matches_naive_loop(capsys):
    tol = 1e-12
    rng = np.random.default_rng(202)
    sizes = TOPOLOGY.layer_sizes
    n_params = mlp.param_count(TOPOLOGY)
    t0 = perf_counter()
    worst = 0.0
    for _ in range(100):
        params = rng.uniform(-1.0, 1.0, n_params)
        row = rng.uniform(-1.0, 1.0, 6)
        got = mlp.forward(params, TOPOLOGY, row)
        want = naive_forward(params, sizes, row)
        worst = max(worst, abs(got - want))
    elapsed = perf_counter() - t0
    ok = worst <= tol and elapsed < 5.0
    report("c2", ok,
           f"100 random (params, input) pairs, max |forward - loop oracle| = "
           f"{worst:.3e} (tol {tol:.0e}); {elapsed:.2f}s (budget 5s)", capsys)


def test_c03_tansig_is_tanh(capsys):
    tol = 1e-12
    t0 = perf_counter()
    grid = np.linspace(-20.0, 20.0, 10_000)
    worst = float(np.max(np.abs(mlp.tansig(grid) - np.tanh(grid))))
    zero_exact = mlp.tansig(0.0) == 0.0
    elapsed = perf_counter() - t0
    ok = worst <= tol and zero_exact and elapsed < 1.0
    report("c3", ok,
           f"max |tansig - tanh| on 10^4 grid over [-20, 20] = {worst:.3e} "
           f"(tol {tol:.0e}), tansig(0) == 0 exactly: {zero_exact}; "
           f"{elapsed:.3f}s (budget 1s)", capsys)


def test_c04_error_measure_identities(capsys):
    tol = 1e-12
    rng = np.random.default_rng(404)
    t0 = perf_counter()
    worst_rmse = worst_var = 0.0
    for _ in range(1000):
        n = int(rng.integers(1, 100))
        p = rng.normal(size=n)
        t = rng.normal(size=n)
        m = metrics.mse(p, t)
        worst_rmse = max(worst_rmse, abs(metrics.rmse(p, t) ** 2 - m))
        stats = metrics.error_stats(p - t)
        worst_var = max(worst_var, abs(stats["variance"] + stats["mean"] ** 2 - m))
    identical_zero = metrics.mse(p, p.copy()) == 0.0
    elapsed = perf_counter() - t0
    ok = worst_rmse <= tol and worst_var <= tol and identical_zero and elapsed < 5.0
    report("c4", ok,
           f"1000 random pairs: max |rmse^2 - mse| = {worst_rmse:.3e}, "
           f"max |variance + mean^2 - mse| = {worst_var:.3e} (tol {tol:.0e}), "
           f"mse on identical vectors == 0: {identical_zero}; "
           f"{elapsed:.2f}s (budget 5s)", capsys)


def test_c05_normalization_round_trip(capsys):
    tol = 1e-9
    rng = np.random.default_rng(505)
    records = ds.make_synthetic(300, seed=5)
    spec = ds.fit_normalizer(records)
    t0 = perf_counter()
    worst = 0.0
    endpoints_exact = True
    for name in ds.ALL_COLUMNS:
        lo, hi = spec.bounds[name]
        values = rng.uniform(lo, hi, 10_000)
        back = spec.inverse(name, spec.transform(name, values))
        rel = np.abs(back - values) / np.maximum(np.abs(values), 1.0)
        worst = max(worst, float(np.max(rel)))
        endpoints_exact &= spec.transform(name, lo) == -1.0
        endpoints_exact &= spec.transform(name, hi) == 1.0
    elapsed = perf_counter() - t0
    ok = worst <= tol and endpoints_exact and elapsed < 1.0
    report("c5", ok,
           f"10^4 values per column: max relative round-trip error = {worst:.3e} "
           f"(tol {tol:.0e}), fitted endpoints map to exactly -1/+1: "
           f"{endpoints_exact}; {elapsed:.3f}s (budget 1s)", capsys)


def test_c06_ica_structural_invariants(capsys):
    def sphere(v):
        return float(np.dot(v, v))

    rng = np.random.default_rng(606)
    t0 = perf_counter()
    violations = []

    for run_idx in range(50):
        countries = int(rng.integers(20, 101))
        dim = int(rng.integers(2, 11))
        config = ica.IcaConfig(
            num_countries=countries,
            num_imperialists=max(2, countries // 10),
            num_decades=15,
            search_bounds=(-5.0, 5.0),
            seed=int(rng.integers(0, 2**31)),
        )

        def observer(decade, empires, best_cost, countries=countries, run_idx=run_idx):
            total = sum(e.n_countries for e in empires)
            if total != countries:
                violations.append(f"run {run_idx} decade {decade}: "
                                  f"{total} countries, expected {countries}")
            for empire in empires:
                if empire.n_colonies and empire.colony_costs.min() < empire.imperialist_cost:
                    violations.append(f"run {run_idx} decade {decade}: "
                                      "colony beats its imperialist after swap")
                for pos in (empire.imperialist_position, empire.colony_positions):
                    if np.any(pos < -5.0) or np.any(pos > 5.0):
                        violations.append(f"run {run_idx} decade {decade}: out of bounds")

        _, trace = ica.run(config, sphere, dim, observer=observer)
        costs = trace.best_cost
        if any(b > a for a, b in zip(costs, costs[1:])):
            violations.append(f"run {run_idx}: best cost increased")

    elapsed = perf_counter() - t0
    ok = not violations and elapsed < 60.0
    head = "; ".join(violations[:3]) if violations else "none"
    report("c6", ok,
           f"50 runs (20-100 countries, 2-10 dims): country conservation, "
           f"post-swap imperialist dominance, bounds, and monotone best all "
           f"hold every decade; violations: {head}; {elapsed:.1f}s (budget 60s)",
           capsys)


def test_c07_ica_solves_sphere(capsys):
    threshold = 1e-3
    need = 95

    def sphere(v):
        return float(np.dot(v, v))

    t0 = perf_counter()
    successes = 0
    for seed in range(100):
        config = ica.IcaConfig(num_countries=50, num_imperialists=5,
                               num_decades=100, search_bounds=(-5.0, 5.0),
                               seed=seed)
        best, _ = ica.run(config, sphere, dim=2)
        successes += best.cost < threshold
    elapsed = perf_counter() - t0
    ok = successes >= need and elapsed < 120.0
    report("c7", ok,
           f"2-dim sphere, 50 countries / 5 imperialists / 100 decades: "
           f"best < {threshold:.0e} in {successes}/100 seeds (need >= {need}); "
           f"{elapsed:.1f}s (budget 120s)", capsys)


def test_c08_ga_structure_and_sphere(capsys):
    threshold = 1e-2
    need = 90

    def sphere(v):
        return float(np.dot(v, v))

    sizes = []

    def observer(generation, population, costs, best_cost):
        sizes.append(population.shape[0])

    t0 = perf_counter()
    probe = ga.GaConfig(population_size=50, num_generations=100,
                        search_bounds=(-5.0, 5.0), seed=0)
    _, probe_trace = ga.run(probe, sphere, dim=2, observer=observer)
    size_constant = set(sizes) == {50}
    monotone = all(b <= a for a, b in
                   zip(probe_trace.best_cost, probe_trace.best_cost[1:]))

    successes = 0
    for seed in range(100):
        config = ga.GaConfig(population_size=50, num_generations=100,
                             search_bounds=(-5.0, 5.0), seed=seed)
        best, _ = ga.run(config, sphere, dim=2)
        successes += best.cost < threshold
    elapsed = perf_counter() - t0
    ok = size_constant and monotone and successes >= need and elapsed < 120.0
    report("c8", ok,
           f"population stays 50: {size_constant}, elitist best monotone: "
           f"{monotone}; 2-dim sphere best < {threshold:.0e} in "
           f"{successes}/100 seeds (need >= {need}); {elapsed:.1f}s "
           f"(budget 120s)", capsys)


def test_c09_training_runs_are_reproducible(tmp_path, capsys):
    argv = ["train", "--rows", "500", "--num-countries", "100",
            "--num-decades", "50", "--seed", "7"]
    t0 = perf_counter()
    first, second = tmp_path / "a", tmp_path / "b"
    assert cli.main(argv + ["--out", str(first)]) == 0
    assert cli.main(argv + ["--out", str(second)]) == 0
    elapsed = perf_counter() - t0
    differing = [name for name in cli.TRAIN_ARTIFACTS
                 if (first / name).read_bytes() != (second / name).read_bytes()]
    ok = not differing and elapsed < 60.0
    report("c9", ok,
           f"two identical train commands (500 synthetic rows, 100 countries, "
           f"50 decades): all {len(cli.TRAIN_ARTIFACTS)} artifacts byte-identical "
           f"(differing: {differing or 'none'}); {elapsed:.1f}s (budget 60s)",
           capsys)


def test_c10_trained_network_beats_random(capsys):
    ratio_cap = 0.25
    t0 = perf_counter()
    records = ds.make_synthetic(1000, seed=0, noise_sd=0.1)
    data = ds.build_dataset(records, seed=1)
    train_idx = data.train_indices
    objective = RegressionObjective(TOPOLOGY, data.features[train_idx],
                                    data.targets[train_idx])
    config = ica.IcaConfig(num_countries=100, num_imperialists=10,
                           num_decades=50, search_bounds=(-1.0, 1.0), seed=2)
    best, _ = ica.run(config, objective, objective.dim)
    trained_mse = metrics.evaluate(best.position, TOPOLOGY, data,
                                   subset="test", unit="richter").richter["mse"]

    rng = np.random.default_rng(1234)
    random_mses = []
    for _ in range(100):
        params = rng.uniform(-1.0, 1.0, objective.dim)
        random_mses.append(metrics.evaluate(params, TOPOLOGY, data,
                                            subset="test",
                                            unit="richter").richter["mse"])
    random_mean = float(np.mean(random_mses))
    ratio = trained_mse / random_mean
    elapsed = perf_counter() - t0
    ok = ratio < ratio_cap and elapsed < 300.0
    report("c10", ok,
           f"1000-row noisy synthetic catalogue: trained test mse {trained_mse:.4f} "
           f"vs mean of 100 random vectors {random_mean:.4f}, ratio {ratio:.3f} "
           f"(must be < {ratio_cap}); {elapsed:.1f}s (budget 300s)", capsys)


def test_c11_optimizer_comparison_measured(tmp_path, capsys):
    out = tmp_path / "benchmark.json"
    t0 = perf_counter()
    rc = cli.main(["benchmark", "--function", "mlp", "--rows", "1000",
                   "--population", "200", "--iterations", "100",
                   "--repeats", "20", "--seed", "0", "--out", str(out)])
    elapsed = perf_counter() - t0
    result = json.loads(out.read_text())
    pairs = result["pairs"]
    fraction = result["summary"].get("ica_win_fraction")
    structure_ok = (
        rc == 0
        and len(pairs) == 20
        and fraction is not None
        and 0.0 <= fraction <= 1.0
        and all("a_test_mse" in p and "b_test_mse" in p for p in pairs)
        and result["score"] == "test_mse"
    )
    ok = structure_ok and elapsed < 900.0
    report("c11", ok,
           f"20 paired runs (200 individuals, 100 iterations): ica test mse <= "
           f"ga test mse in {fraction:.2f} of pairs (a_wins "
           f"{result['summary']['a_wins']}, b_wins {result['summary']['b_wins']}, "
           f"ties {result['summary']['ties']}); measured outcome, recorded not "
           f"gated; {elapsed:.0f}s (budget 900s)", capsys)
