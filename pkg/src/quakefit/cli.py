"""Command-line front end.

Subcommands:

* ``train``     fit the network on a CSV file or on synthetic rows, writing
                a fixed set of artifacts into an output directory
* ``predict``   apply a saved model to new rows
* ``benchmark`` run the two optimizers head to head on matched budgets
* ``synth``     generate a synthetic catalogue CSV

All failures surface as a single JSON line on stderr plus a category
exit code; success prints a short plain-text summary on stdout.

Seed layout: the base seed drives synthetic data generation, base+1
drives the train/test split, base+2 drives the optimizer. Benchmark
pair ``i`` uses base+2+2i for the first optimizer and base+3+2i for
the second, so repeats never share streams.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import config as cfg
from . import dataset as ds
from . import ga, ica, kernels, metrics, mlp
from .errors import (
    CompatibilityError,
    ConfigError,
    EmptyDatasetError,
    InputOutputError,
    QuakefitError,
)
from .objective import RegressionObjective, benchmark_function
from .optim import write_trace_csv

SEED_SPLIT_OFFSET = 1
SEED_OPTIMIZER_OFFSET = 2

TRAIN_ARTIFACTS = (
    "config_resolved.txt",
    "trace.csv",
    "report_train.json",
    "report_test.json",
    "model.txt",
    "normalization.txt",
)

_ICA_DEFAULTS = ica.IcaConfig()
_GA_DEFAULTS = ga.GaConfig()

# defaults for keys shared by every training run; None means "not set"
_COMMON_DEFAULTS = {
    "data": None,
    "rows": None,
    "noise": 0.1,
    "optimizer": "ica",
    "seed": 0,
    "threads": 1,
    "unit": "richter",
    "hidden_sizes": mlp.DEFAULT_HIDDEN_SIZES,
    "train_fraction": 0.9,
    "fit_norm_on_train": False,
    "num_bins": 20,
    "search_bounds": _ICA_DEFAULTS.search_bounds,
}

_ICA_KEYS = {
    "num_countries": _ICA_DEFAULTS.num_countries,
    "num_imperialists": None,  # None: 10% of num_countries, at least 1
    "num_decades": _ICA_DEFAULTS.num_decades,
    "assimilation_coeff": _ICA_DEFAULTS.assimilation_coeff,
    "colony_cost_weight": _ICA_DEFAULTS.colony_cost_weight,
    "revolution_rate": _ICA_DEFAULTS.revolution_rate,
    "convergence_epsilon": _ICA_DEFAULTS.convergence_epsilon,
}

_GA_KEYS = {
    "population_size": _GA_DEFAULTS.population_size,
    "num_generations": _GA_DEFAULTS.num_generations,
    "elite_fraction": _GA_DEFAULTS.elite_fraction,
    "crossover_fraction": _GA_DEFAULTS.crossover_fraction,
    "mutation_fraction": _GA_DEFAULTS.mutation_fraction,
    "per_gene_mutation_prob": _GA_DEFAULTS.per_gene_mutation_prob,
    "mutation_sd_fraction": _GA_DEFAULTS.mutation_sd_fraction,
    "ga_mode": _GA_DEFAULTS.mode,
}

_COERCERS = {
    "data": lambda k, v: str(v),
    "rows": cfg.coerce_int,
    "noise": cfg.coerce_float,
    "optimizer": lambda k, v: cfg.coerce_choice(k, v, ("ica", "ga")),
    "seed": cfg.coerce_int,
    "threads": cfg.coerce_int,
    "unit": lambda k, v: cfg.coerce_choice(k, v, ("richter", "normalized")),
    "hidden_sizes": cfg.coerce_int_tuple,
    "train_fraction": cfg.coerce_float,
    "fit_norm_on_train": cfg.coerce_bool,
    "num_bins": cfg.coerce_int,
    "search_bounds": cfg.coerce_float_pair,
    "num_countries": cfg.coerce_int,
    "num_imperialists": cfg.coerce_int,
    "num_decades": cfg.coerce_int,
    "assimilation_coeff": cfg.coerce_float,
    "colony_cost_weight": cfg.coerce_float,
    "revolution_rate": cfg.coerce_float,
    "convergence_epsilon": cfg.coerce_float,
    "population_size": cfg.coerce_int,
    "num_generations": cfg.coerce_int,
    "elite_fraction": cfg.coerce_float,
    "crossover_fraction": cfg.coerce_float,
    "mutation_fraction": cfg.coerce_float,
    "per_gene_mutation_prob": cfg.coerce_float,
    "mutation_sd_fraction": cfg.coerce_float,
    "ga_mode": lambda k, v: cfg.coerce_choice(k, v, ("fractions", "rates")),
}


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _resolve_train_settings(args) -> dict:
    settings = dict(_COMMON_DEFAULTS)
    settings.update(_ICA_KEYS)
    settings.update(_GA_KEYS)

    if args.config_path is not None:
        for key, raw in cfg.load_config(args.config_path).items():
            if key not in settings:
                raise ConfigError(f"unknown config key {key!r} in {args.config_path}")
            settings[key] = _COERCERS[key](key, raw)

    for key in settings:
        flag = getattr(args, key, None)
        if flag is not None:
            settings[key] = _COERCERS[key](key, flag)

    if settings["data"] is not None and settings["rows"] is not None:
        raise ConfigError("give either data (a csv path) or rows (synthetic), not both")
    if settings["data"] is None and settings["rows"] is None:
        raise ConfigError("no input: set data to a csv path or rows to a synthetic row count")
    if settings["num_imperialists"] is None:
        settings["num_imperialists"] = max(1, _round_half_up(0.1 * settings["num_countries"]))
    return settings


def _relevant_settings(settings: dict) -> dict:
    """Trim the resolved map down to the keys that actually drove the run."""
    keep = dict(_COMMON_DEFAULTS)
    keep.update(_ICA_KEYS if settings["optimizer"] == "ica" else _GA_KEYS)
    out = {key: settings[key] for key in keep}
    if settings["data"] is not None:
        out.pop("rows", None)
        out.pop("noise", None)
    else:
        out.pop("data", None)
    return out


def _load_records(settings):
    if settings["data"] is not None:
        records, summary = ds.load_csv(settings["data"])
        if summary.rows_dropped:
            sys.stderr.write(
                f"dropped {summary.rows_dropped} of {summary.rows_read} rows "
                f"from {settings['data']}\n"
            )
        return records
    return ds.make_synthetic(settings["rows"], seed=settings["seed"],
                             noise_sd=settings["noise"])


def _make_optimizer_config(settings: dict):
    opt_seed = settings["seed"] + SEED_OPTIMIZER_OFFSET
    if settings["optimizer"] == "ica":
        return ica.IcaConfig(
            num_countries=settings["num_countries"],
            num_imperialists=settings["num_imperialists"],
            num_decades=settings["num_decades"],
            assimilation_coeff=settings["assimilation_coeff"],
            colony_cost_weight=settings["colony_cost_weight"],
            revolution_rate=settings["revolution_rate"],
            search_bounds=settings["search_bounds"],
            seed=opt_seed,
            convergence_epsilon=settings["convergence_epsilon"],
        )
    return ga.GaConfig(
        population_size=settings["population_size"],
        num_generations=settings["num_generations"],
        elite_fraction=settings["elite_fraction"],
        crossover_fraction=settings["crossover_fraction"],
        mutation_fraction=settings["mutation_fraction"],
        per_gene_mutation_prob=settings["per_gene_mutation_prob"],
        mutation_sd_fraction=settings["mutation_sd_fraction"],
        search_bounds=settings["search_bounds"],
        seed=opt_seed,
        mode=settings["ga_mode"],
    )


def _ensure_out_dir(path: str):
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise InputOutputError(f"cannot create output directory {path}: {exc}") from exc


def _write_text(path, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputOutputError(f"cannot write {path}: {exc}") from exc


def cmd_train(args) -> int:
    settings = _resolve_train_settings(args)
    records = _load_records(settings)
    data = ds.build_dataset(
        records,
        train_fraction=settings["train_fraction"],
        seed=settings["seed"] + SEED_SPLIT_OFFSET,
        fit_norm_on_train=settings["fit_norm_on_train"],
    )
    topology = mlp.MlpTopology(input_dim=len(data.feature_names),
                               hidden_sizes=settings["hidden_sizes"])

    train_idx = data.train_indices
    objective = RegressionObjective(topology, data.features[train_idx],
                                    data.targets[train_idx],
                                    threads=settings["threads"])
    opt_config = _make_optimizer_config(settings)
    runner = ica.run if settings["optimizer"] == "ica" else ga.run
    best, trace = runner(opt_config, objective, objective.dim)

    report_train = metrics.evaluate(best.position, topology, data, subset="train",
                                    num_bins=settings["num_bins"])
    report_test = metrics.evaluate(best.position, topology, data, subset="test",
                                   num_bins=settings["num_bins"])

    _ensure_out_dir(args.out)
    cfg.write_config(_relevant_settings(settings),
                     os.path.join(args.out, "config_resolved.txt"))
    write_trace_csv(trace, os.path.join(args.out, "trace.csv"))
    _write_text(os.path.join(args.out, "report_train.json"), report_train.to_json())
    _write_text(os.path.join(args.out, "report_test.json"), report_test.to_json())
    norm_path = os.path.join(args.out, "normalization.txt")
    data.norm_spec.save(norm_path)
    mlp.save_model(os.path.join(args.out, "model.txt"), best.position, topology,
                   data.feature_names, mlp.file_sha256(norm_path))

    unit = settings["unit"]
    tr = report_train.normalized if unit == "normalized" else report_train.richter
    te = report_test.normalized if unit == "normalized" else report_test.richter
    corr = te["correlation"]
    print(f"optimizer: {settings['optimizer']}")
    print(f"kernel backend: {kernels.active_backend()}")
    print(f"{trace.step_name}s run: {len(trace)}")
    print(f"objective calls: {trace.objective_calls[-1] if len(trace) else 0}")
    print(f"train mse ({unit}): {tr['mse']!r}")
    print(f"test mse ({unit}): {te['mse']!r}")
    print(f"test rmse ({unit}): {te['rmse']!r}")
    print("test correlation: " + ("undefined" if corr is None else repr(corr)))
    print(f"artifacts: {args.out}")
    return 0


def cmd_predict(args) -> int:
    params, topology, header = mlp.load_model(args.model)
    spec = ds.NormalizationSpec.load(args.norm)
    actual = mlp.file_sha256(args.norm)
    if actual != header["norm_spec_sha256"]:
        raise CompatibilityError(
            "normalization file does not match the one the model was trained with "
            f"(expected sha256 {header['norm_spec_sha256']}, got {actual})"
        )
    feature_names = header["feature_columns"]
    for name in (*feature_names, ds.TARGET_COLUMN):
        if name not in spec.bounds:
            raise CompatibilityError(f"normalization file lacks bounds for column {name!r}")

    try:
        records, summary = ds.load_csv(args.data)
    except EmptyDatasetError:
        # a valid but empty table predicts nothing, successfully
        _write_text(args.out, "row,predicted_magnitude\n")
        print(f"wrote 0 predictions to {args.out}")
        return 0
    sys.stderr.write(
        f"rows read: {summary.rows_read}, kept: {summary.rows_kept}, "
        f"dropped: {summary.rows_dropped}\n"
    )
    features = np.column_stack([
        spec.transform(name, np.array([rec.column(name) for rec in records]))
        for name in feature_names
    ])
    scaled = mlp.batch_forward(params, topology, features)
    predictions = spec.inverse(ds.TARGET_COLUMN, scaled)

    lines = ["row,predicted_magnitude"]
    lines.extend(f"{i + 1},{value!r}" for i, value in enumerate(predictions.tolist()))
    _write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {predictions.shape[0]} predictions to {args.out}")
    return 0


def cmd_synth(args) -> int:
    records = ds.make_synthetic(args.rows, seed=args.seed, noise_sd=args.noise)
    ds.write_csv(records, args.out)
    print(f"wrote {len(records)} rows to {args.out}")
    return 0


def _benchmark_objective(args):
    """Returns (objective, dim, default bounds, test scorer or None).

    In mlp mode the two optimizers are compared on held-out test MSE,
    matching how the trained network would actually be judged; in test
    function mode the best cost itself is the score.
    """
    if args.function == "mlp":
        records = ds.make_synthetic(args.rows, seed=args.seed, noise_sd=args.noise)
        data = ds.build_dataset(records, seed=args.seed + SEED_SPLIT_OFFSET)
        topology = mlp.MlpTopology(input_dim=len(data.feature_names))
        idx = data.train_indices
        objective = RegressionObjective(topology, data.features[idx],
                                        data.targets[idx], threads=args.threads)

        def test_scorer(position):
            report = metrics.evaluate(position, topology, data, subset="test",
                                      unit="richter")
            return {
                "test_mse": report.richter["mse"],
                "test_correlation": report.richter["correlation"],
            }

        return objective, objective.dim, (-1.0, 1.0), test_scorer
    return benchmark_function(args.function), args.dim, (-5.0, 5.0), None


def _run_bench_side(name: str, seed: int, args, bounds, num_imperialists,
                    objective, dim):
    if name == "ica":
        side_config = ica.IcaConfig(num_countries=args.population,
                                    num_imperialists=num_imperialists,
                                    num_decades=args.iterations,
                                    search_bounds=bounds, seed=seed)
        return ica.run(side_config, objective, dim)
    side_config = ga.GaConfig(population_size=args.population,
                              num_generations=args.iterations,
                              search_bounds=bounds, seed=seed)
    return ga.run(side_config, objective, dim)


def cmd_benchmark(args) -> int:
    if args.repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {args.repeats}")
    objective, dim, default_bounds, test_scorer = _benchmark_objective(args)
    bounds = default_bounds if args.bounds is None \
        else cfg.coerce_float_pair("bounds", args.bounds)
    num_imperialists = args.num_imperialists \
        if args.num_imperialists is not None \
        else max(1, _round_half_up(0.1 * args.population))

    pairs = []
    a_wins = b_wins = ties = 0
    for i in range(args.repeats):
        a_seed = args.seed + SEED_OPTIMIZER_OFFSET + 2 * i
        b_seed = a_seed if args.shared_seed else a_seed + 1

        t0 = time.perf_counter()
        a_best, a_trace = _run_bench_side(args.side_a, a_seed, args, bounds,
                                          num_imperialists, objective, dim)
        t1 = time.perf_counter()
        b_best, b_trace = _run_bench_side(args.side_b, b_seed, args, bounds,
                                          num_imperialists, objective, dim)
        t2 = time.perf_counter()

        row = {
            "pair": i,
            "a_seed": a_seed,
            "b_seed": b_seed,
            "a_best": a_best.cost,
            "b_best": b_best.cost,
            "a_calls": a_trace.objective_calls[-1],
            "b_calls": b_trace.objective_calls[-1],
            "a_seconds": round(t1 - t0, 6),
            "b_seconds": round(t2 - t1, 6),
            "a_trace": list(a_trace.best_cost),
            "b_trace": list(b_trace.best_cost),
        }
        if test_scorer is not None:
            a_score = test_scorer(a_best.position)
            b_score = test_scorer(b_best.position)
            row["a_test_mse"] = a_score["test_mse"]
            row["a_test_correlation"] = a_score["test_correlation"]
            row["b_test_mse"] = b_score["test_mse"]
            row["b_test_correlation"] = b_score["test_correlation"]
            a_value, b_value = a_score["test_mse"], b_score["test_mse"]
        else:
            a_value, b_value = a_best.cost, b_best.cost
        if abs(a_value - b_value) <= 1e-15:
            row["winner"] = "tie"
            ties += 1
        elif a_value < b_value:
            row["winner"] = args.side_a
            a_wins += 1
        else:
            row["winner"] = args.side_b
            b_wins += 1
        pairs.append(row)

    summary = {
        "a_wins": a_wins,
        "b_wins": b_wins,
        "ties": ties,
        # ties count toward side a: the fraction reads "a was no worse"
        "a_win_fraction": (a_wins + ties) / args.repeats,
        "a_best_mean": float(np.mean([p["a_best"] for p in pairs])),
        "b_best_mean": float(np.mean([p["b_best"] for p in pairs])),
    }
    if test_scorer is not None:
        summary["a_test_mse_mean"] = float(np.mean([p["a_test_mse"] for p in pairs]))
        summary["b_test_mse_mean"] = float(np.mean([p["b_test_mse"] for p in pairs]))
    if (args.side_a, args.side_b) == ("ica", "ga"):
        summary["ica_win_fraction"] = summary["a_win_fraction"]

    result = {
        "function": args.function,
        "dim": dim,
        "side_a": args.side_a,
        "side_b": args.side_b,
        "shared_seed": bool(args.shared_seed),
        "population": args.population,
        "iterations": args.iterations,
        "repeats": args.repeats,
        "bounds": list(bounds),
        "kernel_backend": kernels.active_backend(),
        "score": "test_mse" if test_scorer is not None else "best_cost",
        "pairs": pairs,
        "summary": summary,
    }
    text = json.dumps(result, indent=2, sort_keys=True) + "\n"
    if args.out is not None:
        _write_text(args.out, text)
        print(f"{args.side_a} wins {a_wins}/{args.repeats}, {args.side_b} wins "
              f"{b_wins}, ties {ties}; details in {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quakefit",
        description="train and apply a magnitude-regression network whose weights "
                    "are fit by population-based search",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="fit the network and write run artifacts")
    train.add_argument("--data", help="catalogue csv; omit to use synthetic rows")
    train.add_argument("--rows", type=int, help="synthetic row count")
    train.add_argument("--noise", type=float, help="synthetic target noise sd")
    train.add_argument("--out", required=True, help="output directory")
    train.add_argument("--config", dest="config_path", help="key = value settings file")
    train.add_argument("--optimizer", choices=("ica", "ga"))
    train.add_argument("--seed", type=int)
    train.add_argument("--threads", type=int)
    train.add_argument("--unit", choices=("richter", "normalized"),
                       help="unit for the console summary")
    train.add_argument("--hidden-sizes", dest="hidden_sizes",
                       help="comma-separated hidden layer widths")
    train.add_argument("--train-fraction", dest="train_fraction", type=float)
    train.add_argument("--fit-norm-on-train", dest="fit_norm_on_train",
                       action="store_const", const=True)
    train.add_argument("--num-countries", dest="num_countries", type=int)
    train.add_argument("--num-imperialists", dest="num_imperialists", type=int)
    train.add_argument("--num-decades", dest="num_decades", type=int)
    train.add_argument("--population-size", dest="population_size", type=int)
    train.add_argument("--num-generations", dest="num_generations", type=int)
    train.set_defaults(func=cmd_train)

    predict = sub.add_parser("predict", help="apply a saved model to a csv")
    predict.add_argument("--model", required=True, help="model file from train")
    predict.add_argument("--norm", required=True, help="normalization file from train")
    predict.add_argument("--data", required=True, help="catalogue csv to score")
    predict.add_argument("--out", required=True, help="predictions csv to write")
    predict.set_defaults(func=cmd_predict)

    synth = sub.add_parser("synth", help="write a synthetic catalogue csv")
    synth.add_argument("--rows", type=int, required=True)
    synth.add_argument("--noise", type=float, default=0.1)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--out", required=True)
    synth.set_defaults(func=cmd_synth)

    bench = sub.add_parser("benchmark",
                           help="compare the two optimizers on matched budgets")
    bench.add_argument("--function", default="mlp",
                       choices=("mlp", "sphere", "rastrigin", "rosenbrock"))
    bench.add_argument("--dim", type=int, default=10,
                       help="dimension for the test functions")
    bench.add_argument("--side-a", dest="side_a", default="ica",
                       choices=("ica", "ga"))
    bench.add_argument("--side-b", dest="side_b", default="ga",
                       choices=("ica", "ga"))
    bench.add_argument("--shared-seed", dest="shared_seed", action="store_true",
                       help="give side b the same seed as side a each pair")
    bench.add_argument("--rows", type=int, default=1000,
                       help="synthetic rows for the mlp objective")
    bench.add_argument("--noise", type=float, default=0.1)
    bench.add_argument("--population", type=int, default=200)
    bench.add_argument("--iterations", type=int, default=100)
    bench.add_argument("--num-imperialists", dest="num_imperialists", type=int)
    bench.add_argument("--repeats", type=int, default=1)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--bounds", help="search bounds as 'low,high'")
    bench.add_argument("--out", help="write the json report here instead of stdout")
    bench.set_defaults(func=cmd_benchmark)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except QuakefitError as exc:
        sys.stderr.write(json.dumps({"error": exc.category, "message": str(exc)}) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
