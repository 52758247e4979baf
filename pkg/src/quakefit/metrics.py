"""Regression error measures and report assembly.

All aggregate measures are computed here with numpy reductions so that
every caller (optimizer objectives, CLI reports, tests) sees identical
values for identical inputs regardless of which kernel backend produced
the predictions.
"""

from __future__ import annotations

import json
import math

import numpy as np

from dataclasses import dataclass, field

from . import mlp
from .errors import DegenerateCorrelationError, ShapeError


def _paired(predictions, targets):
    p = np.asarray(predictions, dtype=np.float64).ravel()
    t = np.asarray(targets, dtype=np.float64).ravel()
    if p.shape != t.shape:
        raise ShapeError(f"predictions and targets differ in length: {p.shape[0]} vs {t.shape[0]}")
    if p.shape[0] == 0:
        raise ShapeError("cannot score an empty sample")
    return p, t


def mse(predictions, targets) -> float:
    p, t = _paired(predictions, targets)
    d = p - t
    return float(np.mean(d * d))


def rmse(predictions, targets) -> float:
    return math.sqrt(mse(predictions, targets))


def pearson(x, y) -> float:
    """Linear correlation coefficient. Raises when either side is constant."""
    a, b = _paired(x, y)
    # check constancy on the raw values: mean-centering a constant sample
    # can leave sub-ulp residue that fakes a nonzero variance
    if a.min() == a.max() or b.min() == b.max():
        raise DegenerateCorrelationError(
            "correlation is undefined when a variable has zero variance"
        )
    da = a - a.mean()
    db = b - b.mean()
    na = float(np.sqrt(np.sum(da * da)))
    nb = float(np.sqrt(np.sum(db * db)))
    if na == 0.0 or nb == 0.0:
        raise DegenerateCorrelationError(
            "correlation is undefined when a variable has zero variance"
        )
    return float(np.sum(da * db) / (na * nb))


def error_stats(errors) -> dict:
    """Mean, population variance, and extremes of a residual sample."""
    e = np.asarray(errors, dtype=np.float64).ravel()
    if e.shape[0] == 0:
        raise ShapeError("cannot summarize an empty sample")
    mean = float(np.mean(e))
    centered = e - mean
    return {
        "mean": mean,
        "variance": float(np.mean(centered * centered)),
        "min": float(np.min(e)),
        "max": float(np.max(e)),
    }


def histogram(values, num_bins: int = 20) -> list:
    """Equal-width bins over the sample range; (low, high, count) triples."""
    v = np.asarray(values, dtype=np.float64).ravel()
    if v.shape[0] == 0:
        raise ShapeError("cannot bin an empty sample")
    if num_bins < 1:
        raise ShapeError(f"num_bins must be >= 1, got {num_bins}")
    counts, edges = np.histogram(v, bins=num_bins)
    return [
        (float(edges[i]), float(edges[i + 1]), int(counts[i]))
        for i in range(num_bins)
    ]


@dataclass
class EvalReport:
    subset: str
    n_rows: int
    normalized: dict = field(default_factory=dict)
    richter: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"subset": self.subset, "n_rows": self.n_rows}
        if self.normalized:
            out["normalized"] = dict(self.normalized)
        if self.richter:
            out["richter"] = dict(self.richter)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _scale_block(predictions, targets, num_bins) -> dict:
    errors = np.asarray(predictions) - np.asarray(targets)
    stats = error_stats(errors)
    try:
        corr = pearson(predictions, targets)
    except DegenerateCorrelationError:
        corr = None
    return {
        "mse": mse(predictions, targets),
        "rmse": rmse(predictions, targets),
        "correlation": corr,
        "error_mean": stats["mean"],
        "error_variance": stats["variance"],
        "error_min": stats["min"],
        "error_max": stats["max"],
        "error_histogram": histogram(errors, num_bins),
    }


def evaluate(params, topology, dataset, subset: str = "test", unit: str = "both",
             num_bins: int = 20) -> EvalReport:
    """Score a parameter vector on one side of the split.

    The normalized block scores predictions against the stored (scaled)
    targets; the richter block maps both back through the fitted target
    bounds first. unit picks which blocks to compute: "normalized",
    "richter", or "both".
    """
    if unit not in ("normalized", "richter", "both"):
        raise ShapeError(f"unit must be normalized, richter, or both, got {unit!r}")
    idx = dataset.indices_for(subset)
    features = dataset.features[idx]
    targets = dataset.targets[idx]
    predictions = mlp.batch_forward(params, topology, features)

    report = EvalReport(subset=subset, n_rows=int(idx.shape[0]))
    if unit in ("normalized", "both"):
        report.normalized = _scale_block(predictions, targets, num_bins)
    if unit in ("richter", "both"):
        spec = dataset.norm_spec
        name = dataset.target_name
        pred_r = spec.inverse(name, predictions)
        targ_r = spec.inverse(name, targets)
        report.richter = _scale_block(pred_r, targ_r, num_bins)
    return report


def write_histogram_csv(bins, path):
    """Persist (low, high, count) triples for external plotting."""
    lines = ["bin_low,bin_high,count"]
    lines.extend(f"{low!r},{high!r},{count}" for low, high, count in bins)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
