"""Seven-column earthquake table pipeline.

Ingests a CSV with occurrence year, Richter magnitude (the regression
target), epicenter latitude/longitude, focal depth, and epicentral and
hypocentral distances. Rows with missing cells are dropped, records are
sorted by year, every column is mapped to the (-1, 1) interval, and a
seeded random 90/10 split marks train and test rows. A synthetic generator
produces desk-scale datasets with the same schema.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DegenerateColumnError,
    EmptyDatasetError,
    InputOutputError,
    ParseError,
    RowParseError,
    ShapeError,
    SplitTooSmallError,
)

TARGET_COLUMN = "magnitude"
FEATURE_COLUMNS = (
    "year",
    "latitude",
    "longitude",
    "depth_km",
    "epicentral_km",
    "hypocentral_km",
)
ALL_COLUMNS = ("year", TARGET_COLUMN) + FEATURE_COLUMNS[1:]

DEFAULT_MISSING_SENTINELS = frozenset({-999.0})

# Physical validity windows; rows outside them are malformed.
_RANGE_CHECKS = {
    "latitude": (-90.0, 90.0),
    "longitude": (-180.0, 180.0),
    "depth_km": (0.0, math.inf),
    "epicentral_km": (0.0, math.inf),
    "hypocentral_km": (0.0, math.inf),
}


@dataclass(frozen=True)
class RawRecord:
    year: float
    magnitude: float
    latitude: float
    longitude: float
    depth_km: float
    epicentral_km: float
    hypocentral_km: float

    def column(self, name: str) -> float:
        return getattr(self, name)


@dataclass(frozen=True)
class CleaningSummary:
    rows_read: int
    rows_dropped: int

    @property
    def rows_kept(self) -> int:
        return self.rows_read - self.rows_dropped


def _parse_cell(token: str, sentinels) -> tuple[float | None, bool]:
    """Returns (value, malformed). value None means the cell is missing."""
    token = token.strip() if token is not None else ""
    if token == "":
        return None, False
    try:
        value = float(token)
    except ValueError:
        return None, True
    if not math.isfinite(value) or value in sentinels:
        return None, False
    return value, False


def load_csv(path, column_map=None, missing_sentinels=DEFAULT_MISSING_SENTINELS,
             strict: bool = False):
    """Read and clean the earthquake table.

    column_map maps canonical column names (see ALL_COLUMNS) to the headers
    actually used in the file. Rows with a missing cell (empty, a sentinel
    value such as -999, or a non-finite number) are dropped. Non-numeric
    tokens and out-of-range coordinates mark a row malformed: dropped when
    strict is off, a RowParseError naming the line otherwise.

    Returns (records, CleaningSummary) with file order preserved.
    """
    mapping = {name: name for name in ALL_COLUMNS}
    if column_map:
        unknown = set(column_map) - set(ALL_COLUMNS)
        if unknown:
            raise ConfigError(f"unknown canonical columns in mapping: {sorted(unknown)}")
        mapping.update(column_map)
    sentinels = frozenset(float(s) for s in missing_sentinels)

    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise InputOutputError(f"cannot read dataset file {path}: {exc}") from exc

    records: list[RawRecord] = []
    rows_read = 0
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyDatasetError(f"{path} has no header row")
        missing_headers = [mapping[c] for c in ALL_COLUMNS if mapping[c] not in reader.fieldnames]
        if missing_headers:
            raise ParseError(f"{path} lacks required columns: {missing_headers}")
        for row in reader:
            rows_read += 1
            values = {}
            drop = False
            for name in ALL_COLUMNS:
                value, malformed = _parse_cell(row.get(mapping[name]), sentinels)
                if malformed:
                    if strict:
                        raise RowParseError(
                            f"{path}:{reader.line_num}: column {mapping[name]!r} "
                            f"holds non-numeric value {row.get(mapping[name])!r}"
                        )
                    drop = True
                    break
                if value is None:
                    drop = True
                    break
                lo, hi = _RANGE_CHECKS.get(name, (-math.inf, math.inf))
                if not lo <= value <= hi:
                    if strict:
                        raise RowParseError(
                            f"{path}:{reader.line_num}: column {mapping[name]!r} "
                            f"value {value} outside [{lo}, {hi}]"
                        )
                    drop = True
                    break
                values[name] = value
            if not drop:
                records.append(RawRecord(**values))

    if not records:
        raise EmptyDatasetError(f"{path} contains no usable data rows")
    return records, CleaningSummary(rows_read=rows_read, rows_dropped=rows_read - len(records))


def write_csv(records, path):
    """Write records with canonical headers; repr() keeps floats exact."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(ALL_COLUMNS)
        for rec in records:
            writer.writerow([repr(rec.column(name)) for name in ALL_COLUMNS])


def sort_by_year(records):
    """Stable ascending sort on the year column."""
    if not records:
        raise EmptyDatasetError("cannot sort an empty record list")
    return sorted(records, key=lambda rec: rec.year)


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-column (min, max) pairs defining the affine map onto (-1, 1)."""

    bounds: dict[str, tuple[float, float]]

    def transform(self, name: str, values):
        lo, hi = self.bounds[name]
        return 2.0 * (np.asarray(values, dtype=np.float64) - lo) / (hi - lo) - 1.0

    def inverse(self, name: str, values):
        lo, hi = self.bounds[name]
        return (np.asarray(values, dtype=np.float64) + 1.0) / 2.0 * (hi - lo) + lo

    def half_width(self, name: str) -> float:
        lo, hi = self.bounds[name]
        return (hi - lo) / 2.0

    def canonical_text(self) -> str:
        lines = [f"columns = {','.join(self.bounds)}"]
        for name, (lo, hi) in self.bounds.items():
            lines.append(f"{name}.min = {repr(lo)}")
            lines.append(f"{name}.max = {repr(hi)}")
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.canonical_text())

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as fh:
                lines = fh.read().splitlines()
        except OSError as exc:
            raise InputOutputError(f"cannot read normalization spec {path}: {exc}") from exc
        entries: dict[str, str] = {}
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, val = line.partition("=")
            if not sep:
                raise ParseError(f"malformed normalization line: {line!r}")
            entries[key.strip()] = val.strip()
        if "columns" not in entries:
            raise ParseError(f"{path} lacks the columns key")
        bounds = {}
        for name in entries["columns"].split(","):
            name = name.strip()
            try:
                bounds[name] = (float(entries[f"{name}.min"]), float(entries[f"{name}.max"]))
            except KeyError as exc:
                raise ParseError(f"{path} lacks bounds for column {name!r}") from exc
        return cls(bounds=bounds)


def fit_normalizer(records) -> NormalizationSpec:
    """Capture per-column (min, max) over the records.

    The resulting transform sends each column's minimum to -1 and maximum
    to +1. A constant column cannot be scaled and raises.
    """
    if len(records) < 2:
        raise ShapeError("need at least 2 records to fit a normalizer")
    bounds = {}
    for name in ALL_COLUMNS:
        col = [rec.column(name) for rec in records]
        lo, hi = min(col), max(col)
        if not lo < hi:
            raise DegenerateColumnError(f"column {name!r} is constant at {lo}")
        bounds[name] = (lo, hi)
    return NormalizationSpec(bounds=bounds)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def split(records, train_fraction: float = 0.9, seed: int = 0):
    """Seed-determined random train/test index split.

    The train side gets round-half-up(train_fraction * N) indices of a
    uniformly random permutation; the rest are test. Both sides must end
    up non-empty.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(records)
    if n < 2:
        raise SplitTooSmallError(f"need at least 2 records to split, got {n}")
    n_train = _round_half_up(train_fraction * n)
    if n_train == 0 or n_train == n:
        raise SplitTooSmallError(
            f"fraction {train_fraction} over {n} records leaves an empty side "
            f"({n_train} train / {n - n_train} test)"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


@dataclass(frozen=True)
class Dataset:
    """Normalized feature matrix, target vector, and the split that built them."""

    features: np.ndarray  # (N, 6) in [-1, 1]
    targets: np.ndarray  # (N,) in [-1, 1]
    norm_spec: NormalizationSpec
    train_indices: np.ndarray
    test_indices: np.ndarray
    feature_names: tuple[str, ...] = FEATURE_COLUMNS
    target_name: str = TARGET_COLUMN

    @property
    def n_records(self) -> int:
        return self.features.shape[0]

    def indices_for(self, subset: str) -> np.ndarray:
        if subset == "train":
            return self.train_indices
        if subset == "test":
            return self.test_indices
        raise ConfigError(f"subset must be 'train' or 'test', got {subset!r}")


def build_dataset(records, train_fraction: float = 0.9, seed: int = 0,
                  fit_norm_on_train: bool = False) -> Dataset:
    """Sort, normalize, and split cleaned records into a Dataset.

    Normalization is fitted on the full table by default; pass
    fit_norm_on_train=True to fit on the train rows only (test entries may
    then leave [-1, 1]).
    """
    ordered = sort_by_year(records)
    train_idx, test_idx = split(ordered, train_fraction=train_fraction, seed=seed)
    if fit_norm_on_train:
        spec = fit_normalizer([ordered[i] for i in train_idx])
    else:
        spec = fit_normalizer(ordered)
    features = np.column_stack([
        spec.transform(name, [rec.column(name) for rec in ordered])
        for name in FEATURE_COLUMNS
    ])
    targets = spec.transform(TARGET_COLUMN, [rec.column(TARGET_COLUMN) for rec in ordered])
    return Dataset(
        features=features,
        targets=targets,
        norm_spec=spec,
        train_indices=train_idx,
        test_indices=test_idx,
    )


def synthetic_magnitude(year, latitude, longitude, depth_km, epicentral_km,
                        hypocentral_km):
    """Noise-free generating function behind make_synthetic.

    Features are first squashed to order-one values, then combined through
    a fixed smooth expression whose range stays within plausible Richter
    magnitudes (about 3 to 7.8).
    """
    u_year = (np.asarray(year, dtype=np.float64) - 1970.0) / 40.0
    u_lat = np.asarray(latitude, dtype=np.float64) / 90.0
    u_lon = np.asarray(longitude, dtype=np.float64) / 180.0
    u_depth = np.asarray(depth_km, dtype=np.float64) / 50.0 - 1.0
    u_epi = np.asarray(epicentral_km, dtype=np.float64) / 250.0 - 1.0
    u_hypo = np.asarray(hypocentral_km, dtype=np.float64) / 250.0 - 1.0
    return (
        5.4
        + 0.9 * np.tanh(1.5 * u_year - 0.8 * u_depth)
        + 0.7 * np.sin(2.0 * u_lon) * np.cos(u_lat)
        - 0.5 * u_epi * u_depth
        + 0.3 * u_hypo
    )


def make_synthetic(n: int, seed: int = 0, noise_sd: float = 0.1):
    """Generate n plausible records, fully determined by the seed.

    Columns are drawn uniformly (year 1930-2010, latitude +-90, longitude
    +-180, depth 0-100 km, distances 0-500 km) in that column order, then
    the magnitude is the generating function plus Gaussian noise of the
    given standard deviation.
    """
    if n < 10:
        raise ConfigError(f"synthetic datasets need n >= 10, got {n}")
    if noise_sd < 0:
        raise ConfigError(f"noise_sd must be >= 0, got {noise_sd}")
    rng = np.random.default_rng(seed)
    year = rng.uniform(1930.0, 2010.0, n)
    latitude = rng.uniform(-90.0, 90.0, n)
    longitude = rng.uniform(-180.0, 180.0, n)
    depth_km = rng.uniform(0.0, 100.0, n)
    epicentral_km = rng.uniform(0.0, 500.0, n)
    hypocentral_km = rng.uniform(0.0, 500.0, n)
    magnitude = synthetic_magnitude(
        year, latitude, longitude, depth_km, epicentral_km, hypocentral_km
    )
    if noise_sd > 0:
        magnitude = magnitude + noise_sd * rng.standard_normal(n)
    return [
        RawRecord(
            year=float(year[i]),
            magnitude=float(magnitude[i]),
            latitude=float(latitude[i]),
            longitude=float(longitude[i]),
            depth_km=float(depth_km[i]),
            epicentral_km=float(epicentral_km[i]),
            hypocentral_km=float(hypocentral_km[i]),
        )
        for i in range(n)
    ]
