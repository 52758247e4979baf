"""Fixed-topology feed-forward perceptron over a flat parameter vector.

The whole network lives in one float64 vector so population optimizers can
treat it as a point in a box. The layout is fixed: for each layer in order,
the weight matrix in row-major order (one row per destination neuron),
followed by that layer's biases. Hidden layers use the hyperbolic-tangent
sigmoid, the output layer is linear.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    CodecError,
    CompatibilityError,
    ConfigError,
    InputOutputError,
    ParseError,
    ShapeError,
)

DEFAULT_HIDDEN_SIZES = (16, 24)


@dataclass(frozen=True)
class MlpTopology:
    """Layer widths and activation kinds of the network."""

    input_dim: int
    hidden_sizes: tuple[int, ...] = DEFAULT_HIDDEN_SIZES
    output_dim: int = 1
    hidden_activation: str = "tansig"
    output_activation: str = "purelin"

    def __post_init__(self):
        object.__setattr__(self, "hidden_sizes", tuple(int(h) for h in self.hidden_sizes))
        if self.input_dim < 1 or self.output_dim < 1:
            raise ConfigError("input_dim and output_dim must be >= 1")
        if any(h < 1 for h in self.hidden_sizes):
            raise ConfigError("every hidden layer needs at least one neuron")
        if self.hidden_activation != "tansig":
            raise ConfigError(f"unsupported hidden activation {self.hidden_activation!r}")
        if self.output_activation != "purelin":
            raise ConfigError(f"unsupported output activation {self.output_activation!r}")

    @property
    def layer_sizes(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden_sizes, self.output_dim)

    def param_count(self) -> int:
        """Total number of weights and biases: sum of fan_in*fan_out + fan_out."""
        sizes = self.layer_sizes
        return sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))


@dataclass(frozen=True)
class LayerWeights:
    weights: np.ndarray  # (fan_out, fan_in)
    biases: np.ndarray  # (fan_out,)


def param_count(topology: MlpTopology) -> int:
    return topology.param_count()


def tansig(n):
    """Hyperbolic-tangent sigmoid, 2/(1+exp(-2n)) - 1.

    Computed as tanh(n), which is the same function in a form that cannot
    overflow for large |n|. Accepts scalars or arrays.
    """
    if np.isscalar(n):
        return float(np.tanh(n))
    return np.tanh(np.asarray(n, dtype=np.float64))


def _as_param_vector(v, topology: MlpTopology) -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise CodecError(f"parameter vector must be 1-D, got shape {arr.shape}")
    expected = topology.param_count()
    if arr.shape[0] != expected:
        raise CodecError(
            f"parameter vector has length {arr.shape[0]}, topology needs {expected}"
        )
    return arr


def decode(v, topology: MlpTopology) -> list[LayerWeights]:
    """Unpack a flat parameter vector into per-layer weight matrices and biases."""
    arr = _as_param_vector(v, topology)
    sizes = topology.layer_sizes
    layers = []
    offset = 0
    for fan_in, fan_out in zip(sizes, sizes[1:]):
        w_end = offset + fan_in * fan_out
        W = arr[offset:w_end].reshape(fan_out, fan_in).copy()
        b = arr[w_end:w_end + fan_out].copy()
        layers.append(LayerWeights(weights=W, biases=b))
        offset = w_end + fan_out
    return layers


def encode(layers, topology: MlpTopology) -> np.ndarray:
    """Flatten per-layer weights and biases back into a parameter vector."""
    sizes = topology.layer_sizes
    if len(layers) != len(sizes) - 1:
        raise CodecError(f"expected {len(sizes) - 1} layers, got {len(layers)}")
    parts = []
    for i, layer in enumerate(layers):
        W = np.asarray(layer.weights, dtype=np.float64)
        b = np.asarray(layer.biases, dtype=np.float64)
        if W.shape != (sizes[i + 1], sizes[i]) or b.shape != (sizes[i + 1],):
            raise CodecError(
                f"layer {i}: weights {W.shape} / biases {b.shape} do not match "
                f"fan_in={sizes[i]}, fan_out={sizes[i + 1]}"
            )
        parts.append(W.reshape(-1))
        parts.append(b)
    return np.concatenate(parts)


def batch_forward(v, topology: MlpTopology, X) -> np.ndarray:
    """Network output for every row of X.

    Returns a 1-D vector when the topology has a single output, otherwise
    an (n_rows, output_dim) matrix.
    """
    arr = _as_param_vector(v, topology)
    Xa = np.ascontiguousarray(X, dtype=np.float64)
    if Xa.ndim != 2 or Xa.shape[1] != topology.input_dim:
        raise ShapeError(
            f"feature matrix must be (n, {topology.input_dim}), got {Xa.shape}"
        )
    out = kernels.forward_batch(arr, topology.layer_sizes, Xa)
    if topology.output_dim == 1:
        return out[:, 0]
    return out


def forward(v, topology: MlpTopology, x):
    """Network output for one feature vector.

    A single-output network yields a float; wider output layers yield the
    output vector. Computed as a one-row batch so it agrees with
    batch_forward bit for bit.
    """
    xa = np.ascontiguousarray(x, dtype=np.float64)
    if xa.ndim != 1 or xa.shape[0] != topology.input_dim:
        raise ShapeError(f"input must be a length-{topology.input_dim} vector, got shape {xa.shape}")
    out = batch_forward(v, topology, xa.reshape(1, -1))
    if topology.output_dim == 1:
        return float(out[0])
    return out[0]


MODEL_FORMAT = "quakefit-model-v1"


def save_model(path, params, topology: MlpTopology, feature_columns, norm_spec_sha256: str):
    """Write a trained parameter vector as portable decimal text.

    Values use repr(), which round-trips float64 exactly. The header ties
    the model to its normalization spec via a content hash.
    """
    arr = _as_param_vector(params, topology)
    lines = [
        f"format = {MODEL_FORMAT}",
        f"input_dim = {topology.input_dim}",
        f"hidden_sizes = {','.join(str(h) for h in topology.hidden_sizes)}",
        f"output_dim = {topology.output_dim}",
        f"hidden_activation = {topology.hidden_activation}",
        f"output_activation = {topology.output_activation}",
        f"feature_columns = {','.join(feature_columns)}",
        f"norm_spec_sha256 = {norm_spec_sha256}",
        f"param_count = {arr.shape[0]}",
        "params:",
    ]
    lines.extend(repr(float(x)) for x in arr)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path):
    """Read a model file; returns (params, topology, header dict)."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise InputOutputError(f"cannot read model file {path}: {exc}") from exc
    header: dict = {}
    values: list[float] = []
    in_params = False
    for line in raw:
        line = line.strip()
        if not line:
            continue
        if in_params:
            try:
                values.append(float(line))
            except ValueError:
                raise ParseError(f"bad parameter value in model file: {line!r}") from None
        elif line == "params:":
            in_params = True
        else:
            key, sep, val = line.partition("=")
            if not sep:
                raise ParseError(f"malformed model header line: {line!r}")
            header[key.strip()] = val.strip()
    if "feature_columns" in header:
        header["feature_columns"] = tuple(
            name.strip() for name in header["feature_columns"].split(",") if name.strip()
        )
    if header.get("format") != MODEL_FORMAT:
        raise CompatibilityError(
            f"unsupported model format {header.get('format')!r}, expected {MODEL_FORMAT!r}"
        )
    try:
        hidden = tuple(int(t) for t in header["hidden_sizes"].split(",") if t.strip()) \
            if header["hidden_sizes"] else ()
        topology = MlpTopology(
            input_dim=int(header["input_dim"]),
            hidden_sizes=hidden,
            output_dim=int(header["output_dim"]),
            hidden_activation=header.get("hidden_activation", "tansig"),
            output_activation=header.get("output_activation", "purelin"),
        )
        declared = int(header.get("param_count", len(values)))
    except (KeyError, ValueError) as exc:
        raise ParseError(f"model header missing or malformed: {exc}") from exc
    params = np.asarray(values, dtype=np.float64)
    if declared != params.shape[0]:
        raise ParseError(
            f"model declares {declared} parameters but carries {params.shape[0]}"
        )
    params = _as_param_vector(params, topology)
    return params, topology, header


def file_sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()
