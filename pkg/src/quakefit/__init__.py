"""Magnitude regression with a fixed-topology network trained by
population-based search.

The network's weights and biases live in one flat vector; two
derivative-free optimizers (an empire-based search and a genetic
baseline) drive that vector toward low mean squared error on a
normalized earthquake catalogue.
"""

from .dataset import (
    Dataset,
    NormalizationSpec,
    build_dataset,
    load_csv,
    make_synthetic,
)
from .errors import QuakefitError
from .ga import GaConfig
from .ica import IcaConfig
from .metrics import EvalReport, evaluate, mse, pearson, rmse
from .mlp import MlpTopology, batch_forward, decode, encode, forward, load_model, param_count, save_model, tansig
from .objective import RegressionObjective
from .optim import Country, RunTrace

from . import ga as _ga_module
from . import ica as _ica_module

run_ica = _ica_module.run
run_ga = _ga_module.run

__version__ = "0.1.0"

__all__ = [
    "Country",
    "Dataset",
    "EvalReport",
    "GaConfig",
    "IcaConfig",
    "MlpTopology",
    "NormalizationSpec",
    "QuakefitError",
    "RegressionObjective",
    "RunTrace",
    "batch_forward",
    "build_dataset",
    "decode",
    "encode",
    "evaluate",
    "forward",
    "load_csv",
    "load_model",
    "make_synthetic",
    "mse",
    "param_count",
    "pearson",
    "rmse",
    "run_ga",
    "run_ica",
    "save_model",
    "tansig",
    "__version__",
]
