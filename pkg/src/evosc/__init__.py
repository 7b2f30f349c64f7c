"""evosc: evolutionary subspace clustering with a learned continuous-time
affinity dynamic, plus static and smoothing baselines."""

from .baselines import AffectConfig, CesmConfig, SscConfig, affect_smooth, cesm_fit, ssc_solve
from .cluster import affinity, kmeans, mat, spectral_cluster, vec
from .config import RunConfig, load_config
from .data import TimeSeriesDataset, load_dataset, save_dataset
from .evaluation import EvalReport, accuracy_curve, clustering_accuracy
from .field import FieldParams, field_forward, init_params, load_checkpoint, save_checkpoint
from .linalg import Rng, matmul, orth, sym_eigen
from .odesolve import ControlPath, SolveConfig, interpolate_control, ode_solve
from .synth import SynthConfig, generate, givens
from .train import TrainConfig, TrainReport, dl_dC, loss, train

__all__ = [
    "AffectConfig", "CesmConfig", "SscConfig", "affect_smooth", "cesm_fit", "ssc_solve",
    "affinity", "kmeans", "mat", "spectral_cluster", "vec",
    "RunConfig", "load_config",
    "TimeSeriesDataset", "load_dataset", "save_dataset",
    "EvalReport", "accuracy_curve", "clustering_accuracy",
    "FieldParams", "field_forward", "init_params", "load_checkpoint", "save_checkpoint",
    "Rng", "matmul", "orth", "sym_eigen",
    "ControlPath", "SolveConfig", "interpolate_control", "ode_solve",
    "SynthConfig", "generate", "givens",
    "TrainConfig", "TrainReport", "dl_dC", "loss", "train",
]

__version__ = "0.1.0"
