"""antimimic: train small forecasters and quantify copy-last (mimicking) behavior.

A forecaster "mimics" when its prediction for step i sits closer to the
previous ground-truth value than to the value it was supposed to
predict.  This package provides the signed score that detects the
behavior, shifted error/accuracy metrics around it, a regularized
squared-error objective that penalizes it, small trainable forecasters
(linear autoregressor, MLP, Elman recurrent cell) with analytic
gradients, a seeded synthetic benchmark signal, and a CLI for running
reproducible experiments.
"""

from .backends import BACKEND
from .config import ConfigError, CsvSource, ExperimentConfig
from .loss import LossEval, LossSpec, grad_check, loss_eval, loss_eval_multihorizon
from .metrics import (ChangeVector, Forecast, change_vector, directional_accuracy,
                      f1_binary, mim, mse, shifted_mse, summarize)
from .models import (MODEL_KINDS, ModelParams, ModelSpec, avg_window_predict,
                     backward, backward_batch, forward, forward_batch, init_params,
                     load_checkpoint, param_layout, predict_multistep, save_checkpoint)
from .series import (Normalizer, TimeSeries, WindowedDataset, fit_normalizer,
                     load_csv, make_windows)
from .synth import SynthSpec, clean_signal, generate
from .training import (AdamConfig, AdamState, TrainConfig, TrainReport,
                       TrainingDiverged, adam_step, baseline_metrics, evaluate_params,
                       lambda_sweep, learning_rate, train, write_report)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "__version__",
    "AdamConfig",
    "AdamState",
    "ChangeVector",
    "ConfigError",
    "CsvSource",
    "ExperimentConfig",
    "Forecast",
    "LossEval",
    "LossSpec",
    "MODEL_KINDS",
    "ModelParams",
    "ModelSpec",
    "Normalizer",
    "SynthSpec",
    "TimeSeries",
    "TrainConfig",
    "TrainReport",
    "TrainingDiverged",
    "WindowedDataset",
    "adam_step",
    "avg_window_predict",
    "backward",
    "backward_batch",
    "baseline_metrics",
    "change_vector",
    "clean_signal",
    "directional_accuracy",
    "evaluate_params",
    "f1_binary",
    "fit_normalizer",
    "forward",
    "forward_batch",
    "generate",
    "grad_check",
    "init_params",
    "lambda_sweep",
    "learning_rate",
    "load_checkpoint",
    "load_csv",
    "loss_eval",
    "loss_eval_multihorizon",
    "make_windows",
    "mim",
    "mse",
    "param_layout",
    "predict_multistep",
    "save_checkpoint",
    "shifted_mse",
    "summarize",
    "train",
    "write_report",
]
