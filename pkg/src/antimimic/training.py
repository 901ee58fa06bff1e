"""Adam training with step-decayed learning rate, best-validation checkpointing,
and experiment orchestration producing serializable reports."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import backends
from .loss import LossSpec
from .metrics import Forecast, summarize
from .models import (ModelParams, ModelSpec, backward_batch, forward_batch,
                     init_params, save_checkpoint)
from .series import WindowedDataset

OBJECTIVES = ("regularized", "mse")

METRIC_NAMES = ("mse", "s_mse", "mim", "acc", "s_acc", "f1")


class TrainingDiverged(RuntimeError):
    """Raised when a loss turns non-finite; carries the offending epoch."""

    def __init__(self, epoch: int, what: str):
        super().__init__(f"non-finite {what} at epoch {epoch}; aborting")
        self.epoch = epoch


@dataclass(frozen=True)
class AdamConfig:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError("betas must lie in [0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be positive")


@dataclass(frozen=True)
class AdamState:
    """First/second moment estimates and the step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n), t=0)


def adam_step(flat, grad, state: AdamState, lr: float,
              config: AdamConfig = AdamConfig()):
    """One bias-corrected Adam update; returns (new_flat, new_state)."""
    flat = np.asarray(flat, dtype=np.float64)
    grad = np.asarray(grad, dtype=np.float64)
    if flat.shape != grad.shape or flat.ndim != 1:
        raise ValueError(f"params {flat.shape} and grad {grad.shape} must be equal 1-d shapes")
    t = state.t + 1
    m = config.beta1 * state.m + (1.0 - config.beta1) * grad
    v = config.beta2 * state.v + (1.0 - config.beta2) * grad * grad
    m_hat = m / (1.0 - config.beta1 ** t)
    v_hat = v / (1.0 - config.beta2 ** t)
    new_flat = flat - lr * m_hat / (np.sqrt(v_hat) + config.eps)
    return new_flat, AdamState(m=m, v=v, t=t)


@dataclass(frozen=True)
class TrainConfig:
    """Optimization protocol: Adam, lr0 decayed by decay_factor every
    decay_every epochs, fixed epoch count, seeded batch shuffling."""

    loss: LossSpec = LossSpec()
    lr0: float = 1e-3
    decay_factor: float = 0.1
    decay_every: int = 10
    epochs: int = 100
    batch_size: int = 32
    seed: int = 0
    adam: AdamConfig = AdamConfig()
    objective: str = "regularized"
    val_objective: str | None = None

    def __post_init__(self):
        if not self.lr0 > 0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if not 0 < self.decay_factor <= 1:
            raise ValueError(f"decay_factor must be in (0, 1], got {self.decay_factor}")
        if self.decay_every < 1:
            raise ValueError(f"decay_every must be >= 1, got {self.decay_every}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}, got {self.objective!r}")
        if self.val_objective is not None and self.val_objective not in OBJECTIVES:
            raise ValueError(
                f"val_objective must be one of {OBJECTIVES}, got {self.val_objective!r}"
            )

    @property
    def effective_val_objective(self) -> str:
        return self.val_objective if self.val_objective is not None else self.objective


def learning_rate(config: TrainConfig, epoch: int) -> float:
    """lr at a 0-based epoch: lr0 * decay_factor ** (epoch // decay_every)."""
    if epoch < 0:
        raise ValueError(f"epoch must be >= 0, got {epoch}")
    return config.lr0 * config.decay_factor ** (epoch // config.decay_every)


@dataclass(frozen=True)
class TrainReport:
    """Everything a finished run produced.

    wall_time_s is informational only and deliberately left out of the
    serialized form, which must be byte-identical across reruns.
    """

    config: dict
    train_losses: tuple
    val_losses: tuple
    best_epoch: int
    best_val_loss: float
    test_metrics: dict
    params: ModelParams = field(repr=False)
    wall_time_s: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "config": self.config,
            "train_losses": list(self.train_losses),
            "val_losses": list(self.val_losses),
            "best_epoch": self.best_epoch,
            "best_val_loss": self.best_val_loss,
            "test_metrics": dict(self.test_metrics),
        }


def loss_spec_to_config(spec: LossSpec) -> dict:
    """LossSpec under its external key names."""
    return {"lambda": spec.lam, "K": spec.lags, "horizon": spec.horizon}


def _objective_eval(objective: str, targets, preds, histories, spec: LossSpec):
    """Summed loss value and dL/dpred for one batch under the chosen objective."""
    if objective == "mse":
        value, grads = backends.mse_loss_batch(targets, preds)
    else:
        value, grads, _, _ = backends.reg_loss_batch(targets, preds, histories, spec.lam)
    return value, grads


def _gather(dataset: WindowedDataset, idx, n_lags: int):
    """Contiguous (inputs, targets, trailing-lag histories) for the given samples."""
    xb = np.ascontiguousarray(dataset.inputs[idx])
    zb = np.ascontiguousarray(dataset.targets[idx])
    hb = np.ascontiguousarray(xb[:, xb.shape[1] - n_lags:])
    return xb, zb, hb


def _split_loss(objective: str, spec: ModelSpec, params: ModelParams,
                dataset: WindowedDataset, idx, loss_spec: LossSpec) -> float:
    """Per-window mean loss of one split, evaluated full-batch."""
    xb, zb, hb = _gather(dataset, idx, loss_spec.lags)
    preds, _ = forward_batch(spec, params, xb)
    value, _ = _objective_eval(objective, zb, preds, hb, loss_spec)
    return value / idx.size


def evaluate_params(dataset: WindowedDataset, spec: ModelSpec, params: ModelParams,
                    split: str = "test") -> dict:
    """Test-style metrics of a model on one split.

    For horizon 1 the split's stride-1 windows form one contiguous
    trajectory, so predictions are pooled into a single forecast whose
    anchor is the first window's anchor; shifted metrics then compare
    consecutive predictions the way a rolling 1-step deployment would.
    For horizon > 1 each window is scored on its own and the metrics
    are averaged over windows with equal weight.
    """
    idx = dataset.indices(split)
    if idx.size == 0:
        raise ValueError(f"split {split!r} is empty")
    xb = np.ascontiguousarray(dataset.inputs[idx])
    preds, _ = forward_batch(spec, params, xb)
    targets = dataset.targets[idx]
    anchors = dataset.anchors[idx]
    if dataset.horizon == 1:
        forecast = Forecast(targets=targets[:, 0], predictions=preds[:, 0],
                            anchor=anchors[0])
        return summarize(forecast)
    per_window = [
        summarize(Forecast(targets=targets[i], predictions=preds[i], anchor=anchors[i]))
        for i in range(idx.size)
    ]
    return {name: float(np.mean([m[name] for m in per_window])) for name in METRIC_NAMES}


def train(dataset: WindowedDataset, model_spec: ModelSpec, config: TrainConfig,
          on_batch=None) -> TrainReport:
    """Run the full protocol and score the best-validation model on the test split.

    Deterministic: identical (dataset, model_spec, config) give bitwise
    identical reports and parameters.  on_batch, if given, is called as
    on_batch(epoch, batch_index, batch_loss) after every update; meant
    for progress display and tests.
    """
    if model_spec.kind == "avg_window":
        raise ValueError("avg_window has no trainable parameters; evaluate it directly")
    if model_spec.input_len != dataset.input_len or model_spec.horizon != dataset.horizon:
        raise ValueError(
            f"model expects (T={model_spec.input_len}, h={model_spec.horizon}), dataset has "
            f"(T={dataset.input_len}, h={dataset.horizon})"
        )
    if config.loss.horizon != dataset.horizon:
        raise ValueError(
            f"loss horizon {config.loss.horizon} != dataset horizon {dataset.horizon}"
        )
    if config.loss.lags > dataset.input_len:
        raise ValueError(
            f"loss reaches back {config.loss.lags} lags but windows provide only "
            f"{dataset.input_len} history values"
        )
    train_idx = dataset.indices("train")
    val_idx = dataset.indices("val")
    if train_idx.size == 0 or val_idx.size == 0:
        raise ValueError("training needs nonempty train and val splits")

    started = time.perf_counter()
    n_lags = config.loss.lags
    params = init_params(model_spec)
    state = AdamState.zeros(params.flat.size)
    rng = np.random.default_rng(config.seed)
    x_tr, z_tr, h_tr = _gather(dataset, train_idx, n_lags)
    val_objective = config.effective_val_objective

    train_losses, val_losses = [], []
    best_epoch, best_val, best_params = -1, math.inf, params
    for epoch in range(config.epochs):
        lr = learning_rate(config, epoch)
        perm = rng.permutation(train_idx.size)
        epoch_sum = 0.0
        for b, start in enumerate(range(0, train_idx.size, config.batch_size)):
            sel = perm[start:start + config.batch_size]
            xb = np.ascontiguousarray(x_tr[sel])
            zb = np.ascontiguousarray(z_tr[sel])
            hb = np.ascontiguousarray(h_tr[sel])
            preds, cache = forward_batch(model_spec, params, xb)
            value, grads = _objective_eval(config.objective, zb, preds, hb, config.loss)
            batch_loss = value / sel.size
            if not math.isfinite(batch_loss):
                raise TrainingDiverged(epoch, "training loss")
            epoch_sum += value
            flat_grad = backward_batch(model_spec, params, cache, grads / sel.size)
            new_flat, state = adam_step(params.flat, flat_grad, state, lr, config.adam)
            params = params.with_flat(new_flat)
            if on_batch is not None:
                on_batch(epoch, b, batch_loss)
        train_losses.append(epoch_sum / train_idx.size)
        val_loss = _split_loss(val_objective, model_spec, params, dataset, val_idx, config.loss)
        if not math.isfinite(val_loss):
            raise TrainingDiverged(epoch, "validation loss")
        val_losses.append(val_loss)
        if val_loss < best_val:
            best_epoch, best_val, best_params = epoch, val_loss, params

    test_idx = dataset.indices("test")
    if test_idx.size:
        test_metrics = evaluate_params(dataset, model_spec, best_params, "test")
    else:
        test_metrics = {name: float("nan") for name in METRIC_NAMES}
    config_echo = {
        "model": asdict(model_spec),
        "train": {
            "lr0": config.lr0,
            "decay_factor": config.decay_factor,
            "decay_every": config.decay_every,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "seed": config.seed,
            "objective": config.objective,
            "val_objective": val_objective,
            "adam": asdict(config.adam),
            **loss_spec_to_config(config.loss),
        },
        "windowing": {
            "input_len": dataset.input_len,
            "horizon": dataset.horizon,
            "counts": dataset.counts(),
        },
    }
    return TrainReport(
        config=config_echo,
        train_losses=tuple(train_losses),
        val_losses=tuple(val_losses),
        best_epoch=best_epoch,
        best_val_loss=best_val,
        test_metrics=test_metrics,
        params=best_params,
        wall_time_s=time.perf_counter() - started,
    )


def lambda_sweep(dataset: WindowedDataset, model_spec: ModelSpec, config: TrainConfig,
                 lambdas) -> list:
    """One full training run per penalty weight, identical seeds throughout."""
    lambdas = list(lambdas)
    if not lambdas:
        raise ValueError("lambda sweep needs at least one value")
    reports = []
    for lam in lambdas:
        cfg = replace(config, loss=config.loss.with_lam(lam))
        reports.append(train(dataset, model_spec, cfg))
    return reports


def baseline_metrics(dataset: WindowedDataset, window: int = 1, split: str = "test") -> dict:
    """Metrics of the untrained averaging baseline on a split."""
    spec = ModelSpec(kind="avg_window", input_len=dataset.input_len,
                     horizon=dataset.horizon, window=window)
    params = init_params(spec)
    return evaluate_params(dataset, spec, params, split)


def _format_cell(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_metrics_csv(path, rows, columns) -> None:
    """Write metric rows (dicts) as CSV with a fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row.get(c, "")) for c in columns])


def write_report(report: TrainReport, out_dir, model_label: str) -> None:
    """Persist a run: report.json, metrics.csv, checkpoint.bin."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "report.json", "w") as fh:
        json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    loss_cfg = report.config["train"]
    row = {
        "model": model_label,
        "lambda": float(loss_cfg["lambda"]),
        "K": loss_cfg["K"],
        "horizon": loss_cfg["horizon"],
        "best_epoch": report.best_epoch,
        **{name: report.test_metrics[name] for name in METRIC_NAMES},
    }
    write_metrics_csv(out_dir / "metrics.csv", [row],
                      ["model", "lambda", "K", "horizon", "best_epoch", *METRIC_NAMES])
    save_checkpoint(out_dir / "checkpoint.bin", report.params)
