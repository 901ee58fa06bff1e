"""Forecast evaluation: MSE, shifted MSE, the mimicking score, and direction-of-change metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Forecast:
    """Aligned target/prediction vectors plus the anchor value.

    The anchor is the last observed value immediately preceding the
    first target; it supplies the lag-one reference for the first step
    of every shifted metric.
    """

    targets: np.ndarray
    predictions: np.ndarray
    anchor: float

    def __post_init__(self):
        z = np.array(self.targets, dtype=np.float64)
        zhat = np.array(self.predictions, dtype=np.float64)
        anchor = float(self.anchor)
        if z.ndim != 1 or zhat.ndim != 1:
            raise ValueError("targets and predictions must be 1-d")
        if z.size != zhat.size or z.size < 1:
            raise ValueError(
                f"targets and predictions must share a positive length, got {z.size} and {zhat.size}"
            )
        if not (np.isfinite(z).all() and np.isfinite(zhat).all() and np.isfinite(anchor)):
            raise ValueError("forecast values must be finite")
        z.setflags(write=False)
        zhat.setflags(write=False)
        object.__setattr__(self, "targets", z)
        object.__setattr__(self, "predictions", zhat)
        object.__setattr__(self, "anchor", anchor)

    def __len__(self):
        return self.targets.size

    @property
    def previous_targets(self) -> np.ndarray:
        """Lag-one ground truth aligned with each step: [anchor, z_1, ..., z_{n-1}]."""
        return np.concatenate(([self.anchor], self.targets[:-1]))


@dataclass(frozen=True)
class ChangeVector:
    """Ternary direction-of-change signs, one of {-1, 0, +1} per step."""

    signs: np.ndarray

    def __post_init__(self):
        signs = np.array(self.signs, dtype=np.int64)
        if signs.ndim != 1 or signs.size < 1:
            raise ValueError("signs must be a nonempty 1-d vector")
        if not np.isin(signs, (-1, 0, 1)).all():
            raise ValueError("signs must lie in {-1, 0, +1}")
        signs.setflags(write=False)
        object.__setattr__(self, "signs", signs)

    def __len__(self):
        return self.signs.size


def mse(f: Forecast) -> float:
    """Mean squared error between predictions and targets."""
    diff = f.predictions - f.targets
    return float(np.mean(diff * diff))


def shifted_mse(f: Forecast) -> float:
    """Mean squared error between predictions and the lag-one targets.

    A copy-last model scores exactly 0 here, so near-zero values flag
    mimicking.
    """
    diff = f.predictions - f.previous_targets
    return float(np.mean(diff * diff))


def mim(f: Forecast) -> float:
    """Signed mimicking score: sum of (z_i - zhat_i)^2 - (z_{i-1} - zhat_i)^2.

    Positive values mean predictions sit closer to the previous target
    than to the current one, i.e. the model mimics.  Equals
    n * (mse - shifted_mse).
    """
    err_now = f.targets - f.predictions
    err_prev = f.previous_targets - f.predictions
    return float(np.sum(err_now * err_now - err_prev * err_prev))


def change_vector(values, v0: float) -> ChangeVector:
    """Sign of each step change, with v0 as the value preceding step one."""
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size < 1:
        raise ValueError("values must be a nonempty 1-d vector")
    prev = np.concatenate(([float(v0)], values[:-1]))
    return ChangeVector(np.sign(values - prev).astype(np.int64))


def directional_accuracy(f: Forecast, lag: int = 0) -> float:
    """Fraction of steps whose predicted change sign matches the target's.

    lag=0 compares the predicted change at step i with the true change
    at step i; lag=1 compares it with the true change one step earlier
    (the quantity a copy-last model gets perfectly right).  Signs are
    ternary and must match exactly.  The prediction change vector uses
    the anchor as its step-zero reference, same as the target's.
    """
    if lag not in (0, 1):
        raise ValueError(f"lag must be 0 or 1, got {lag}")
    n = len(f)
    if n < 1 + lag:
        raise ValueError(f"need at least {1 + lag} steps for lag={lag}, got {n}")
    v = change_vector(f.targets, f.anchor).signs
    vhat = change_vector(f.predictions, f.anchor).signs
    if lag == 0:
        return float(np.mean(vhat == v))
    return float(np.mean(vhat[1:] == v[:-1]))


def f1_binary(f: Forecast, positive_sign: int = 1) -> float:
    """F1 score of the predicted change signs, one sign as the positive class.

    Any step whose true/predicted sign differs from positive_sign counts
    as negative, so the ternary signs collapse to a binary problem.
    Returns 0 when precision and recall are both 0.
    """
    if positive_sign not in (1, -1):
        raise ValueError(f"positive_sign must be +1 or -1, got {positive_sign}")
    v = change_vector(f.targets, f.anchor).signs
    vhat = change_vector(f.predictions, f.anchor).signs
    pos_true = v == positive_sign
    pos_pred = vhat == positive_sign
    tp = int(np.sum(pos_true & pos_pred))
    fp = int(np.sum(~pos_true & pos_pred))
    fn = int(np.sum(pos_true & ~pos_pred))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2.0 * tp / denom


def summarize(f: Forecast) -> dict[str, float]:
    """All scalar metrics of a forecast in one dictionary."""
    out = {
        "mse": mse(f),
        "s_mse": shifted_mse(f),
        "mim": mim(f),
        "acc": directional_accuracy(f, lag=0),
        "f1": f1_binary(f, positive_sign=1),
    }
    out["s_acc"] = directional_accuracy(f, lag=1) if len(f) >= 2 else float("nan")
    return out
