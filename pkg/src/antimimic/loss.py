"""Anti-mimicking training objective: value, analytic gradient, and a finite-difference checker.

The objective adds to the squared error a penalty on predictions that
sit close to recent ground-truth values while the target has moved:

    L = sum_i (z_i - zhat_i)^2
      + lam * sum_i sum_{k=1..K} [(z_i - z_{i-k}) * (z_i - zhat_i)]^2

using the sum convention (no averaging).  Lagged values z_{i-k} that
fall before the first target resolve into supplied history (ground
truth, most recent last).  The gradient w.r.t. zhat_i factors as
-2 (z_i - zhat_i) (1 + lam * sum_k (z_i - z_{i-k})^2), so each
coordinate is an exact quadratic in zhat_i and the loss is convex.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import backends


@dataclass(frozen=True)
class LossSpec:
    """Objective parameters: penalty weight, lag depth, and horizon.

    Serialized under the config keys "lambda", "K" and "horizon".
    lam=0 reduces to plain squared error; lags=1 and horizon=1 is the
    base single-step case.
    """

    lam: float = 0.0
    lags: int = 1
    horizon: int = 1

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lam must be >= 0, got {self.lam}")
        if self.lags < 1:
            raise ValueError(f"lags must be >= 1, got {self.lags}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")

    def with_lam(self, lam: float) -> "LossSpec":
        return replace(self, lam=float(lam))


@dataclass(frozen=True)
class LossEval:
    """Loss value, gradient w.r.t. predictions, and the two summands.

    value == mse_part + lam * reg_part; reg_part is reported without
    the lam factor so sweeps can rescale without re-evaluating.
    """

    value: float
    grad: np.ndarray
    mse_part: float
    reg_part: float


def _as_batch(z, zhat, histories, lags: int, horizon: int | None):
    """Validate and coerce inputs to the (B, h) kernel layout."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    zhat = np.ascontiguousarray(zhat, dtype=np.float64)
    histories = np.ascontiguousarray(histories, dtype=np.float64)
    squeeze = z.ndim == 1
    if squeeze:
        z = z[None, :]
        zhat = zhat[None, :]
        if histories.ndim == 1:
            histories = histories[None, :]
    if z.ndim != 2 or z.shape != zhat.shape or z.shape[1] < 1:
        raise ValueError(
            f"targets and predictions must share shape (B, h), got {z.shape} and {zhat.shape}"
        )
    if histories.ndim != 2 or histories.shape[0] != z.shape[0]:
        raise ValueError("need one history row per window")
    if histories.shape[1] < lags:
        raise ValueError(
            f"history provides {histories.shape[1]} values but the loss reaches back {lags}"
        )
    if horizon is not None and z.shape[1] != horizon:
        raise ValueError(f"windows have length {z.shape[1]}, spec.horizon is {horizon}")
    for name, arr in (("targets", z), ("predictions", zhat), ("history", histories)):
        if not np.isfinite(arr).all():
            raise ValueError(f"{name} contain non-finite values")
    return z, zhat, np.ascontiguousarray(histories[:, -lags:]), squeeze


def loss_eval(z, zhat, history, spec: LossSpec) -> LossEval:
    """Evaluate the objective on one aligned trajectory.

    z, zhat: vectors of length n; history: the >= spec.lags ground-truth
    values immediately preceding z (most recent last).  Lags inside the
    trajectory resolve to earlier entries of z itself.
    """
    zb, zhb, hb, _ = _as_batch(z, zhat, history, spec.lags, horizon=None)
    value, grads, mse_part, reg_part = backends.reg_loss_batch(zb, zhb, hb, float(spec.lam))
    return LossEval(value=float(value), grad=grads[0], mse_part=float(mse_part),
                    reg_part=float(reg_part))


def loss_eval_multihorizon(z, zhat, histories, spec: LossSpec) -> LossEval:
    """Evaluate the objective over a batch of horizon windows.

    z, zhat: (B, spec.horizon) targets and predictions; histories:
    (B, >= spec.lags) ground-truth values preceding each window, most
    recent last (row trailing value = the window's anchor).  Lagged
    terms inside a window use the window's own ground-truth targets
    (teacher forcing), never the model's predictions.  Value and parts
    are summed over the batch; grad has one entry per prediction.
    """
    zb, zhb, hb, _ = _as_batch(z, zhat, histories, spec.lags, horizon=spec.horizon)
    value, grads, mse_part, reg_part = backends.reg_loss_batch(zb, zhb, hb, float(spec.lam))
    return LossEval(value=float(value), grad=grads, mse_part=float(mse_part),
                    reg_part=float(reg_part))


def grad_check(z, zhat, history, spec: LossSpec, epsilon: float = 1e-6) -> float:
    """Max relative error between analytic and central-difference gradients.

    Accepts either a trajectory (1-d z/zhat with one history vector) or
    a window batch (2-d with one history row per window).  The relative
    error per coordinate uses max(|analytic|, |numeric|, 1e-12) as the
    denominator; the returned value is the worst coordinate.
    """
    if not 0.0 < epsilon <= 1e-3:
        raise ValueError(f"epsilon must be in (0, 1e-3], got {epsilon}")
    zb, zhb, hb, _ = _as_batch(z, zhat, history, spec.lags, horizon=None)
    lam = float(spec.lam)
    _, analytic, _, _ = backends.reg_loss_batch(zb, zhb, hb, lam)
    worst = 0.0
    flat = zhb.copy()
    for idx in np.ndindex(flat.shape):
        orig = flat[idx]
        flat[idx] = orig + epsilon
        up, _, _, _ = backends.reg_loss_batch(zb, flat, hb, lam)
        flat[idx] = orig - epsilon
        down, _, _, _ = backends.reg_loss_batch(zb, flat, hb, lam)
        flat[idx] = orig
        numeric = (up - down) / (2.0 * epsilon)
        denom = max(abs(analytic[idx]), abs(numeric), 1e-12)
        worst = max(worst, abs(analytic[idx] - numeric) / denom)
    return worst
