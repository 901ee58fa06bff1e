"""Pure-numpy fallback kernels (see backends.py for selection)."""

from __future__ import annotations

import numpy as np


def reg_loss_batch(z, zhat, hist, lam):
    """Regularized squared-error loss over a batch of forecast windows.

    z, zhat: (B, h) targets and predictions; hist: (B, K) ground-truth
    values preceding each window, most recent last.  Lags inside a
    window resolve to earlier targets (teacher forcing), lags crossing
    the window start resolve into hist.

    Per element: (z - zhat)^2 + lam * sum_k [(z - z_lag_k) * (z - zhat)]^2.
    Returns (value, grads, mse_part, reg_part) with value and the parts
    summed over the batch (sum convention, no averaging) and grads the
    derivative of value w.r.t. zhat, shape (B, h).
    """
    z = np.asarray(z, dtype=np.float64)
    zhat = np.asarray(zhat, dtype=np.float64)
    hist = np.asarray(hist, dtype=np.float64)
    n_lags = hist.shape[1]
    h = z.shape[1]
    err = z - zhat
    ext = np.concatenate((hist, z), axis=1)
    lag_sq = np.zeros_like(z)
    for k in range(1, n_lags + 1):
        lagged = ext[:, n_lags - k : n_lags - k + h]
        diff = z - lagged
        lag_sq += diff * diff
    sq = err * err
    mse_part = float(np.sum(sq))
    reg_part = float(np.sum(lag_sq * sq))
    grads = -2.0 * err * (1.0 + lam * lag_sq)
    value = mse_part + lam * reg_part
    return value, grads, mse_part, reg_part


def mse_loss_batch(z, zhat):
    """Plain squared-error loss (sum over batch) and its gradient."""
    z = np.asarray(z, dtype=np.float64)
    zhat = np.asarray(zhat, dtype=np.float64)
    err = z - zhat
    value = float(np.sum(err * err))
    grads = -2.0 * err
    return value, grads


def rnn_forward_batch(wx, wh, b, wo, bo, xt):
    """Elman forward pass over a batch.

    xt is the input windows transposed to (T, B) so each step reads a
    contiguous row.  Hidden state starts at zero.  Returns the stacked
    hidden states (T+1, B, H) and the readout predictions (B, h).
    """
    t_steps, batch = xt.shape
    hidden = b.shape[0]
    states = np.zeros((t_steps + 1, batch, hidden))
    for t in range(t_steps):
        pre = states[t] @ wh.T + np.outer(xt[t], wx) + b
        states[t + 1] = np.tanh(pre)
    preds = states[t_steps] @ wo.T + bo
    return states, preds


def rnn_backward_batch(wx, wh, b, wo, bo, xt, states, upstream):
    """Backprop through time for the Elman cell.

    upstream is dL/dpreds, shape (B, h).  Returns parameter gradients
    (dwx, dwh, db, dwo, dbo) summed over the batch.
    """
    t_steps, batch = xt.shape
    hidden = b.shape[0]
    dwo = upstream.T @ states[t_steps]
    dbo = upstream.sum(axis=0)
    dwx = np.zeros(hidden)
    dwh = np.zeros((hidden, hidden))
    db = np.zeros(hidden)
    dh = upstream @ wo
    for t in range(t_steps - 1, -1, -1):
        h_t = states[t + 1]
        ds = dh * (1.0 - h_t * h_t)
        dwh += ds.T @ states[t]
        dwx += ds.T @ xt[t]
        db += ds.sum(axis=0)
        dh = ds @ wh
    return dwx, dwh, db, dwo, dbo
