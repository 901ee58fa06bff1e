"""Numba-jitted kernels (see backends.py for selection).

Same contracts as _kernels_numpy; explicit loops compile to tight
machine code and accumulate in a fixed scalar order, so results are
reproducible run-to-run.  matmuls that BLAS handles well stay as
np.dot on contiguous operands.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def reg_loss_batch(z, zhat, hist, lam):
    n_windows, h = z.shape
    n_lags = hist.shape[1]
    grads = np.empty((n_windows, h))
    mse_acc = 0.0
    reg_acc = 0.0
    for w in range(n_windows):
        for j in range(h):
            err = z[w, j] - zhat[w, j]
            lag_sq = 0.0
            for k in range(1, n_lags + 1):
                idx = j - k
                if idx >= 0:
                    lag = z[w, idx]
                else:
                    lag = hist[w, n_lags + idx]
                diff = z[w, j] - lag
                lag_sq += diff * diff
            sq = err * err
            mse_acc += sq
            reg_acc += lag_sq * sq
            grads[w, j] = -2.0 * err * (1.0 + lam * lag_sq)
    return mse_acc + lam * reg_acc, grads, mse_acc, reg_acc


@njit(cache=True)
def mse_loss_batch(z, zhat):
    n_windows, h = z.shape
    grads = np.empty((n_windows, h))
    acc = 0.0
    for w in range(n_windows):
        for j in range(h):
            err = z[w, j] - zhat[w, j]
            acc += err * err
            grads[w, j] = -2.0 * err
    return acc, grads


@njit(cache=True)
def rnn_forward_batch(wx, wh, b, wo, bo, xt):
    t_steps, batch = xt.shape
    hidden = b.shape[0]
    h_out = bo.shape[0]
    wh_t = np.ascontiguousarray(wh.T)
    states = np.zeros((t_steps + 1, batch, hidden))
    for t in range(t_steps):
        pre = np.dot(states[t], wh_t)
        for i in range(batch):
            x_val = xt[t, i]
            for j in range(hidden):
                states[t + 1, i, j] = math.tanh(pre[i, j] + wx[j] * x_val + b[j])
    wo_t = np.ascontiguousarray(wo.T)
    preds = np.dot(states[t_steps], wo_t)
    for i in range(batch):
        for j in range(h_out):
            preds[i, j] += bo[j]
    return states, preds


@njit(cache=True)
def rnn_backward_batch(wx, wh, b, wo, bo, xt, states, upstream):
    t_steps, batch = xt.shape
    hidden = b.shape[0]
    h_out = bo.shape[0]
    dwx = np.zeros(hidden)
    dwh = np.zeros((hidden, hidden))
    db = np.zeros(hidden)
    dwo = np.zeros((h_out, hidden))
    dbo = np.zeros(h_out)
    for i in range(batch):
        for j in range(h_out):
            up = upstream[i, j]
            dbo[j] += up
            for k in range(hidden):
                dwo[j, k] += up * states[t_steps, i, k]
    dh = np.dot(upstream, wo)
    ds = np.empty((batch, hidden))
    for t in range(t_steps - 1, -1, -1):
        for i in range(batch):
            for j in range(hidden):
                h_val = states[t + 1, i, j]
                ds[i, j] = dh[i, j] * (1.0 - h_val * h_val)
        for i in range(batch):
            x_val = xt[t, i]
            for j in range(hidden):
                d = ds[i, j]
                db[j] += d
                dwx[j] += d * x_val
                for k in range(hidden):
                    dwh[j, k] += d * states[t, i, k]
        dh = np.dot(ds, wh)
    return dwx, dwh, db, dwo, dbo
