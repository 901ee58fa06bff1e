"""Benchmark the numba kernels against the pure-numpy fallbacks.

Times the four hot kernels on training-shaped workloads (best-of-N
wall time, after a warmup call that also triggers JIT compilation) and
reports the cross-backend agreement for each workload.

Run:
    python3 benchmarks/bench_backends.py [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from antimimic import _kernels_numpy as knp

try:
    from antimimic import _kernels_numba as knb
except ImportError:  # pragma: no cover - numba is an optional speedup
    knb = None


def best_of(fn, args, repeats):
    fn(*args)  # warmup; first numba call compiles
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def max_rel(a, b):
    worst = 0.0
    for x, y in zip(a, b):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        denom = np.maximum(np.maximum(np.abs(x), np.abs(y)), 1e-12)
        worst = max(worst, float(np.max(np.abs(x - y) / denom)))
    return worst


def workloads(rng):
    batch, horizon, lags = 512, 1, 3
    z = rng.normal(size=(batch, horizon))
    zhat = z + 0.3 * rng.normal(size=(batch, horizon))
    hist = rng.normal(size=(batch, lags))
    yield "reg loss  B=512 h=1 K=3", "reg_loss_batch", (z, zhat, hist, 1.0)

    batch, horizon, lags = 64, 5, 3
    z = rng.normal(size=(batch, horizon))
    zhat = z + 0.3 * rng.normal(size=(batch, horizon))
    hist = rng.normal(size=(batch, lags))
    yield "reg loss  B=64  h=5 K=3", "reg_loss_batch", (z, zhat, hist, 100.0)

    z = rng.normal(size=(512, 1))
    yield "mse loss  B=512 h=1", "mse_loss_batch", (z, z + 0.3 * rng.normal(size=z.shape))

    steps, batch, hidden, horizon = 16, 128, 32, 1
    wx = rng.normal(size=hidden)
    wh = 0.3 * rng.normal(size=(hidden, hidden))
    b = rng.normal(size=hidden)
    wo = rng.normal(size=(horizon, hidden))
    bo = rng.normal(size=horizon)
    xt = np.ascontiguousarray(rng.normal(size=(steps, batch)))
    yield "rnn fwd   T=16 B=128 H=32", "rnn_forward_batch", (wx, wh, b, wo, bo, xt)

    states, preds = knp.rnn_forward_batch(wx, wh, b, wo, bo, xt)
    upstream = np.ascontiguousarray(rng.normal(size=preds.shape))
    yield ("rnn bwd   T=16 B=128 H=32", "rnn_backward_batch",
           (wx, wh, b, wo, bo, xt, states, upstream))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200,
                        help="timing repetitions per kernel (best-of)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []
    for label, name, payload in workloads(rng):
        t_np = best_of(getattr(knp, name), payload, args.repeats)
        if knb is None:
            rows.append((label, t_np, None, None))
            continue
        t_nb = best_of(getattr(knb, name), payload, args.repeats)
        agree = max_rel(_as_tuple(getattr(knp, name)(*payload)),
                        _as_tuple(getattr(knb, name)(*payload)))
        rows.append((label, t_np, t_nb, agree))

    print(f"{'workload':<27} {'numpy':>10} {'numba':>10} {'speedup':>8} {'max rel':>9}")
    for label, t_np, t_nb, agree in rows:
        if t_nb is None:
            print(f"{label:<27} {t_np * 1e6:>8.1f}us {'n/a':>10} {'n/a':>8} {'n/a':>9}")
        else:
            print(f"{label:<27} {t_np * 1e6:>8.1f}us {t_nb * 1e6:>8.1f}us "
                  f"{t_np / t_nb:>7.1f}x {agree:>9.1e}")
    if knb is None:
        print("\nnumba is not importable; only the fallback path was timed")


def _as_tuple(result):
    return result if isinstance(result, tuple) else (result,)


if __name__ == "__main__":
    main()
