"""Forecasting models: averaging baseline, linear autoregressor, MLP, Elman recurrent cell.

Each trainable model exposes a forward pass and an analytic parameter
gradient for an arbitrary upstream dL/dprediction vector, so any
differentiable objective can drive training.  Parameters live in one
flat float64 vector with a declared per-array layout, which keeps the
optimizer generic and the checkpoint format trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import backends

MODEL_KINDS = ("avg_window", "linear_ar", "mlp", "rnn")

_CHECKPOINT_MAGIC = "antimimic-checkpoint v1"


@dataclass(frozen=True)
class ModelSpec:
    """Architecture description; fully determines shapes and initialization.

    window applies to avg_window only (how many trailing values are
    averaged); hidden_dim applies to mlp and rnn.  init_seed pins the
    random initialization.
    """

    kind: str
    input_len: int
    horizon: int = 1
    hidden_dim: int = 32
    window: int = 1
    init_seed: int = 0

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.input_len < 1:
            raise ValueError(f"input_len must be >= 1, got {self.input_len}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        if self.kind in ("mlp", "rnn") and self.hidden_dim < 1:
            raise ValueError(f"hidden_dim must be >= 1, got {self.hidden_dim}")
        if self.kind == "avg_window":
            if self.window < 1:
                raise ValueError(f"window must be >= 1, got {self.window}")
            if self.window > self.input_len:
                raise ValueError(
                    f"window {self.window} exceeds input_len {self.input_len}"
                )


@dataclass(frozen=True)
class ModelParams:
    """Flat float64 parameter vector plus its per-array layout."""

    kind: str
    names: tuple
    shapes: tuple
    flat: np.ndarray

    def __post_init__(self):
        flat = np.array(self.flat, dtype=np.float64).ravel()
        expected = sum(int(np.prod(s)) for s in self.shapes)
        if flat.size != expected:
            raise ValueError(f"layout declares {expected} parameters, vector has {flat.size}")
        if len(self.names) != len(self.shapes):
            raise ValueError("names and shapes must align")
        if not np.isfinite(flat).all():
            raise ValueError("parameters contain non-finite values")
        flat.setflags(write=False)
        object.__setattr__(self, "kind", str(self.kind))
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "shapes", tuple(tuple(int(d) for d in s) for s in self.shapes))
        object.__setattr__(self, "flat", flat)

    def arrays(self) -> dict:
        """Read-only views of each named parameter array."""
        out = {}
        offset = 0
        for name, shape in zip(self.names, self.shapes):
            size = int(np.prod(shape)) if shape else 1
            out[name] = self.flat[offset:offset + size].reshape(shape)
            offset += size
        return out

    def with_flat(self, flat) -> "ModelParams":
        return replace(self, flat=flat)


def param_layout(spec: ModelSpec):
    """Names, shapes and init fan-in of every parameter array, in storage order."""
    t, h, hd = spec.input_len, spec.horizon, spec.hidden_dim
    if spec.kind == "avg_window":
        return ()
    if spec.kind == "linear_ar":
        return (("w", (h, t), t), ("b", (h,), t))
    if spec.kind == "mlp":
        return (("w1", (hd, t), t), ("b1", (hd,), t),
                ("w2", (h, hd), hd), ("b2", (h,), hd))
    return (("wx", (hd,), 1), ("wh", (hd, hd), hd), ("b", (hd,), hd),
            ("wo", (h, hd), hd), ("bo", (h,), hd))


def init_params(spec: ModelSpec) -> ModelParams:
    """Seeded uniform initialization in [-1/sqrt(fan_in), +1/sqrt(fan_in)].

    Arrays are drawn in storage order from one generator, so the seed
    alone pins every weight.
    """
    layout = param_layout(spec)
    rng = np.random.default_rng(spec.init_seed)
    chunks = []
    for _, shape, fan_in in layout:
        bound = 1.0 / math.sqrt(fan_in)
        chunks.append(rng.uniform(-bound, bound, size=int(np.prod(shape))))
    flat = np.concatenate(chunks) if chunks else np.zeros(0)
    return ModelParams(kind=spec.kind,
                       names=tuple(name for name, _, _ in layout),
                       shapes=tuple(shape for _, shape, _ in layout),
                       flat=flat)


def avg_window_predict(input_window, n: int) -> float:
    """Mean of the last n input values; n=1 is the persistence baseline."""
    x = np.asarray(input_window, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("input must be a nonempty vector")
    if not 1 <= n <= x.size:
        raise ValueError(f"window n={n} must satisfy 1 <= n <= input length {x.size}")
    return float(np.mean(x[-n:]))


def _avg_window_batch(inputs: np.ndarray, n: int, horizon: int) -> np.ndarray:
    """Iterative averaging forecast: each step's mean is appended and re-averaged."""
    if n > inputs.shape[1]:
        raise ValueError(f"window n={n} exceeds input length {inputs.shape[1]}")
    buf = inputs[:, inputs.shape[1] - n:].copy()
    preds = np.empty((inputs.shape[0], horizon))
    for j in range(horizon):
        step = buf.mean(axis=1)
        preds[:, j] = step
        buf = np.concatenate((buf[:, 1:], step[:, None]), axis=1)
    return preds


def _check_inputs(spec: ModelSpec, inputs) -> np.ndarray:
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != spec.input_len:
        raise ValueError(
            f"inputs must have shape (B, {spec.input_len}), got {inputs.shape}"
        )
    return inputs


def forward_batch(spec: ModelSpec, params: ModelParams, inputs):
    """Predictions (B, horizon) for a batch of input windows, plus the backward cache."""
    inputs = _check_inputs(spec, inputs)
    if params.kind != spec.kind:
        raise ValueError(f"params are for {params.kind!r}, spec wants {spec.kind!r}")
    if spec.kind == "avg_window":
        return _avg_window_batch(inputs, spec.window, spec.horizon), None
    p = params.arrays()
    if spec.kind == "linear_ar":
        preds = inputs @ p["w"].T + p["b"]
        return preds, (inputs,)
    if spec.kind == "mlp":
        pre = inputs @ p["w1"].T + p["b1"]
        act = np.maximum(pre, 0.0)
        preds = act @ p["w2"].T + p["b2"]
        return preds, (inputs, pre, act)
    xt = np.ascontiguousarray(inputs.T)
    states, preds = backends.rnn_forward_batch(p["wx"], p["wh"], p["b"], p["wo"], p["bo"], xt)
    return preds, (xt, states)


def backward_batch(spec: ModelSpec, params: ModelParams, cache, upstream) -> np.ndarray:
    """Flat parameter gradient for upstream dL/dpredictions, summed over the batch."""
    if spec.kind == "avg_window":
        raise ValueError("avg_window has no trainable parameters")
    upstream = np.ascontiguousarray(upstream, dtype=np.float64)
    if upstream.ndim != 2 or upstream.shape[1] != spec.horizon:
        raise ValueError(
            f"upstream must have shape (B, {spec.horizon}), got {upstream.shape}"
        )
    p = params.arrays()
    if spec.kind == "linear_ar":
        (inputs,) = cache
        dw = upstream.T @ inputs
        db = upstream.sum(axis=0)
        return np.concatenate((dw.ravel(), db))
    if spec.kind == "mlp":
        inputs, pre, act = cache
        dw2 = upstream.T @ act
        db2 = upstream.sum(axis=0)
        dpre = (upstream @ p["w2"]) * (pre > 0.0)
        dw1 = dpre.T @ inputs
        db1 = dpre.sum(axis=0)
        return np.concatenate((dw1.ravel(), db1, dw2.ravel(), db2))
    xt, states = cache
    dwx, dwh, db, dwo, dbo = backends.rnn_backward_batch(
        p["wx"], p["wh"], p["b"], p["wo"], p["bo"], xt, states, upstream
    )
    return np.concatenate((dwx, dwh.ravel(), db, dwo.ravel(), dbo))


def forward(spec: ModelSpec, params: ModelParams, input_window) -> np.ndarray:
    """Prediction vector (length horizon) for one input window."""
    x = np.asarray(input_window, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("input must be a 1-d window")
    preds, _ = forward_batch(spec, params, x[None, :])
    return preds[0]


def backward(spec: ModelSpec, params: ModelParams, input_window, upstream) -> np.ndarray:
    """Flat parameter gradient for one window and upstream dL/dprediction."""
    x = np.asarray(input_window, dtype=np.float64)
    up = np.asarray(upstream, dtype=np.float64)
    if x.ndim != 1 or up.ndim != 1:
        raise ValueError("input and upstream must be 1-d")
    _, cache = forward_batch(spec, params, x[None, :])
    return backward_batch(spec, params, cache, up[None, :])


def predict_multistep(spec: ModelSpec, params: ModelParams, input_window, h: int,
                      mode: str = "iterative") -> np.ndarray:
    """Forecast h steps ahead, either in one direct shot or by feeding
    1-step predictions back into the window."""
    if h < 1:
        raise ValueError(f"h must be >= 1, got {h}")
    if mode not in ("direct", "iterative"):
        raise ValueError(f"mode must be direct or iterative, got {mode!r}")
    x = np.asarray(input_window, dtype=np.float64)
    if mode == "direct":
        if spec.horizon != h:
            raise ValueError(
                f"direct mode needs a model with output length {h}, spec has {spec.horizon}"
            )
        return forward(spec, params, x)
    if spec.horizon != 1:
        raise ValueError(
            f"iterative mode needs a 1-step model, spec has horizon {spec.horizon}"
        )
    window = x.copy()
    out = np.empty(h)
    for j in range(h):
        step = float(forward(spec, params, window)[0])
        out[j] = step
        window = np.concatenate((window[1:], [step]))
    return out


def save_checkpoint(path, params: ModelParams) -> None:
    """Serialize params: ASCII shape header, then the flat vector as
    little-endian float64 bytes.

    Layout::

        antimimic-checkpoint v1\\n
        kind <kind>\\n
        array <name> <dim> [<dim> ...]\\n   (one line per array, storage order)
        payload\\n
        <8 * n_params raw bytes, little-endian float64>
    """
    lines = [_CHECKPOINT_MAGIC, f"kind {params.kind}"]
    for name, shape in zip(params.names, params.shapes):
        lines.append("array " + name + " " + " ".join(str(d) for d in shape))
    lines.append("payload")
    header = ("\n".join(lines) + "\n").encode("ascii")
    payload = params.flat.astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_checkpoint(path) -> ModelParams:
    """Inverse of save_checkpoint."""
    path = Path(path)
    blob = path.read_bytes()
    marker = b"payload\n"
    cut = blob.find(marker)
    if cut < 0:
        raise ValueError(f"{path}: missing payload marker; not a checkpoint file")
    header_lines = blob[:cut].decode("ascii").splitlines()
    if not header_lines or header_lines[0] != _CHECKPOINT_MAGIC:
        raise ValueError(f"{path}: bad magic line; not a checkpoint file")
    if len(header_lines) < 2 or not header_lines[1].startswith("kind "):
        raise ValueError(f"{path}: missing kind line")
    kind = header_lines[1][len("kind "):]
    names, shapes = [], []
    for line in header_lines[2:]:
        parts = line.split()
        if parts[0] != "array":
            raise ValueError(f"{path}: unexpected header line {line!r}")
        names.append(parts[1])
        shapes.append(tuple(int(d) for d in parts[2:]))
    payload = blob[cut + len(marker):]
    expected = sum(int(np.prod(s)) for s in shapes)
    if len(payload) != 8 * expected:
        raise ValueError(
            f"{path}: payload holds {len(payload)} bytes, header declares {8 * expected}"
        )
    flat = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    return ModelParams(kind=kind, names=tuple(names), shapes=tuple(shapes), flat=flat)
