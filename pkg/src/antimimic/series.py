"""Time-series container, CSV ingestion, normalization and windowing."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

NORMALIZER_KINDS = ("zscore", "minmax", "none")
SPLIT_ORDER = ("train", "val", "test")


def _frozen_array(values, dtype=np.float64, ndim=1):
    arr = np.array(values, dtype=dtype)
    if arr.ndim != ndim:
        raise ValueError(f"expected {ndim}-d data, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeSeries:
    """Univariate real-valued series; immutable after construction."""

    values: np.ndarray
    name: str = "series"
    freq_hint: str | None = None

    def __post_init__(self):
        arr = _frozen_array(self.values)
        if arr.size < 2:
            raise ValueError(f"series {self.name!r} needs at least 2 points, got {arr.size}")
        if not np.isfinite(arr).all():
            raise ValueError(f"series {self.name!r} contains non-finite values")
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class Normalizer:
    """Affine rescaling (x - loc) / scale with its inverse.

    kind zscore: loc/scale are mean/std of the fit data; minmax: min and
    max-min; none: identity.  Fit statistics come from the training
    prefix only, so later splits never leak into them.
    """

    kind: str
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in NORMALIZER_KINDS:
            raise ValueError(f"unknown normalizer kind {self.kind!r}")
        if self.kind != "none" and not self.scale > 0:
            raise ValueError("normalizer scale must be positive")

    def transform(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "none":
            return x.copy()
        return (x - self.loc) / self.scale

    def inverse(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.kind == "none":
            return x.copy()
        return x * self.scale + self.loc

    def apply(self, series: TimeSeries) -> TimeSeries:
        return TimeSeries(self.transform(series.values), name=series.name,
                          freq_hint=series.freq_hint)


def fit_normalizer(series: TimeSeries, train_fraction: float, kind: str = "zscore") -> Normalizer:
    """Fit rescaling statistics on the first floor(train_fraction * len) points."""
    if not 0.0 < train_fraction <= 1.0:
        raise ValueError(f"train_fraction must be in (0, 1], got {train_fraction}")
    if kind not in NORMALIZER_KINDS:
        raise ValueError(f"unknown normalizer kind {kind!r}")
    n_fit = math.floor(train_fraction * len(series))
    if n_fit < 2:
        raise ValueError(f"need at least 2 training points to fit, got {n_fit}")
    head = series.values[:n_fit]
    if kind == "none":
        return Normalizer("none")
    if kind == "zscore":
        std = float(np.std(head))
        if std <= 0.0:
            raise ValueError("zscore normalizer needs nonzero variance in the training prefix")
        return Normalizer("zscore", loc=float(np.mean(head)), scale=std)
    lo, hi = float(np.min(head)), float(np.max(head))
    if hi <= lo:
        raise ValueError("minmax normalizer needs min < max in the training prefix")
    return Normalizer("minmax", loc=lo, scale=hi - lo)


@dataclass(frozen=True)
class WindowedDataset:
    """Stride-1 supervised windows with chronological split labels.

    Sample i covers inputs[i] = x[i : i+T], targets[i] = x[i+T : i+T+h]
    and anchors[i] = x[i+T-1], the last observed value before the first
    target.  Samples are stored in chronological order and split labels
    never interleave (all train samples precede all val, which precede
    all test).
    """

    inputs: np.ndarray
    targets: np.ndarray
    anchors: np.ndarray
    split: np.ndarray
    input_len: int
    horizon: int

    def __post_init__(self):
        inputs = _frozen_array(self.inputs, ndim=2)
        targets = _frozen_array(self.targets, ndim=2)
        anchors = _frozen_array(self.anchors)
        split = np.array(self.split, dtype="U5")
        split.setflags(write=False)
        n = inputs.shape[0]
        if not (targets.shape[0] == anchors.shape[0] == split.shape[0] == n):
            raise ValueError("samples, targets, anchors and split labels must align")
        if inputs.shape[1] != self.input_len or targets.shape[1] != self.horizon:
            raise ValueError("window shapes disagree with input_len/horizon")
        if n and not np.array_equal(anchors, inputs[:, -1]):
            raise ValueError("anchor must equal the last input value of each sample")
        ranks = {name: i for i, name in enumerate(SPLIT_ORDER)}
        try:
            codes = [ranks[s] for s in split]
        except KeyError as exc:
            raise ValueError(f"unknown split label {exc.args[0]!r}") from None
        if any(a > b for a, b in zip(codes, codes[1:])):
            raise ValueError("split labels must be chronological: train, then val, then test")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "anchors", anchors)
        object.__setattr__(self, "split", split)

    def __len__(self):
        return self.inputs.shape[0]

    def indices(self, split: str) -> np.ndarray:
        if split not in SPLIT_ORDER:
            raise ValueError(f"unknown split {split!r}")
        return np.flatnonzero(self.split == split)

    def counts(self) -> dict[str, int]:
        return {name: int(np.sum(self.split == name)) for name in SPLIT_ORDER}


def make_windows(series: TimeSeries, input_len: int, horizon: int,
                 split_fractions=(0.6, 0.2, 0.2)) -> WindowedDataset:
    """Cut a series into stride-1 supervised samples and tag splits.

    Produces len - input_len - horizon + 1 samples, assigned to the
    train/val/test splits chronologically by sample start index using
    floor(fraction * n_samples) for train and val; test takes the rest.
    """
    if input_len < 1 or horizon < 1:
        raise ValueError("input_len and horizon must be positive")
    fr = tuple(float(f) for f in split_fractions)
    if len(fr) != 3 or any(f < 0 for f in fr) or abs(sum(fr) - 1.0) > 1e-9:
        raise ValueError(f"split fractions must be three nonnegatives summing to 1, got {fr}")
    n = len(series)
    if n < input_len + horizon:
        raise ValueError(
            f"series of length {n} too short for input_len={input_len}, horizon={horizon}"
        )
    n_samples = n - input_len - horizon + 1
    values = series.values
    windows = np.lib.stride_tricks.sliding_window_view(values, input_len + horizon)
    inputs = windows[:, :input_len].copy()
    targets = windows[:, input_len:].copy()
    anchors = inputs[:, -1].copy()
    n_train = math.floor(fr[0] * n_samples)
    n_val = math.floor(fr[1] * n_samples)
    split = np.array(
        ["train"] * n_train + ["val"] * n_val + ["test"] * (n_samples - n_train - n_val),
        dtype="U5",
    )
    return WindowedDataset(inputs=inputs, targets=targets, anchors=anchors,
                           split=split, input_len=input_len, horizon=horizon)


def load_csv(path, column=0) -> TimeSeries:
    """Read one numeric column from a CSV file into a TimeSeries.

    column may be a header name or a 0-based index.  For an index, the
    first row is treated as a header only when its selected cell does
    not parse as a number.  Unparseable cells in the body raise with
    their 1-based physical line number.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    with open(path, newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1) if row]
    if not rows:
        raise ValueError(f"{path}: file is empty")

    first_line, first_row = rows[0]
    if isinstance(column, str) and not column.lstrip("-").isdigit():
        stripped = [cell.strip() for cell in first_row]
        if column not in stripped:
            raise ValueError(f"{path}: no column named {column!r} in header {stripped}")
        col_idx = stripped.index(column)
        body = rows[1:]
    else:
        col_idx = int(column)
        if col_idx < 0 or col_idx >= len(first_row):
            raise ValueError(f"{path}: column index {col_idx} out of range")
        try:
            float(first_row[col_idx])
            body = rows
        except ValueError:
            body = rows[1:]

    values = []
    for lineno, row in body:
        if col_idx >= len(row):
            raise ValueError(f"{path}: row {lineno} has no column {col_idx}")
        cell = row[col_idx].strip()
        try:
            values.append(float(cell))
        except ValueError:
            raise ValueError(f"{path}: non-numeric cell {cell!r} at row {lineno}") from None
    if len(values) < 2:
        raise ValueError(f"{path}: need at least 2 numeric rows, got {len(values)}")
    return TimeSeries(np.array(values), name=path.stem)
