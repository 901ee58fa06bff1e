"""Experiment configuration: strict JSON parsing and the data pipeline it describes."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .loss import LossSpec
from .models import ModelSpec
from .series import (NORMALIZER_KINDS, Normalizer, TimeSeries, WindowedDataset,
                     fit_normalizer, load_csv, make_windows)
from .synth import SynthSpec, generate
from .training import AdamConfig, TrainConfig


class ConfigError(ValueError):
    """A config file said something the experiment schema does not allow."""


def _require_keys(section: str, mapping: dict, allowed) -> None:
    for key in mapping:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in section {section!r}")


def _number(section: str, key: str, value, default=None, minimum=None):
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{key} must be >= {minimum}, got {value}")
    return float(value)


def _integer(section: str, key: str, value, default=None, minimum=None):
    if value is None:
        return default
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(f"{section}.{key} must be >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class CsvSource:
    """A CSV file plus the column to read."""

    path: str
    column: object = 0


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: data source, windowing, normalization, model, training.

    Parsed strictly from a JSON document -- unknown keys are rejected by
    name rather than silently ignored.
    """

    name: str
    source: object
    input_len: int
    horizon: int
    splits: tuple
    normalization: str
    model: ModelSpec
    train: TrainConfig
    out_dir: str = "runs"

    @classmethod
    def from_dict(cls, doc: dict, base_dir=None) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError(f"config document must be a JSON object, got {type(doc).__name__}")
        _require_keys("<top level>", doc,
                      ("name", "data", "windowing", "normalization", "model", "train",
                       "out_dir"))
        name = doc.get("name", "experiment")
        if not isinstance(name, str) or not name or "/" in name:
            raise ConfigError(f"name must be a nonempty string without '/', got {name!r}")
        out_dir = doc.get("out_dir", "runs")
        if not isinstance(out_dir, str) or not out_dir:
            raise ConfigError(f"out_dir must be a nonempty string, got {out_dir!r}")

        data = doc.get("data")
        if not isinstance(data, dict) or len(data) != 1 or next(iter(data)) not in ("synth", "csv"):
            raise ConfigError('data must be an object with exactly one of the keys "synth"/"csv"')
        source = cls._parse_source(data, base_dir)

        windowing = doc.get("windowing")
        if not isinstance(windowing, dict):
            raise ConfigError('config needs a "windowing" object')
        _require_keys("windowing", windowing, ("input_len", "horizon", "splits"))
        input_len = _integer("windowing", "input_len", windowing.get("input_len"), minimum=1)
        if input_len is None:
            raise ConfigError("windowing.input_len is required")
        horizon = _integer("windowing", "horizon", windowing.get("horizon"), default=1, minimum=1)
        splits = windowing.get("splits", [0.6, 0.2, 0.2])
        if (not isinstance(splits, (list, tuple)) or len(splits) != 3
                or any(isinstance(f, bool) or not isinstance(f, (int, float)) for f in splits)):
            raise ConfigError(f"windowing.splits must be three numbers, got {splits!r}")
        splits = tuple(float(f) for f in splits)

        normalization = doc.get("normalization", "zscore")
        if normalization not in NORMALIZER_KINDS:
            raise ConfigError(
                f"normalization must be one of {NORMALIZER_KINDS}, got {normalization!r}"
            )

        model = cls._parse_model(doc.get("model"), input_len, horizon)
        train = cls._parse_train(doc.get("train"), horizon)
        try:
            return cls(name=name, source=source, input_len=input_len, horizon=horizon,
                       splits=splits, normalization=normalization, model=model,
                       train=train, out_dir=out_dir)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @staticmethod
    def _parse_source(data: dict, base_dir):
        if "synth" in data:
            section = data["synth"]
            if not isinstance(section, dict):
                raise ConfigError("data.synth must be an object")
            _require_keys("data.synth", section,
                          ("n", "dt", "sigma", "mu", "trend_slope", "seed"))
            try:
                return SynthSpec(
                    n=_integer("data.synth", "n", section.get("n"), default=3000, minimum=2),
                    dt=_number("data.synth", "dt", section.get("dt"), default=0.1),
                    noise_sigma=_number("data.synth", "sigma", section.get("sigma"),
                                        default=0.5, minimum=0.0),
                    noise_mu=_number("data.synth", "mu", section.get("mu"), default=0.0),
                    trend_slope=_number("data.synth", "trend_slope",
                                        section.get("trend_slope"), default=0.0),
                    seed=_integer("data.synth", "seed", section.get("seed"), default=0),
                )
            except ValueError as exc:
                raise ConfigError(f"data.synth: {exc}") from None
        section = data["csv"]
        if not isinstance(section, dict):
            raise ConfigError("data.csv must be an object")
        _require_keys("data.csv", section, ("path", "column"))
        path = section.get("path")
        if not isinstance(path, str) or not path:
            raise ConfigError("data.csv.path must be a nonempty string")
        if base_dir is not None and not Path(path).is_absolute():
            path = str(Path(base_dir) / path)
        column = section.get("column", 0)
        if isinstance(column, bool) or not isinstance(column, (int, str)):
            raise ConfigError(f"data.csv.column must be a name or index, got {column!r}")
        return CsvSource(path=path, column=column)

    @staticmethod
    def _parse_model(section, input_len: int, horizon: int) -> ModelSpec:
        if not isinstance(section, dict):
            raise ConfigError('config needs a "model" object')
        _require_keys("model", section, ("kind", "hidden_dim", "window", "init_seed"))
        kind = section.get("kind")
        if not isinstance(kind, str):
            raise ConfigError('model.kind is required (avg_window/linear_ar/mlp/rnn)')
        try:
            return ModelSpec(
                kind=kind,
                input_len=input_len,
                horizon=horizon,
                hidden_dim=_integer("model", "hidden_dim", section.get("hidden_dim"),
                                    default=32, minimum=1),
                window=_integer("model", "window", section.get("window"), default=1, minimum=1),
                init_seed=_integer("model", "init_seed", section.get("init_seed"), default=0),
            )
        except ValueError as exc:
            raise ConfigError(f"model: {exc}") from None

    @staticmethod
    def _parse_train(section, horizon: int) -> TrainConfig:
        if section is None:
            section = {}
        if not isinstance(section, dict):
            raise ConfigError('"train" must be an object')
        _require_keys("train", section,
                      ("lambda", "K", "lr0", "decay_factor", "decay_every", "epochs",
                       "batch_size", "seed", "objective", "val_objective", "adam"))
        adam_section = section.get("adam", {})
        if not isinstance(adam_section, dict):
            raise ConfigError("train.adam must be an object")
        _require_keys("train.adam", adam_section, ("beta1", "beta2", "eps"))
        objective = section.get("objective", "regularized")
        val_objective = section.get("val_objective")
        try:
            loss = LossSpec(
                lam=_number("train", "lambda", section.get("lambda"), default=0.0, minimum=0.0),
                lags=_integer("train", "K", section.get("K"), default=1, minimum=1),
                horizon=horizon,
            )
            adam = AdamConfig(
                beta1=_number("train.adam", "beta1", adam_section.get("beta1"), default=0.9),
                beta2=_number("train.adam", "beta2", adam_section.get("beta2"), default=0.999),
                eps=_number("train.adam", "eps", adam_section.get("eps"), default=1e-8),
            )
            return TrainConfig(
                loss=loss,
                lr0=_number("train", "lr0", section.get("lr0"), default=1e-3),
                decay_factor=_number("train", "decay_factor", section.get("decay_factor"),
                                     default=0.1),
                decay_every=_integer("train", "decay_every", section.get("decay_every"),
                                     default=10, minimum=1),
                epochs=_integer("train", "epochs", section.get("epochs"), default=100,
                                minimum=1),
                batch_size=_integer("train", "batch_size", section.get("batch_size"),
                                    default=32, minimum=1),
                seed=_integer("train", "seed", section.get("seed"), default=0),
                adam=adam,
                objective=objective,
                val_objective=val_objective,
            )
        except ValueError as exc:
            raise ConfigError(f"train: {exc}") from None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path} is not valid JSON: {exc}") from None
        return cls.from_dict(doc, base_dir=path.parent)

    def load_series(self) -> TimeSeries:
        if isinstance(self.source, SynthSpec):
            return generate(self.source)
        return load_csv(self.source.path, self.source.column)

    def build(self):
        """Load, normalize and window the data: (series, normalizer, dataset)."""
        raw = self.load_series()
        normalizer = fit_normalizer(raw, train_fraction=self.splits[0],
                                    kind=self.normalization)
        series = normalizer.apply(raw)
        dataset = make_windows(series, self.input_len, self.horizon, self.splits)
        return series, normalizer, dataset
