"""Run configuration: JSON files merged with command-line flags.

A config file is a flat JSON object. Its keys are the trainer
hyperparameters of the command (the fields of ``SkipgramConfig``,
``BicvmConfig`` or ``NMTConfig``) plus the command's data keys listed in
``DATA_KEYS``. An optional ``"command"`` key must name the command it is
used with. Unknown keys are errors.

Precedence is flags > config file > built-in defaults. Each training run
writes the fully resolved config next to its output as
``<out>.config.json``; feeding that file back with ``--config`` repeats the
run exactly.
"""
from __future__ import annotations

import dataclasses
import json
from pathlib import Path

from .bicvm import BicvmConfig
from .nmt import NMTConfig
from .skipgram import SkipgramConfig


class ConfigError(ValueError):
    pass


TRAINERS = {
    "train-skipgram": SkipgramConfig,
    "train-bicvm": BicvmConfig,
    "train-nmt": NMTConfig,
    "curve": SkipgramConfig,
}

_BITEXT = {"source": str, "target": str, "out": str, "source_vocab_size": int,
           "target_vocab_size": int, "min_count": int}

DATA_KEYS = {
    "train-skipgram": {"corpus": str, "out": str, "vocab_size": int, "min_count": int},
    "train-bicvm": dict(_BITEXT),
    "train-nmt": dict(_BITEXT, export_source=str, export_target=str),
    "curve": {"corpus": str, "out": str, "vocab_size": int, "min_count": int,
              "fractions": list, "datasets": list, "jobs": int},
}

DATA_DEFAULTS = {"vocab_size": 50_000, "source_vocab_size": 30_000,
                 "target_vocab_size": 30_000, "min_count": 1, "jobs": 1}


def _field_types(cls) -> dict:
    out = {}
    for f in dataclasses.fields(cls):
        default = f.default
        if isinstance(default, bool):
            out[f.name] = bool
        elif isinstance(default, float) or f.name == "clip":
            out[f.name] = float
        else:
            out[f.name] = type(default)
    return out


def _coerce(command: str, key: str, value, want: type):
    if value is None and key in ("clip", "export_source", "export_target", "out"):
        return None
    if want is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if want is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if want in (str, list, bool) and isinstance(value, want):
        return value
    raise ConfigError(f"{command}: key {key!r} must be {want.__name__}, got {value!r}")


def schema(command: str) -> dict:
    if command not in TRAINERS:
        raise ConfigError(f"no config schema for command {command!r}")
    return {**_field_types(TRAINERS[command]), **DATA_KEYS[command]}


def load_config_file(path) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}: invalid JSON ({e})") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{p}: config must be a JSON object")
    return data


def resolve(command: str, file_values: dict | None = None, flags: dict | None = None):
    """Merge defaults, file values and non-None flags; returns (trainer config, data dict)."""
    types = schema(command)
    merged: dict = {}
    for source in (file_values or {}), {k: v for k, v in (flags or {}).items() if v is not None}:
        for key, value in source.items():
            if key == "command":
                if value != command:
                    raise ConfigError(f"config is for {value!r}, not {command!r}")
                continue
            if key not in types:
                raise ConfigError(f"{command}: unknown config key {key!r}")
            merged[key] = _coerce(command, key, value, types[key])
    trainer_keys = {f.name for f in dataclasses.fields(TRAINERS[command])}
    trainer = TRAINERS[command](**{k: v for k, v in merged.items() if k in trainer_keys})
    try:
        trainer.validate()
    except ValueError as e:
        raise ConfigError(f"{command}: {e}") from None
    data = {k: DATA_DEFAULTS[k] for k in DATA_KEYS[command] if k in DATA_DEFAULTS}
    data.update({k: v for k, v in merged.items() if k not in trainer_keys})
    return trainer, data


def resolved_dict(command: str, trainer, data: dict) -> dict:
    return {"command": command, **dataclasses.asdict(trainer), **data}


def write_resolved(path, command: str, trainer, data: dict) -> Path:
    out = Path(str(path) + ".config.json")
    out.write_text(json.dumps(resolved_dict(command, trainer, data), indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    return out
