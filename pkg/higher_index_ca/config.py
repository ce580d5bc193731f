"""Run configuration: GA settings from YAML, output locations, run manifests."""

from __future__ import annotations

import dataclasses
import json
import os
from collections.abc import Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import yaml

from higher_index_ca import __version__
from higher_index_ca.core import CAParams
from higher_index_ca.errors import ConfigError
from higher_index_ca.evolve import GAConfig

OUTPUT_DIR_ENV = "HICA_OUTPUT_DIR"


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or "results")


def ga_config_from_mapping(values: Mapping[str, Any]) -> GAConfig:
    known = {f.name for f in dataclasses.fields(GAConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown GA setting(s): {', '.join(unknown)}")
    settings = dict(values)
    if "record_generations" in settings:
        try:
            settings["record_generations"] = tuple(int(g) for g in settings["record_generations"])
        except (TypeError, ValueError):
            raise ConfigError("record_generations must be a list of integers") from None
    try:
        return GAConfig(**settings)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def ga_config_as_mapping(config: GAConfig) -> dict[str, Any]:
    """Plain values that ``ga_config_from_mapping`` turns back into ``config``."""
    values = dataclasses.asdict(config)
    values["time_mode"] = config.time_mode.value
    values["record_generations"] = list(config.record_generations)
    return values


def load_ga_config(path: Path | str | None, **overrides: Any) -> GAConfig:
    """Read a YAML mapping of GAConfig fields; non-None ``overrides`` win."""
    values: dict[str, Any] = {}
    if path is not None:
        try:
            loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read GA config {path}: {exc}") from exc
        if loaded is not None and not isinstance(loaded, dict):
            raise ConfigError(f"GA config {path} must be a mapping, got {type(loaded).__name__}")
        values.update(loaded or {})
    values.update({key: value for key, value in overrides.items() if value is not None})
    return ga_config_from_mapping(values)


@dataclass
class RunManifest:
    """What produced a set of output files."""

    command: str
    params: CAParams | None = None
    seed: int | None = None
    time_mode: str | None = None
    version: str = __version__
    started: str = field(
        default_factory=lambda: datetime.now(timezone.utc).isoformat(timespec="seconds")
    )
    outputs: list[str] = field(default_factory=list)
    extra: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        params = None
        if self.params is not None:
            params = {"t": self.params.t, "k": self.params.k, "v": self.params.v,
                      "lambda": self.params.lam}
        return {
            "command": self.command,
            "params": params,
            "seed": self.seed,
            "time_mode": self.time_mode,
            "version": self.version,
            "started": self.started,
            "outputs": self.outputs,
            **self.extra,
        }

    def write_beside(self, primary: Path) -> Path:
        """Write ``<stem>.manifest.json`` next to ``primary``."""
        path = primary.with_name(f"{primary.stem}.manifest.json")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.as_dict(), indent=2) + "\n", encoding="utf-8")
        return path
