"""Global network configuration: defaults, validation, file round-trip and env overrides."""
from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

import yaml

ENV_PREFIX = "WSNRL_"


class ConfigError(ValueError):
    """Raised for invalid or inconsistent configuration."""


@dataclass(frozen=True)
class NetworkConfig:
    # topology
    node_count: int = 16
    span_length: float = 484.0          # m, 344 m main span + 2 x 70 m side spans
    deck_width: float = 12.0            # m, only used for the field-grid mapping
    grid_rows: int = 4
    grid_cols: int = 30
    gateway_index: int = 0
    coordinate_file: str | None = None
    strict_cases: bool = False
    # time
    delta_t: float = 3.0                # h
    steps_per_episode: int = 240
    eval_steps: int = 2880
    # battery / consumption (mWh, mW)
    battery_capacity: float = 11100.0   # 3000 mAh x 3.7 V
    power_active: float = 425.5
    power_idle: float = 170.2
    power_sleep: float = 0.4
    active_count_threshold: float = 825.5
    min_reserve: float = 400.0
    # reward
    alpha1: float = 6.0
    alpha2: float = 0.05
    degradation_in_state: bool = True
    degradation_in_reward: bool = True
    gateway_participates: bool = False
    # links
    r0: float = 1000.0
    beta: float = 1.0
    eta: float = 1.0
    # random field
    sigma: float = 0.01
    l0: float = 5.0
    # degradation model
    deg_A: float = 3351.0
    deg_B: float = -1.689
    # solar source
    solar_csv: str | None = None
    solar_days: int = 5 * 365
    panel_watts: float = 3.0
    latitude_factor: float = 1.0
    cloud_seed: int = 2013

    def __post_init__(self):
        validate(self)

    @property
    def leaf_indices(self) -> list[int]:
        return [i for i in range(self.node_count) if i != self.gateway_index]

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def validate(cfg: NetworkConfig) -> None:
    if cfg.node_count < 2:
        raise ConfigError("node_count must be >= 2 (gateway plus at least one leaf)")
    if not 0 <= cfg.gateway_index < cfg.node_count:
        raise ConfigError(f"gateway_index {cfg.gateway_index} outside 0..{cfg.node_count - 1}")
    if not cfg.battery_capacity > cfg.active_count_threshold > cfg.min_reserve > 0:
        raise ConfigError("need battery_capacity > active_count_threshold > min_reserve > 0")
    if not cfg.power_active > cfg.power_idle > cfg.power_sleep > 0:
        raise ConfigError("need power_active > power_idle > power_sleep > 0")
    if cfg.delta_t <= 0 or cfg.steps_per_episode < 1 or cfg.eval_steps < 1:
        raise ConfigError("delta_t, steps_per_episode and eval_steps must be positive")
    if cfg.grid_rows < 1 or cfg.grid_cols < 1:
        raise ConfigError("grid shape must be positive")
    if cfg.sigma < 0 or cfg.l0 <= 0:
        raise ConfigError("need sigma >= 0 and l0 > 0")
    if not 0 <= cfg.beta <= 1 or cfg.r0 <= 0 or cfg.eta <= 0:
        raise ConfigError("need beta in [0, 1], r0 > 0, eta > 0")
    if cfg.deg_A <= 0:
        raise ConfigError("deg_A must be positive")
    if cfg.span_length <= 0 or cfg.deck_width <= 0:
        raise ConfigError("span_length and deck_width must be positive")


def _coerce(name: str, raw: Any, annotation: str) -> Any:
    if raw is None:
        return None
    if isinstance(raw, str):
        text = raw.strip()
        if "None" in annotation and text.lower() in ("", "none", "null"):
            return None
        if annotation.startswith("bool"):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ConfigError(f"{name}: cannot parse boolean from {raw!r}")
        if annotation.startswith("int"):
            return int(text)
        if annotation.startswith("float"):
            return float(text)
        return text
    if annotation.startswith("float") and isinstance(raw, int) and not isinstance(raw, bool):
        return float(raw)
    return raw


def from_mapping(data: Mapping[str, Any], base: NetworkConfig | None = None) -> NetworkConfig:
    known = {f.name: f for f in fields(NetworkConfig)}
    unknown = set(data) - set(known)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    values = {k: _coerce(k, v, str(known[k].type)) for k, v in data.items()}
    return dataclasses.replace(base or NetworkConfig(), **values)


def env_overrides(environ: Mapping[str, str] | None = None) -> dict[str, str]:
    """Collect ``WSNRL_<KEY>`` variables, keyed by lower-case config field name."""
    environ = os.environ if environ is None else environ
    names = {f.name.lower(): f.name for f in fields(NetworkConfig)}
    out = {}
    for key, value in environ.items():
        if key.startswith(ENV_PREFIX):
            name = names.get(key[len(ENV_PREFIX):].lower())
            if name is not None:
                out[name] = value
    return out


def load_config(path: str | Path | None = None, environ: Mapping[str, str] | None = None,
                **overrides) -> NetworkConfig:
    """Defaults <- config file <- WSNRL_* environment <- keyword overrides."""
    cfg = NetworkConfig()
    if path is not None:
        text = Path(path).read_text()
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a mapping of config keys")
        cfg = from_mapping(data, cfg)
    cfg = from_mapping(env_overrides(environ), cfg)
    if overrides:
        cfg = from_mapping(overrides, cfg)
    return cfg


def dump_config(cfg: NetworkConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)


def save_config(cfg: NetworkConfig, path: str | Path) -> None:
    Path(path).write_text(dump_config(cfg))
