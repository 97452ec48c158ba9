"""Scenario configuration: one nested dataclass mirroring the YAML file layout.

Every default reproduces the nominal scenario (0.2 m/s walk on slippery
ground, 2 kHz step rate, 10 s horizon); a config file only needs to name the
values it overrides. Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .attitude import AttitudeGains
from .contact import GroundParams
from .dynamics import ModelParams
from .gait import GaitSchedule, JointGains
from .governor import ErgParams, FrictionConstraint


class ConfigError(ValueError):
    """Bad scenario file or invalid parameter combination."""


@dataclass
class ObserverConfig:
    gain: float = 1000.0            # diagonal of K_O [1/s]
    velocity_noise_std: float = 0.0  # optional additive noise on observer inputs

    def validate(self) -> None:
        if self.gain <= 0.0:
            raise ConfigError("observer gain must be positive")
        if self.velocity_noise_std < 0.0:
            raise ConfigError("velocity noise must be nonnegative")


@dataclass
class GaitConfig:
    schedule: GaitSchedule = field(default_factory=GaitSchedule)
    joint_gains: JointGains = field(default_factory=JointGains)
    standing_leg_length: float = 0.3
    velocity_gain: float = 0.03     # touchdown correction per unit velocity error [s]

    def validate(self, model: ModelParams) -> None:
        self.schedule.validate()
        if not model.leg_length_min <= self.standing_leg_length <= model.leg_length_max:
            raise ConfigError("standing leg length outside leg limits")
        if self.joint_gains.kp < 0.0 or self.joint_gains.kd < 0.0:
            raise ConfigError("joint gains must be nonnegative")


@dataclass
class SimConfig:
    dt: float = 5e-4
    duration: float = 10.0
    desired_velocity: np.ndarray = field(default_factory=lambda: np.array([0.2, 0.0, 0.0]))
    euler_reference: np.ndarray = field(default_factory=lambda: np.zeros(3))
    decimate: int = 10
    seed: int = 0
    output: str = "thrustwalk_log.csv"
    model: ModelParams = field(default_factory=ModelParams)
    ground: GroundParams = field(default_factory=GroundParams)
    gait: GaitConfig = field(default_factory=GaitConfig)
    attitude: AttitudeGains = field(default_factory=AttitudeGains)
    erg: ErgParams = field(default_factory=ErgParams)
    constraint: FrictionConstraint | None = None
    observer: ObserverConfig = field(default_factory=ObserverConfig)

    def __post_init__(self) -> None:
        if self.constraint is None:
            # the governor constrains with the surface's static coefficient
            self.constraint = FrictionConstraint(mu=self.ground.mu_static)

    def validate(self) -> None:
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.duration <= 0.0:
            raise ConfigError("duration must be positive")
        if self.decimate < 1:
            raise ConfigError("decimate must be >= 1")
        try:
            self.model.validate()
            self.ground.validate()
            self.attitude.validate()
            self.constraint.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        self.gait.validate(self.model)
        self.observer.validate()

    def to_dict(self) -> dict:
        return _as_plain(self)

    def config_hash(self) -> str:
        """Stable digest of the effective configuration (backs log metadata).

        The output path is excluded: it does not influence the data.
        """
        plain = self.to_dict()
        plain.pop("output", None)
        canon = json.dumps(plain, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _as_plain(obj: Any) -> Any:
    if is_dataclass(obj):
        return {f.name: _as_plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _apply_overrides(obj: Any, data: dict, path: str = "") -> None:
    valid = {f.name: f for f in fields(obj)}
    for key, value in data.items():
        where = f"{path}.{key}" if path else key
        if key not in valid:
            raise ConfigError(f"unknown config key: {where}")
        current = getattr(obj, key)
        if is_dataclass(current) and isinstance(value, dict):
            _apply_overrides(current, value, where)
        elif isinstance(current, np.ndarray):
            arr = np.asarray(value, dtype=float)
            if arr.shape != current.shape:
                raise ConfigError(f"{where}: expected shape {current.shape}, got {arr.shape}")
            setattr(obj, key, arr)
        elif isinstance(value, dict):
            raise ConfigError(f"{where}: scalar field given a mapping")
        else:
            setattr(obj, key, type(current)(value) if current is not None else value)


def load_config(path: str | Path | None) -> SimConfig:
    """Build a SimConfig from a YAML file of overrides (None = all defaults)."""
    cfg = SimConfig()
    if path is not None:
        try:
            raw = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data = yaml.safe_load(raw)
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
        explicit_constraint = data.pop("constraint", None)
        _apply_overrides(cfg, data)
        if explicit_constraint is not None:
            cfg.constraint = FrictionConstraint()
            _apply_overrides(cfg.constraint, explicit_constraint, "constraint")
        else:
            # keep the governor's friction knowledge in sync with the surface
            cfg.constraint = FrictionConstraint(
                mu=cfg.ground.mu_static, min_normal=cfg.constraint.min_normal
            )
    cfg.validate()
    return cfg


def dump_config(cfg: SimConfig) -> str:
    """Effective configuration as YAML (what `validate` prints)."""
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
