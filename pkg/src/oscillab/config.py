"""Lab configuration: one YAML file describing the whole apparatus.

Defaults describe the reference LTB apparatus (0.2 deg
wedge, 5.5 mm travel, 633 nm).  Loading is strict: unknown keys are
rejected and every submodule validates its own invariants on construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Any

import yaml

from .beamline import BeamlineConfig, LaserSpec, laser_preset
from .daq import NoiseModel
from .rig import CrystalDoublet

__all__ = ["LabConfig", "ConfigError", "load_config", "default_config", "config_to_dict"]


class ConfigError(ValueError):
    """Invalid or unrecognized configuration content."""


@dataclass
class LabConfig:
    doublet: CrystalDoublet = field(default_factory=CrystalDoublet)
    beamline: BeamlineConfig = field(default_factory=BeamlineConfig)
    laser: LaserSpec = field(default_factory=lambda: laser_preset("hene"))
    laser_name: str = "hene"
    noise: NoiseModel = field(default_factory=NoiseModel)
    service_port: int = 8000
    quadrature_points: int = 101

    def __post_init__(self):
        if not 0 < self.service_port < 65536:
            raise ConfigError(f"service port out of range: {self.service_port}")
        if self.quadrature_points < 3 or self.quadrature_points % 2 == 0:
            raise ConfigError(
                f"quadrature_points must be odd and >= 3: {self.quadrature_points}"
            )


def default_config() -> LabConfig:
    return LabConfig()


def _build(cls, section: str, data: dict[str, Any]):
    valid = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
    unknown = set(data) - valid
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    try:
        return cls(**data)
    except ValueError as exc:
        raise ConfigError(f"invalid '{section}' section: {exc}") from exc


def _parse_laser(value: Any) -> tuple[LaserSpec, str]:
    if isinstance(value, str):
        try:
            return laser_preset(value), value
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
    if isinstance(value, dict):
        return _build(LaserSpec, "laser", value), "custom"
    raise ConfigError(f"laser must be a preset name or a mapping, got {type(value).__name__}")


def config_from_dict(data: dict[str, Any]) -> LabConfig:
    known = {"doublet", "beamline", "laser", "noise", "service", "quadrature_points"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    cfg = LabConfig()
    if "doublet" in data:
        cfg.doublet = _build(CrystalDoublet, "doublet", data["doublet"] or {})
    if "beamline" in data:
        cfg.beamline = _build(BeamlineConfig, "beamline", data["beamline"] or {})
    if "laser" in data:
        cfg.laser, cfg.laser_name = _parse_laser(data["laser"])
    if "noise" in data:
        cfg.noise = _build(NoiseModel, "noise", data["noise"] or {})
    if "service" in data:
        service = data["service"] or {}
        unknown = set(service) - {"port"}
        if unknown:
            raise ConfigError(f"unknown keys in 'service': {sorted(unknown)}")
        cfg.service_port = int(service.get("port", cfg.service_port))
    if "quadrature_points" in data:
        cfg.quadrature_points = int(data["quadrature_points"])
    return LabConfig(
        doublet=cfg.doublet,
        beamline=cfg.beamline,
        laser=cfg.laser,
        laser_name=cfg.laser_name,
        noise=cfg.noise,
        service_port=cfg.service_port,
        quadrature_points=cfg.quadrature_points,
    )


def load_config(path: str | Path) -> LabConfig:
    """Load and validate a YAML lab configuration."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed YAML in {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    return config_from_dict(data)


def config_to_dict(cfg: LabConfig) -> dict[str, Any]:
    """Round-trippable plain-dict form (used by the service state endpoint)."""
    return {
        "doublet": asdict(cfg.doublet),
        "beamline": asdict(cfg.beamline),
        "laser": asdict(cfg.laser),
        "laser_name": cfg.laser_name,
        "noise": asdict(cfg.noise),
        "service": {"port": cfg.service_port},
        "quadrature_points": cfg.quadrature_points,
    }
