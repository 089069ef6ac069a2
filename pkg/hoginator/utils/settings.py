from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from ..core.cycle_model import CyclePlan, OverlapMode
from ..core.gradient_field import Backend
from ..errors import ConfigError
from .image_ops import CropMode

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS_PATH = Path(__file__).resolve().parents[2] / "settings.json"

COMMANDS = ("extract", "train", "detect", "eval", "cycles", "bench", "synth")

# short CLI spellings
_CROP_ALIASES = {"center": CropMode.CENTER_CROP.value}
_OVERLAP_ALIASES = {"overlapped": OverlapMode.CELL_NORM_OVERLAPPED.value}
# JSON keys that differ from field names
_KEY_ALIASES = {"lambda": "lam"}


@dataclass
class RunConfig:
    command: str = ""
    backend: Optional[str] = None
    eps: float = 0.01
    crop_mode: str = CropMode.EXACT.value
    model_path: Optional[str] = None
    manifest_path: Optional[str] = None
    output_path: Optional[str] = None
    images: list[str] = field(default_factory=list)
    lam: float = 0.01
    epochs: int = 20
    seed: int = 0
    clock_hz: float = 50_000_000
    overlap_mode: str = OverlapMode.SEQUENTIAL.value
    cycles_per_mac: int = 1
    svm_pipeline_fill: int = 0
    workers: int = 1
    count: int = 20
    report_format: str = "table"
    verbose: bool = False

    def __post_init__(self):
        self.crop_mode = _CROP_ALIASES.get(self.crop_mode, self.crop_mode)
        self.overlap_mode = _OVERLAP_ALIASES.get(self.overlap_mode, self.overlap_mode)

    @property
    def resolved_backend(self) -> Backend:
        """Training extracts with the reference backend, everything else with the hardware one."""
        if self.backend:
            return Backend(self.backend)
        return Backend.REFERENCE if self.command == "train" else Backend.HARDWARE

    @property
    def cycle_plan(self) -> CyclePlan:
        return CyclePlan(
            cycles_per_mac=self.cycles_per_mac,
            svm_pipeline_fill=self.svm_pipeline_fill,
            clock_hz=self.clock_hz,
            overlap_mode=OverlapMode(self.overlap_mode),
        )

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        try:
            CropMode(self.crop_mode)
            OverlapMode(self.overlap_mode)
            if self.backend:
                Backend(self.backend)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if self.eps < 0:
            raise ConfigError(f"eps must be >= 0, got {self.eps}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")

        missing = []
        if self.command in ("detect", "eval") and not self.model_path:
            missing.append("--model")
        if self.command in ("train", "eval") and not self.manifest_path:
            missing.append("--manifest")
        if self.command in ("train", "synth") and not self.output_path:
            missing.append("--out")
        if self.command in ("extract", "detect") and not (self.manifest_path or self.images):
            missing.append("--manifest or an image path")
        if missing:
            raise ConfigError(f"{self.command} needs {', '.join(missing)}")
        return self


def load_settings(path: str | Path | None = None) -> dict[str, Any]:
    """Read JSON defaults; a missing default file means built-in defaults."""
    p = Path(path) if path else DEFAULT_SETTINGS_PATH
    if not p.exists():
        if path:
            raise ConfigError(f"settings file not found: {p}")
        return {}
    try:
        raw = json.loads(p.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot load settings {p}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"settings {p} must hold a JSON object")

    known = {f.name for f in fields(RunConfig)}
    out = {}
    for key, value in raw.items():
        name = _KEY_ALIASES.get(key, key)
        if name not in known or name == "command":
            logger.warning("ignoring unknown setting %r in %s", key, p)
            continue
        out[name] = value
    return out


def build_config(command: str, settings: dict[str, Any], overrides: dict[str, Any]) -> RunConfig:
    """Defaults < settings file < command-line flags (None means not given)."""
    cfg = RunConfig(command=command, **settings)
    given = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **given).validate()
