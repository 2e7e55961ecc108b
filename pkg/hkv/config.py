# config.py
# =============================================================================
# 运行配置: 一次运行的全部输入，可序列化、可重放。
# / Run configuration: every input of one run, serializable and replayable.
#
# 来源优先级 / Source precedence:
#   YAML 文件 (from_yaml) > 环境变量 (from_env) > 默认值
#   / YAML document (from_yaml) > environment (from_env) > defaults
# =============================================================================

from __future__ import annotations

import logging
import os
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from hkv.errors import ConfigInvalid

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0x5EED


class Command(str, Enum):
    KL = "kl"
    VERIFY = "verify"
    KERNEL = "kernel"
    LDATA = "ldata"
    SERIES = "series"
    AVERAGE = "average"
    VORONOI = "voronoi"
    BENCH = "bench"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


class ToleranceSettings(BaseModel):
    """各类检查的通过容差。 / Pass tolerances per check family."""

    model_config = ConfigDict(extra="forbid")

    identity: float = Field(default=1e-8, gt=0)
    kloosterman: float = Field(default=1e-9, gt=0)
    salie: float = Field(default=1e-8, gt=0)
    series: float = Field(default=1e-6, gt=0)
    voronoi: float = Field(default=1e-6, gt=0)
    moment: float = Field(default=1e-5, gt=0)
    kernel: float = Field(default=1e-10, gt=0)


class QuadratureSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sigma: Optional[float] = None
    T: Optional[float] = Field(default=None, gt=0)
    h: float = Field(default=0.05, gt=0)
    tail_tol: float = Field(default=1e-12, gt=0)
    kernel_width: float = Field(default=0.1, gt=0)  # k(s) = exp(λ s²) 中的 λ
    abscissa: str = Field(default="saddle", pattern="^(saddle|fixed)$")


class TruncationSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    series_M: int = Field(default=1_000_000, ge=1)
    tail_target: float = Field(default=1e-9, gt=0)
    max_terms: int = Field(default=2_000_000, ge=1)


class RunConfig(BaseModel):
    """一次运行。params 的键由 runner 按命令校验。
    / One run; the keys of params are validated per command by the runner.
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    command: Command
    params: Dict[str, Any] = Field(default_factory=dict)
    tolerances: ToleranceSettings = Field(default_factory=ToleranceSettings)
    quadrature: QuadratureSettings = Field(default_factory=QuadratureSettings)
    truncations: TruncationSettings = Field(default_factory=TruncationSettings)
    seed: int = DEFAULT_SEED
    output_format: OutputFormat = OutputFormat.JSON
    cache_dir: Optional[str] = None
    output_dir: Optional[str] = None

    @classmethod
    def from_env(cls, command: Command | str, params: Optional[Mapping[str, Any]] = None, **overrides: Any) -> "RunConfig":
        """读取 HKV_CACHE_DIR、HKV_OUTPUT_DIR、HKV_SEED。 / Fill directories and seed from the environment."""
        seed_text = os.getenv("HKV_SEED", "").strip()
        try:
            seed = int(seed_text, 0) if seed_text else DEFAULT_SEED
        except ValueError as exc:
            raise ConfigInvalid(f"HKV_SEED must be an integer, got {seed_text!r}") from exc
        values: Dict[str, Any] = {
            "command": command,
            "params": dict(params or {}),
            "seed": seed,
            "cache_dir": os.getenv("HKV_CACHE_DIR") or None,
            "output_dir": os.getenv("HKV_OUTPUT_DIR") or None,
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls.validated(values)

    @classmethod
    def validated(cls, values: Mapping[str, Any]) -> "RunConfig":
        try:
            return cls.model_validate(dict(values))
        except ValidationError as exc:
            raise ConfigInvalid(
                f"invalid run config: {exc.error_count()} error(s)",
                extra={"errors": [_error_text(err) for err in exc.errors()]},
            ) from exc

    @classmethod
    def from_yaml(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.is_file():
            raise ConfigInvalid(f"config file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigInvalid(f"config file {path} is not valid YAML: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigInvalid(f"config file {path} must hold a mapping, got {type(raw).__name__}")
        logger.info("run config loaded from %s", path)
        return cls.validated(raw)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True, allow_unicode=True)


def _error_text(err: Mapping[str, Any]) -> str:
    location = ".".join(str(part) for part in err.get("loc", ())) or "<root>"
    return f"{location}: {err.get('msg', '')}"


__all__ = [
    "Command",
    "DEFAULT_SEED",
    "OutputFormat",
    "QuadratureSettings",
    "RunConfig",
    "ToleranceSettings",
    "TruncationSettings",
]
