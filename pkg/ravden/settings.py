"""
Run configuration: one validated model built from defaults, the RAVDEN_* environment,
an optional config file and command-line flags, in increasing order of precedence.
"""

import copy
import logging
import os
from typing import Any, Dict, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ravden.camera.isp import IspParams
from ravden.camera.noise import ISO_PRESETS, NoiseParams
from ravden.errors import ConfigError
from ravden.multistage.schedule import DenoiseConfig
from ravden.utils.utils import UtilityHelper

logger = logging.getLogger(__name__)

ENV_THREADS = "RAVDEN_THREADS"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class TrackingConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    enabled: bool = False
    tracking_uri: str = "mlruns"
    experiment_name: str = "ravden"


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    threads: int = Field(default=1, ge=1)
    log_level: str = "INFO"
    seed: int = 0
    iso: Optional[str] = None
    srgb_bit_depth: int = 16
    denoise: DenoiseConfig = Field(default_factory=DenoiseConfig)
    isp: IspParams = Field(default_factory=IspParams)
    iso_presets: Dict[str, NoiseParams] = Field(default_factory=dict)
    mlops: TrackingConfig = Field(default_factory=TrackingConfig)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, level):
        level = str(level).upper()
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {LOG_LEVELS}, got {level}")
        return level

    @field_validator("srgb_bit_depth")
    @classmethod
    def _bit_depth(cls, depth):
        if depth not in (8, 16):
            raise ValueError(f"srgb_bit_depth must be 8 or 16, got {depth}")
        return depth

    @field_validator("iso_presets")
    @classmethod
    def _known_presets(cls, presets):
        unknown = sorted(set(presets) - set(ISO_PRESETS))
        if unknown:
            raise ValueError(f"Unknown ISO presets {unknown}. Available: {list(ISO_PRESETS.keys())}")
        return presets


def _merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _environment() -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    threads = os.getenv(ENV_THREADS)
    if threads:
        try:
            values["threads"] = int(threads)
        except ValueError as e:
            raise ConfigError(f"{ENV_THREADS} must be an integer, got {threads!r}") from e
    return values


def load_run_config(
    config_path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """Build the effective RunConfig.

    overrides maps dotted keys (``denoise.stages``) to flag values; None values are
    flags the user did not pass and are skipped.
    """
    data = _environment()
    if config_path:
        data = _merge(data, UtilityHelper.load_config(config_path))
        logger.debug(f"Loaded config file {config_path}")

    flags: Dict[str, Any] = {}
    for key, value in (overrides or {}).items():
        if value is not None:
            UtilityHelper.set_dotted(flags, key, value)
    data = _merge(data, flags)

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}") from e
