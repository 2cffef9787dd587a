#!/usr/bin/env python3
"""
dynmsf - Configuration
======================

Copyright (c) 2026 dynmsf developers.

Settings are layered: the packaged default_config.yaml, then an optional user
file (argument or DYNMSF_CONFIG), then environment overrides. A .env file in
the working directory is honoured through python-dotenv.
"""

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

from .exceptions import InputError

DEFAULT_CONFIG_PATH = Path(__file__).parent / "config" / "default_config.yaml"

ENV_CONFIG = "DYNMSF_CONFIG"
ENV_ASSERT_LEVEL = "DYNMSF_ASSERT_LEVEL"
ENV_LOG_LEVEL = "DYNMSF_LOG_LEVEL"


class OracleSettings(BaseModel):
    bruteforce_cap: int = Field(20, ge=2)
    lbs_cap: int = Field(14, ge=2)
    exact_prune_cap: int = Field(16, ge=0)
    property8_cap: int = Field(16, ge=0)


class EngineSettings(BaseModel):
    base_threshold: int = Field(128, ge=1)
    max_depth: int = Field(8, ge=0)
    c_b: int = Field(1, ge=1)
    min_budget: int = Field(8, ge=1)
    c_h: int = Field(4, ge=1)
    auto_restart: bool = True
    alpha0_override: Optional[str] = None
    gamma_override: Optional[int] = Field(None, ge=2)

    @field_validator("alpha0_override", mode="before")
    @classmethod
    def _exact_ratio(cls, value: Any) -> Optional[str]:
        if value is None:
            return None
        ratio = Fraction(str(value))
        if not 0 < ratio <= 1:
            raise ValueError("alpha0_override must lie in (0, 1]")
        return str(ratio)

    def alpha0(self) -> Optional[Fraction]:
        return None if self.alpha0_override is None else Fraction(self.alpha0_override)


class FewNonTreeSettings(BaseModel):
    failure_p: float = Field(0.01, gt=0, lt=1)
    c0: int = Field(8, ge=1)


class PruningSettings(BaseModel):
    time_limit_factor: int = Field(64, ge=1)


class HarnessSettings(BaseModel):
    batch_size: int = Field(16, ge=1)
    default_model: str = "random-3-regular"


class LoggingSettings(BaseModel):
    level: str = "INFO"
    json_output: bool = Field(False, alias="json")

    model_config = {"populate_by_name": True}


class AssertionSettings(BaseModel):
    level: int = Field(1, ge=0, le=2)


class DynMsfSettings(BaseModel):
    """Complete configuration tree"""

    version: str = "1.0.0"
    oracle: OracleSettings = Field(default_factory=OracleSettings)
    engine: EngineSettings = Field(default_factory=EngineSettings)
    few_nontree: FewNonTreeSettings = Field(default_factory=FewNonTreeSettings)
    pruning: PruningSettings = Field(default_factory=PruningSettings)
    harness: HarnessSettings = Field(default_factory=HarnessSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)
    assertions: AssertionSettings = Field(default_factory=AssertionSettings)


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def _read_yaml(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
    except FileNotFoundError:
        raise InputError(f"config file '{path}' not found")
    if not isinstance(data, dict):
        raise InputError(f"config file '{path}' must hold a mapping")
    return data


def load_settings(path: Optional[Union[str, Path]] = None) -> DynMsfSettings:
    """
    Load settings from yaml and environment

    Args:
        path: Optional user config file merged over the packaged defaults
    """
    load_dotenv(override=False)
    data = _read_yaml(DEFAULT_CONFIG_PATH)

    user_path = path if path is not None else os.environ.get(ENV_CONFIG)
    if user_path:
        data = _deep_merge(data, _read_yaml(Path(user_path)))

    assert_level = os.environ.get(ENV_ASSERT_LEVEL)
    if assert_level:
        data = _deep_merge(data, {"assertions": {"level": int(assert_level)}})
    log_level = os.environ.get(ENV_LOG_LEVEL)
    if log_level:
        data = _deep_merge(data, {"logging": {"level": log_level}})

    return DynMsfSettings.model_validate(data)


_settings: Optional[DynMsfSettings] = None


def get_settings() -> DynMsfSettings:
    """Process-wide settings, loaded on first use"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings(settings: Optional[DynMsfSettings] = None) -> None:
    """Replace or clear the cached settings"""
    global _settings
    _settings = settings


def assert_level() -> int:
    return get_settings().assertions.level
