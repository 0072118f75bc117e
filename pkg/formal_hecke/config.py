#!/usr/bin/env python3
"""
Runtime settings for formal_hecke
Values come from the environment, optionally seeded from a .env file
"""

import os
import logging
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError, field_validator

from .errors import ConfigurationError

logger = logging.getLogger(__name__)

_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Environment-driven settings"""

    log_level: str = "INFO"
    workers: int = 1
    cache_size: int = 256
    lattice_cache_size: int = 20000
    debug: bool = False

    @field_validator("log_level")
    @classmethod
    def _check_level(cls, value: str) -> str:
        value = value.upper()
        if value not in _LEVELS:
            raise ValueError(f"log level must be one of {', '.join(_LEVELS)}")
        return value

    @field_validator("workers", "cache_size", "lattice_cache_size")
    @classmethod
    def _check_positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError("must be at least 1")
        return value


_settings: Optional[Settings] = None


def load_settings(env_file: Optional[str] = None) -> Settings:
    """Build settings from the environment (and an optional .env file)"""
    load_dotenv(env_file, override=False)
    raw = {
        "log_level": os.getenv("FORMAL_HECKE_LOG_LEVEL", "INFO"),
        "workers": os.getenv("FORMAL_HECKE_WORKERS", "1"),
        "cache_size": os.getenv("FORMAL_HECKE_CACHE_SIZE", "256"),
        "lattice_cache_size": os.getenv("FORMAL_HECKE_LATTICE_CACHE_SIZE", "20000"),
        "debug": os.getenv("FORMAL_HECKE_DEBUG", "False").lower() == "true",
    }
    try:
        settings = Settings(**raw)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}", {"raw": raw})
    logger.debug(f"Loaded settings: {settings.model_dump()}")
    return settings


def get_settings() -> Settings:
    """Process-wide settings, loaded on first use"""
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None
