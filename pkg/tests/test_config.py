#!/usr/bin/env python3
"""Tests for environment-driven settings"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from formal_hecke.config import Settings, get_settings, load_settings, reset_settings
from formal_hecke.errors import ConfigurationError

_VARS = ("FORMAL_HECKE_LOG_LEVEL", "FORMAL_HECKE_WORKERS", "FORMAL_HECKE_CACHE_SIZE",
         "FORMAL_HECKE_LATTICE_CACHE_SIZE", "FORMAL_HECKE_DEBUG")


@pytest.fixture
def clean_env(monkeypatch):
    for name in _VARS:
        monkeypatch.delenv(name, raising=False)
    reset_settings()
    yield monkeypatch
    reset_settings()


class TestSettings:
    """Loading and validating settings"""

    def test_defaults(self, clean_env):
        """Nothing set gives the defaults"""
        s = load_settings()
        assert s == Settings()
        assert (s.log_level, s.workers, s.cache_size, s.debug) == ("INFO", 1, 256, False)
        assert s.lattice_cache_size == 20000

    def test_environment(self, clean_env):
        """Variables override the defaults; the level is upper-cased"""
        clean_env.setenv("FORMAL_HECKE_LOG_LEVEL", "debug")
        clean_env.setenv("FORMAL_HECKE_WORKERS", "4")
        clean_env.setenv("FORMAL_HECKE_DEBUG", "true")
        s = load_settings()
        assert s.log_level == "DEBUG"
        assert s.workers == 4
        assert s.debug is True

    def test_env_file(self, clean_env, tmp_path):
        """A .env file seeds unset variables"""
        env_file = tmp_path / ".env"
        env_file.write_text("FORMAL_HECKE_CACHE_SIZE=32\n", encoding="utf-8")
        assert load_settings(str(env_file)).cache_size == 32
        os.environ.pop("FORMAL_HECKE_CACHE_SIZE", None)

    @pytest.mark.parametrize("name,value", [
        ("FORMAL_HECKE_LOG_LEVEL", "LOUD"),
        ("FORMAL_HECKE_WORKERS", "0"),
        ("FORMAL_HECKE_CACHE_SIZE", "many"),
        ("FORMAL_HECKE_LATTICE_CACHE_SIZE", "0"),
    ])
    def test_invalid_values(self, clean_env, name, value):
        """Bad values raise a configuration error"""
        clean_env.setenv(name, value)
        with pytest.raises(ConfigurationError) as exc:
            load_settings()
        assert exc.value.exit_code == 2

    def test_singleton(self, clean_env):
        """get_settings caches until reset"""
        first = get_settings()
        assert get_settings() is first
        reset_settings()
        assert get_settings() is not first


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
