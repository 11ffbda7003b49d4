"""Centralized configuration management using Pydantic settings.

This module provides type-safe, validated configuration loading from:
1. YAML config files (config.yaml + environment overlays)
2. Environment variables (highest precedence)

Usage:
    from RFSMC.shared.settings import get_settings

    settings = get_settings()
    strategy = settings.exploration.strategy
"""

import os
from functools import lru_cache
from pathlib import Path
from typing import List, Literal, Optional

import yaml
from pydantic import BaseModel, Field, SecretStr, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


STRATEGY_NAMES = ("dfs", "uniform-dfs", "rfs-step", "rfs-branch")


# === Exploration Configuration ===

class ExplorationConfig(BaseModel):
    """Defaults for a single exploration run."""
    strategy: str = "dfs"
    seed: int = 0
    max_traces: Optional[int] = None
    max_states: Optional[int] = None
    timeout_s: Optional[float] = 600.0
    gc_enabled: bool = True

    @field_validator("strategy")
    def check_strategy(cls, v):
        if v not in STRATEGY_NAMES:
            raise ValueError(f"unknown strategy '{v}', expected one of {', '.join(STRATEGY_NAMES)}")
        return v


class OracleConfig(BaseModel):
    """Brute-force oracle budgets."""
    max_executions: int = 1_000_000
    max_prefix_classes: int = 2_000_000


class CtConfig(BaseModel):
    """Critical-transition search budgets (per backward-sweep sub-exploration)."""
    max_traces_per_prefix: Optional[int] = None
    timeout_s: Optional[float] = 600.0


class SweepConfig(BaseModel):
    """Seed sweep settings."""
    seeds: int = 100
    strategies: List[str] = Field(default_factory=lambda: list(STRATEGY_NAMES))
    max_workers: int = 4

    @field_validator("strategies", mode="before")
    def normalize_strategies(cls, v):
        if v is None or v == "":
            return list(STRATEGY_NAMES)
        if isinstance(v, str):
            return [item.strip() for item in v.split(",") if item.strip()]
        return v


# === Storage Configuration ===

class StorageConfig(BaseModel):
    """Storage paths configuration."""
    logs_directory: str = "./logs"
    reports_directory: str = "./reports"


# === Observability Configuration ===

class SentryConfig(BaseModel):
    """Sentry error tracking configuration."""
    dsn: Optional[SecretStr] = None
    traces_sample_rate: float = 0.0
    environment: str = "development"


class ProfilingConfig(BaseModel):
    """Performance profiling configuration."""
    enabled: bool = False
    output_directory: str = "./profiling_data"


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "WARNING"
    format: Literal["json", "text"] = "json"
    to_file: bool = False


class ObservabilityConfig(BaseModel):
    """Observability and monitoring settings."""
    sentry: SentryConfig = Field(default_factory=SentryConfig)
    profiling: ProfilingConfig = Field(default_factory=ProfilingConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


# === Main Settings ===

class RFSMCSettings(BaseSettings):
    """Main model checker configuration."""
    environment: str = "development"
    exploration: ExplorationConfig = Field(default_factory=ExplorationConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    ct: CtConfig = Field(default_factory=CtConfig)
    sweep: SweepConfig = Field(default_factory=SweepConfig)
    storage: StorageConfig = Field(default_factory=StorageConfig)
    observability: ObservabilityConfig = Field(default_factory=ObservabilityConfig)

    model_config = SettingsConfigDict(
        env_prefix="RFSMC_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        # YAML values arrive as init kwargs; environment variables win over them.
        return env_settings, init_settings, dotenv_settings, file_secret_settings


def _load_yaml_config(config_path: Optional[Path] = None) -> dict:
    """Load configuration from YAML files with environment overlay.

    Args:
        config_path: Path to base config file. If None, uses the packaged
                    RFSMC/config/config.yaml.

    Returns:
        Merged configuration dictionary.
    """
    if config_path is None:
        package_root = Path(__file__).parent.parent
        config_path = package_root / "config" / "config.yaml"

    if not config_path.exists():
        # Env vars and code defaults still apply
        return {}

    with open(config_path, "r") as f:
        config = yaml.safe_load(f) or {}

    env = os.getenv("RFSMC_ENV", config.get("environment", "development"))
    env_config_path = config_path.parent / f"config.{env}.yaml"

    if env_config_path.exists():
        with open(env_config_path, "r") as f:
            env_config = yaml.safe_load(f) or {}

        config = _deep_merge(config, env_config)

    return config


def _deep_merge(base: dict, override: dict) -> dict:
    """Recursively merge override dict into base dict."""
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value

    return result


def _normalize_yaml_config(config: dict) -> dict:
    """Normalize YAML config to match settings schema.

    Empty strings in YAML mean "unset" for optional values.
    """
    if not isinstance(config, dict):
        return config

    normalized = {}
    for key, value in config.items():
        if isinstance(value, dict):
            normalized[key] = _normalize_yaml_config(value)
        elif value == "":
            continue
        else:
            normalized[key] = value
    return normalized


@lru_cache(maxsize=1)
def get_settings(config_path: Optional[Path] = None) -> RFSMCSettings:
    """Get cached settings instance.

    Configuration precedence (highest to lowest):
    1. Environment variables (e.g., RFSMC_EXPLORATION__STRATEGY)
    2. Environment-specific YAML (e.g., config.dev.yaml)
    3. Base YAML config (config.yaml)
    4. Code defaults
    """
    yaml_config = _load_yaml_config(config_path)
    normalized_config = _normalize_yaml_config(yaml_config)
    return RFSMCSettings(**normalized_config)


def reload_settings(config_path: Optional[Path] = None) -> RFSMCSettings:
    """Force reload of settings (clears cache)."""
    get_settings.cache_clear()
    return get_settings(config_path)
