"""
Runtime configuration for hypersurf.

Settings are read from the environment (prefix ``HYPERSURF_``) or a local
``.env`` file. Command-line flags override them.
"""

import logging
from typing import Optional

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
VALID_OUTPUT_FORMATS = ("json", "text")


class Settings(BaseSettings):
    PROJECT_NAME: str = "hypersurf"

    # Environment (development, production)
    ENVIRONMENT: str = "development"

    # Diagnostics on stderr
    LOG_LEVEL: str = "WARNING"

    # Worker cap for sweeps; unset or 1 runs serially
    THREADS: Optional[int] = None

    # Default report format for the CLI
    OUTPUT_FORMAT: str = "json"

    # Seed for the reproducible multidegree sweeps
    SWEEP_SEED: int = 20240611

    # Upper bound on m for the exhaustive continued-fraction checks
    HJ_EXHAUSTION_LIMIT: int = 200

    @property
    def is_development(self) -> bool:
        """Check if running in development mode."""
        return self.ENVIRONMENT.lower() == "development"

    model_config = SettingsConfigDict(
        env_prefix="HYPERSURF_",
        env_file=".env",
        env_ignore_empty=True,
        extra="ignore",
    )

    @field_validator("LOG_LEVEL", mode="before")
    @classmethod
    def normalize_log_level(cls, v):
        """Accept any casing; fall back to WARNING for unknown names."""
        level = str(v).strip().upper()
        if level not in VALID_LOG_LEVELS:
            logging.getLogger(__name__).warning(
                f"Unknown log level '{v}', using WARNING"
            )
            return "WARNING"
        return level

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v):
        if v is not None and v < 1:
            raise ValueError("THREADS must be a positive integer")
        return v

    @field_validator("OUTPUT_FORMAT", mode="before")
    @classmethod
    def validate_output_format(cls, v):
        fmt = str(v).strip().lower()
        if fmt not in VALID_OUTPUT_FORMATS:
            raise ValueError(f"OUTPUT_FORMAT must be one of {VALID_OUTPUT_FORMATS}")
        return fmt


settings = Settings()
