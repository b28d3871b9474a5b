"""
Environment-driven defaults.

Values come from DRESSED_CAVITY_* variables, optionally loaded from a .env
file in the working directory.
"""

import os
from functools import lru_cache
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()

ENV_PREFIX = "DRESSED_CAVITY_"


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True)

    truncation: int = Field(default=20000, ge=1)
    root_rtol: float = Field(default=1e-12, gt=0)
    residual_tolerance: float = Field(default=1e-8, gt=0)
    scan_points: int = Field(default=64, ge=2)
    delta_max: float = Field(default=0.2, gt=0)
    critical_tol: float = Field(default=1e-6, gt=0)
    quad_epsabs: float = Field(default=1e-13, gt=0)
    quad_limit: int = Field(default=400, ge=50)
    small_truncation: int = Field(default=1000, ge=1)
    dense_limit: int = Field(default=4096, ge=2)
    log_level: str = "INFO"
    metrics_file: Optional[str] = None


def _from_env() -> dict:
    values = {}
    for name in Settings.model_fields:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw.strip() != "":
            values[name] = raw.strip()
    return values


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings resolved from the environment (cached)."""
    return Settings(**_from_env())
