"""Application settings and configuration."""

from functools import lru_cache
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``FRONTIER_LAB_``)."""

    # Execution
    threads: int = Field(default=1, ge=1, description="Worker cap for replica execution")
    batch_size: int = Field(default=32, ge=1, description="Replicas submitted per batch")
    failure_rate_limit: float = Field(
        default=0.01, ge=0.0, le=1.0, description="Largest tolerated share of failed replicas"
    )

    # Smoothing grids
    eval_grid_size: int = Field(default=101, ge=2, description="Points per component evaluation grid")
    sbs_grid_size: int = Field(default=101, ge=32, description="Points per axis of the SBS integration grid")
    cv_grid_size: int = Field(default=20, ge=1, description="Bandwidth candidates for univariate CV")
    cv_grid_size_bivariate: int = Field(
        default=6, ge=1, description="Bandwidth candidates per axis for bivariate CV"
    )
    cbs_mode: Literal["explicit", "iterative"] = Field(
        default="explicit", description="Classical backfitting solver used by the frontier pipeline"
    )

    # Logging
    log_level: str = Field(default="WARNING", description="Root log level for the command line")

    model_config = {
        "env_prefix": "FRONTIER_LAB_",
        "extra": "ignore",
    }


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
