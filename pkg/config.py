"""Application settings loaded from the environment or a .env file."""

from functools import lru_cache

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime configuration; every field can be set as NORMALSURF_<NAME>."""

    model_config = SettingsConfigDict(env_prefix="NORMALSURF_", env_file=".env", extra="ignore")

    log_level: str = Field(default="INFO", description="Root logging level")
    default_max_w1: int = Field(default=6, ge=1, description="Weight cap used when a request gives none")
    default_scale: int = Field(default=2, ge=0, description="Refinement depth for the heavy exterior")
    max_results: int = Field(default=500_000, ge=1, description="Enumeration budget before giving up")
    workers: int = Field(default=1, ge=1, description="Process-pool size for subtree search")
    host: str = "0.0.0.0"
    port: int = 8000
    reload: bool = False


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    return Settings()
