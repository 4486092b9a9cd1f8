from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="EBQ_", env_file=".env", extra="ignore"
    )

    # Series truncation
    MAX_TERMS: int = 4096
    TOL: float = 1e-16
    RATIO_GUARD: float = 0.95

    # Sampling
    SEED: int = 7
    SAMPLES: int = 5

    # Default algebra parameters
    DEFAULT_N: int = 2
    DEFAULT_Q_RE: float = 0.45
    DEFAULT_Q_IM: float = 0.05
    DEFAULT_R: float = 4.3
    DEFAULT_C: float = 1.2

    # Bracket memo size
    CACHE_SIZE: int = 65536

    LOG_LEVEL: str = "INFO"


@lru_cache
def get_settings() -> Settings:
    """
    Cache and return settings instance
    """
    return Settings()
