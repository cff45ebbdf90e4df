from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", extra="ignore", env_file_encoding="utf-8", env_prefix="COUETTE_"
    )

    OUTPUT_ROOT: str = "runs"
    CONFIG_PATH: str | None = None
    LOG_LEVEL: str = "INFO"

    # Sweep worker pool; 1 runs children inline
    MAX_WORKERS: int = 1

    # Assembled SIO/commutator matrices kept per process
    OPERATOR_CACHE_SIZE: int = 256

    CHECKPOINT_PRECISION: str = "complex128"  # or "complex64"


settings = Settings()
