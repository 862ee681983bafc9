from pathlib import Path
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="SLOCC_", env_file=".env", env_file_encoding="utf-8")

    # Data directories
    data_dir: Path = Path("./data")

    # Randomness
    seed: int = 20240101
    entry_bound: int = 1  # amplitude bound for generated states

    # Decision budgets
    samples: int = 64  # random parameter points per stabilizer candidate
    timeout_ms: int = 60_000
    witness_attempts: int = 24
    lift_restarts: int = 6  # floating-point witness search; 0 disables it
    max_minor_parameters: int = 40  # exact minor analysis is skipped above this

    # Census
    omega_table: Optional[Path] = None  # extra entries merged over the seeded table

    # Batch settings
    batch_workers: int = 4

    log_level: str = "INFO"

    @property
    def store_path(self) -> Path:
        return self.data_dir / "results.db"

    @property
    def reports_path(self) -> Path:
        return self.data_dir / "reports"


@lru_cache
def get_settings() -> Settings:
    return Settings()
