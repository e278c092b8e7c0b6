from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env.local",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Server
    PORT: int = 8000
    ENVIRONMENT: str = "development"
    DEBUG: bool = False

    # Verification budget: maximum number of test tuples a certifying run may
    # evaluate before it refuses (MAX_TUPLES overrides it from the environment)
    MAX_TUPLES: int = 250_000

    # Randomness
    DEFAULT_SEED: int = 20240601

    # Output
    OUTPUT_FORMAT: str = "json"
    LOG_LEVEL: str = "WARNING"
    REPORT_SCHEMA_VERSION: str = "1.0"

    # Regression data
    FIXTURES_DIR: str = "fixtures"

    def budget_or_default(self, budget: int | None) -> int:
        if budget is None:
            return self.MAX_TUPLES
        return budget


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
