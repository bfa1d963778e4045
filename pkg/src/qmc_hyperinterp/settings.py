from pathlib import Path

from pydantic import Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class LoggingSettings(BaseSettings):
    level: str = "INFO"


class CacheSettings(BaseSettings):
    """
    Settings for the on-disk caches.
    The CLI enables the vector cache; library calls leave it off unless asked.
    """

    directory: Path = Field(
        default=Path(".qmch_cache"), description="Directory holding all cache files"
    )
    use_disk_cache: bool = Field(
        default=True, description="Memoise quadrature coefficients with diskcache"
    )
    use_vector_cache: bool = Field(
        default=False, description="Consult the CBC generating-vector records"
    )
    vector_file: str = "vectors.txt"
    coefficient_file: str = "coefficients.txt"

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    @property
    def vector_path(self) -> Path:
        return self.directory / self.vector_file

    @property
    def coefficient_path(self) -> Path:
        return self.directory / self.coefficient_file


class ComputeSettings(BaseSettings):
    """
    Limits and tolerances shared by the numerical modules.
    """

    cardinality_cap: int = Field(
        default=10**7, description="Largest index set the enumerators will emit"
    )
    max_gram_dim: int = Field(
        default=5000, description="Largest index set accepted for a dense Gram"
    )
    power_tol: float = 1e-10
    power_max_iter: int = 10**4
    eigh_fallback_dim: int = 512
    candidate_block: int = Field(
        default=256, description="CBC candidates scored per vectorised block"
    )
    tie_rtol: float = Field(
        default=1e-12, description="Relative gap under which criterion values tie"
    )

    model_config = SettingsConfigDict(env_file=".env", extra="ignore")

    @model_validator(mode="after")
    def check_consistency(self):
        if self.cardinality_cap < 1:
            raise ValueError("cardinality_cap must be positive")
        if self.eigh_fallback_dim > self.max_gram_dim:
            self.eigh_fallback_dim = self.max_gram_dim
        return self


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        extra="ignore",
        env_prefix="QMCH_",
        env_nested_delimiter="__",
    )
    logging: LoggingSettings = LoggingSettings()
    cache: CacheSettings = CacheSettings()
    compute: ComputeSettings = ComputeSettings()


settings = Settings()
