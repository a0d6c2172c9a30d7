# cppgen/config/settings.py
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

load_dotenv()


class Settings(BaseSettings):
    """Configuración global, leída de variables CPPGEN_* y del archivo .env"""

    model_config = SettingsConfigDict(env_prefix="CPPGEN_", env_file=".env", extra="ignore")

    # Ejecución
    threads: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2**64)

    # Logs (a stderr)
    log_level: str = "WARNING"
    log_json: bool = False

    # Serialización
    float_digits: int = Field(17, ge=1, le=17)

    # Numérica
    max_attempts: int = Field(10_000_000, ge=1)
    truncation_factor: float = Field(1e-3, gt=0)
    quad_rel_tol: float = Field(1e-8, gt=0)
    tail_series_max_terms: int = Field(200_000, ge=1)

    # Verificación
    significance: float = Field(0.01, gt=0, lt=1)


@lru_cache
def get_settings() -> Settings:
    return Settings()
