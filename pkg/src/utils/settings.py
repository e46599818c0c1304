"""
Environment configuration for subfn.
Values are read from SUBFN_* environment variables (and a local .env file).
"""
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime knobs shared by services and handlers"""
    model_config = SettingsConfigDict(env_prefix='SUBFN_', env_file='.env', extra='ignore')

    threads: int = Field(default=0, ge=0)  # 0 = let the executor decide
    log_level: str = 'INFO'

    # Defaults for quadrature and discretization
    default_panels: int = Field(default=64, ge=1)
    default_nodes: int = Field(default=16, ge=2)
    default_atoms: int = Field(default=3000, ge=8)
    default_tail: float = Field(default=1e-7, gt=0, lt=1e-2)


settings = Settings()
