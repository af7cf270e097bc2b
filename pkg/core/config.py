"""
Application configuration using Pydantic Settings
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Numerical defaults and runtime knobs with environment variable support"""

    # Environment
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "console"

    # Truncation
    N_MAX: int = 64
    M_MAX: int = 64
    AMPLITUDE_DROP: float = 1e-14

    # Mode systems
    RESONANCE_TOL: float = 1e-8
    ENTIRETY_TOL: float = 1e-10

    # Commensurability
    CF_Q_MAX: int = 1_000_000
    CF_RESIDUAL: float = 1e-9

    # Zero finding
    DITHER_ATTEMPTS: int = 5
    SUBDIVISION_MAX_DEPTH: int = 20
    NEWTON_MAX_ITER: int = 60

    # Contour quadrature
    QUAD_TOL: float = 1e-10
    CONTOUR_DELTA_DEG: float = 15.0
    CLEARANCE_CAP: float = 0.25

    # Reference time stepper
    ORACLE_POINTS: int = 32
    ORACLE_DT: float = 1e-3
    RANNACHER_STEPS: int = 2
    BLOWUP_THRESHOLD: float = 1e12

    # Reports
    OUTPUT_DIR: str = "output"

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
