"""Configuration management for the Riesz/GAP toolkit."""

import os
from typing import Optional
from pydantic import BaseModel
from dotenv import load_dotenv


class Config(BaseModel):
    """Application configuration."""

    # Logging
    log_level: str = "INFO"
    log_format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    log_file_path: Optional[str] = "logs/rgap.log"

    # Worker pool
    threads: int = 1

    # Resource caps
    grid_cap: int = 8192
    fiber_cap: int = 1 << 20
    sample_cap: int = 50_000_000

    # Bad set construction
    delta_partial_terms: int = 1_000_000
    delta_safety: float = 0.99

    # Numerics
    quadrature_rel_tol: float = 1e-8
    report_constant: float = 2.0
    hermitian_tol: float = 1e-12
    parseval_tol: float = 1e-9
    coefficient_floor: float = 1e-14
    rectangle_max_freq: int = 32768

    # Translation search
    translation_initial_radius: int = 4
    translation_max_radius: int = 64
    translation_batch: int = 32

    # Output
    schema_tag: str = "rgap/1"

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables."""
        load_dotenv()

        return cls(
            log_level=os.getenv("RGAP_LOG_LEVEL", "INFO"),
            log_format=os.getenv("RGAP_LOG_FORMAT", "%(asctime)s - %(name)s - %(levelname)s - %(message)s"),
            log_file_path=os.getenv("RGAP_LOG_FILE_PATH", "logs/rgap.log") or None,

            threads=int(os.getenv("RGAP_THREADS", "1")),

            grid_cap=int(os.getenv("RGAP_GRID_CAP", "8192")),
            fiber_cap=int(os.getenv("RGAP_FIBER_CAP", str(1 << 20))),
            sample_cap=int(os.getenv("RGAP_SAMPLE_CAP", "50000000")),

            delta_partial_terms=int(os.getenv("RGAP_DELTA_PARTIAL_TERMS", "1000000")),
            delta_safety=float(os.getenv("RGAP_DELTA_SAFETY", "0.99")),

            quadrature_rel_tol=float(os.getenv("RGAP_QUADRATURE_REL_TOL", "1e-8")),
            report_constant=float(os.getenv("RGAP_REPORT_CONSTANT", "2.0")),
            hermitian_tol=float(os.getenv("RGAP_HERMITIAN_TOL", "1e-12")),
            parseval_tol=float(os.getenv("RGAP_PARSEVAL_TOL", "1e-9")),
            coefficient_floor=float(os.getenv("RGAP_COEFFICIENT_FLOOR", "1e-14")),
            rectangle_max_freq=int(os.getenv("RGAP_RECTANGLE_MAX_FREQ", "32768")),

            translation_initial_radius=int(os.getenv("RGAP_TRANSLATION_INITIAL_RADIUS", "4")),
            translation_max_radius=int(os.getenv("RGAP_TRANSLATION_MAX_RADIUS", "64")),
            translation_batch=int(os.getenv("RGAP_TRANSLATION_BATCH", "32")),

            schema_tag=os.getenv("RGAP_SCHEMA_TAG", "rgap/1"),
        )


# Global configuration instance
config = Config.from_env()
