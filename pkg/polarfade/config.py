from __future__ import annotations

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    seed: int | None = None
    threads: int | None = None
    log_level: str = "INFO"
    log_format: str = "text"
    quad_abs_tol: float = 1e-10
    quad_max_subdivisions: int = 65536
    quad_range_sigmas: float = 10.0
    max_bit_errors: int = 100
    batch_size: int = 64
    design_cache_maxsize: int = 256
    output_dir: str = "."

    model_config = {
        "env_prefix": "POLARFADE_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
    }


settings = Settings()
