# entropylab/core/config.py
from __future__ import annotations

from functools import lru_cache
from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="ENTROPYLAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )

    app_name: str = "entropylab"
    app_version: str = "0.1.0"
    log_level: str = "INFO"
    json_logs: bool = False

    # Runs
    seed: int = 42
    output_dir: str = "results"
    write_svg: bool = True
    jobs: int = 1
    chunk_size: int = 8192  # draws per RNG chunk; fixed for bit-reproducibility

    # Sample sizes
    default_m: int = 100_000
    default_m_inner: int = 256
    n_grid: List[int] = [1, 2, 4, 8, 16, 32]

    # kNN entropy
    knn_k: int = 5
    knn_splits: int = 5
    knn_jitter: float = 1e-12

    # Moments / mode finding
    covariance_ridge: float = 1e-9
    mode_rtol: float = 1e-8
    mode_max_iter: int = 2000

    # Convex bodies
    hit_and_run_burn_in_factor: int = 100
    hit_and_run_thinning: int = 10
    hit_and_run_chains: int = 32
    hpolytope_mc_max_dim: int = 4
    hpolytope_volume_m: int = 200_000

    # Verdicts
    analytic_slack: float = 1e-9
    slack_sigmas: float = 3.0
    reverse_epi_ceiling: float = 30.0
    hyperplane_c_desk: float = 1.0
    convolution_refinements: int = 3


@lru_cache()
def get_settings() -> Settings:
    return Settings()


settings = get_settings()
