"""Configuration settings for the scheme analysis toolkit."""
from fractions import Fraction
from typing import List, Optional, Tuple

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"
    log_dir: str = "logs"
    log_to_file: bool = True

    # Symbolic defaults
    truncation_order: int = 3

    # Numeric defaults
    random_seed: int = 20240611
    double_tolerance: float = 1e-10
    convergence_tolerance: float = 0.3
    default_cells: int = 16
    default_steps: int = 20
    convergence_grids: Tuple[int, ...] = (64, 128, 256, 512)
    convergence_final_time: str = "1/2"

    # Output
    report_path: Optional[str] = None

    @property
    def convergence_grid_list(self) -> List[int]:
        return list(self.convergence_grids)

    @property
    def final_time(self) -> Fraction:
        return Fraction(self.convergence_final_time)

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        env_prefix = "LBMFD_"
        extra = "ignore"


settings = Settings()
