import logging
from pathlib import Path
from typing import Dict, List, Tuple

from pydantic_settings import BaseSettings, SettingsConfigDict

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class Settings(BaseSettings):
    """
    Runtime settings, overridable through BINETLAB_* environment variables
    """

    model_config = SettingsConfigDict(env_prefix="BINETLAB_", extra="ignore")

    PROJECT_NAME: str = "BinetLab"

    # Corpus location
    corpus_dir: Path = Path(__file__).resolve().parent.parent / "corpus"

    # Verification grids
    index_range: Tuple[int, int] = (-5, 5)
    bound_range: Tuple[int, int] = (0, 4)
    parameter_samples: List[Tuple[int, int]] = [
        (1, -1), (2, -1), (3, -1), (1, -2), (2, -2), (3, -2)
    ]

    # Numeric checks
    precision: int = 30
    min_precision: int = 8
    default_seed_values: Dict[str, int] = {"0": 2, "1": 5}

    # Pipeline
    default_shift: str = "s"

    # Execution
    max_workers: int = 4
    log_level: str = "WARNING"


def configure_logging(level: str = "WARNING") -> None:
    """
    Configure root logging for command-line runs

    Args:
        level: Logging level name
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format=LOG_FORMAT,
    )


settings = Settings()
