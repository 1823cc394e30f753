"""Runtime settings read from the environment (optionally a .env file)."""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv

from core.errors import DomainError

PROJECT_ROOT = Path(__file__).resolve().parent.parent
ENV_FILE = PROJECT_ROOT / ".env"

DEFAULT_WORKERS = 4
DEFAULT_FORMAT = "csv"
DEFAULT_SEED = 20240101
FORMATS = ("csv", "json")


@dataclass(frozen=True)
class Settings:
    workers: int = DEFAULT_WORKERS
    output_format: str = DEFAULT_FORMAT
    seed: int = DEFAULT_SEED


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise DomainError(f"{name} must be an integer, got '{raw}'")


def load_settings(env_file: Optional[Path] = None) -> Settings:
    """Values already set in the environment win over the .env file."""
    load_dotenv(env_file or ENV_FILE, override=False)
    workers = _int_env("PILOT_WORKERS", DEFAULT_WORKERS)
    if workers < 1:
        raise DomainError(f"PILOT_WORKERS must be at least 1, got {workers}")
    output_format = os.getenv("PILOT_FORMAT", DEFAULT_FORMAT).strip().lower() or DEFAULT_FORMAT
    if output_format not in FORMATS:
        raise DomainError(f"PILOT_FORMAT must be one of {FORMATS}, got '{output_format}'")
    seed = _int_env("PILOT_SEED", DEFAULT_SEED)
    if seed < 0:
        raise DomainError(f"PILOT_SEED must be non-negative, got {seed}")
    return Settings(workers, output_format, seed)
