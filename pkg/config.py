import yaml
import os
from fractions import Fraction
from pathlib import Path
from typing import Dict, List
from pydantic_settings import BaseSettings

from engine.errors import ConfigError


class Settings(BaseSettings):
    np_order: int = 6  # p-order of every elliptic expansion
    window: int = 8  # |z|, |w| exponent window
    rank: int = 2
    seeds: List[int] = [1, 2, 3]
    workers: int = 1
    output_dir: str = "reports"
    tables_dir: str = "tables"
    relations_dir: str = "relations"
    quadrature_points: int = 4096
    quadrature_tolerance: float = 1e-9

    class Config:
        env_file = ".env"
        case_sensitive = False


def load_config(path: str = "config.yaml") -> Settings:
    """Load configuration from config.yaml or environment variables"""
    config_path = Path(path)

    if not config_path.exists():
        return Settings()

    try:
        with open(config_path, "r") as f:
            config = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{config_path}: {e}") from e

    truncation = config.get("truncation", {})
    suite = config.get("suite", {})
    paths = config.get("paths", {})
    quadrature = config.get("quadrature", {})

    values = dict(
        np_order=truncation.get("np", os.getenv("NP_ORDER")),
        window=truncation.get("window", os.getenv("WINDOW")),
        rank=suite.get("rank", os.getenv("RANK")),
        seeds=suite.get("seeds"),
        workers=suite.get("workers", os.getenv("WORKERS")),
        output_dir=paths.get("output_dir", os.getenv("OUTPUT_DIR")),
        tables_dir=paths.get("tables_dir", os.getenv("TABLES_DIR")),
        relations_dir=paths.get("relations_dir", os.getenv("RELATIONS_DIR")),
        quadrature_points=quadrature.get("points", os.getenv("QUADRATURE_POINTS")),
        quadrature_tolerance=quadrature.get("tolerance", os.getenv("QUADRATURE_TOLERANCE")),
    )
    try:
        return Settings(**{k: v for k, v in values.items() if v is not None})
    except ValueError as e:
        raise ConfigError(f"{config_path}: {e}") from e


def load_params(path: str) -> Dict[str, Fraction]:
    """
    Read explicit parameters from key=value lines (p, q1, q2, u1..ur, x1).
    Values are exact rationals such as 1/9; '#' starts a comment.
    """
    params_path = Path(path)
    if not params_path.exists():
        raise ConfigError(f"params file {params_path} not found")

    values: Dict[str, Fraction] = {}
    with open(params_path, "r") as f:
        for number, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, raw = line.partition("=")
            key = key.strip()
            if not sep or not key:
                raise ConfigError(f"{params_path}:{number}: expected key=value, got '{line}'")
            try:
                values[key] = Fraction(raw.strip())
            except (ValueError, ZeroDivisionError) as e:
                raise ConfigError(f"{params_path}:{number}: '{raw.strip()}' is not a rational") from e

    missing = [k for k in ("p", "q1", "q2", "u1") if k not in values]
    if missing:
        raise ConfigError(f"{params_path}: missing {', '.join(missing)}")
    return values

