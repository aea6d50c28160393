"""Configuration management: process settings from the environment, run configs from JSON."""

from __future__ import annotations

import logging
import math
import os
from pathlib import Path

from dotenv import find_dotenv, load_dotenv
from pydantic import BaseModel, Field, ValidationError

from gns_decay.models import (
    RunConfig,
    Sampling,
    SimParams,
    SpectrumSpec,
    WindowSettings,
)
from gns_decay.spectral import Grid

logger = logging.getLogger(__name__)

# Default root for run directories
DEFAULT_OUT_DIR = Path("runs")


class Settings(BaseModel):
    """Process-level settings loaded from environment variables."""

    out_dir: Path = DEFAULT_OUT_DIR

    # scipy.fft worker threads per transform
    threads: int = Field(default=1, ge=1)

    # Worker pool size for sweeps
    max_parallel_runs: int = Field(default=1, ge=1)


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def load_settings() -> Settings:
    """Load settings from environment variables.

    Looks for a .env file in the current directory and parent directories.
    Environment variables take precedence over .env file values.

    Raises:
        ValueError: If a variable is malformed. See .env.example for reference.
    """
    load_dotenv(find_dotenv(usecwd=True))
    return Settings(
        out_dir=Path(os.getenv("GNS_DECAY_OUT_DIR", str(DEFAULT_OUT_DIR))),
        threads=_env_int("GNS_DECAY_THREADS", 1),
        max_parallel_runs=_env_int("GNS_DECAY_MAX_PARALLEL_RUNS", 1),
    )


def load_run_config(path: Path) -> RunConfig:
    """Read and validate a run config.

    Raises:
        ValueError: If the file is missing, unreadable or fails validation.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ValueError(f"Cannot read config {path}: {e}") from e
    try:
        return RunConfig.model_validate_json(text)
    except ValidationError as e:
        raise ValueError(f"Invalid config {path}:\n{e}") from e


def save_run_config(config: RunConfig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(config.model_dump_json(indent=2) + "\n", encoding="utf-8")
    return path


def flagship_config() -> RunConfig:
    """32^3 small-data run at alpha = 1 on flat-spectrum data (p = 1).

    k_min = 0.01 and the data fills the dealias ball, so the valid window is
    roughly t in [299, 1874].
    """
    return RunConfig(
        name="flagship",
        grid=Grid(n=32, box_length=200.0 * math.pi),
        params=SimParams(alpha=1.0, dt=0.5, t_end=1900.0, amplitude=1e-5),
        initial_data=SpectrumSpec(sigma=0.0, xi_knee=0.1, seed=7),
        sampling=Sampling(every=2),
        m_list=[1],
    )


def heat_baseline_config() -> RunConfig:
    """64^3 heat-oracle baseline whose window spans at least a decade for alpha in [0.6, 1.2]."""
    box_length = 2000.0 * math.pi
    k_min = 2.0 * math.pi / box_length
    return RunConfig(
        name="heat-baseline",
        grid=Grid(n=64, box_length=box_length),
        params=SimParams(alpha=1.0, dt=1.0, t_end=1e7),
        initial_data=SpectrumSpec(sigma=0.0, xi_knee=30.0 * k_min, seed=11),
        sampling=Sampling(heat_points=257),
        m_list=[1],
        window=WindowSettings(resolve_shells=4.0),
    )


def default_run_config(mode: str) -> RunConfig:
    if mode == "simulate":
        return flagship_config()
    if mode == "heat":
        return heat_baseline_config()
    raise ValueError(f"Unknown run mode: {mode}")


def apply_overrides(
    config: RunConfig,
    out: Path | None = None,
    seed: int | None = None,
) -> RunConfig:
    """Return a revalidated copy with CLI overrides applied."""
    data = config.model_dump(mode="json")
    if out is not None:
        data["output_dir"] = str(out)
    if seed is not None:
        if data["initial_data"]["kind"] != "spectrum":
            logger.warning("--seed ignored: %s data is deterministic", data["initial_data"]["kind"])
        else:
            data["initial_data"]["seed"] = seed
    return RunConfig.model_validate(data)
