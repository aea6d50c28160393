"""Shared test fixtures for gns-decay tests."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest

from gns_decay.models import (
    RunConfig,
    Sampling,
    SimParams,
    SpectrumSpec,
    TaylorGreenSpec,
    WindowSettings,
)
from gns_decay.initial_data import random_divfree_field
from gns_decay.spectral import Grid, SpectralField, forward_fft, leray_coeffs, make_grid

TWO_PI = 2.0 * math.pi


def make_params(**kwargs) -> SimParams:
    """SimParams with small-test defaults."""
    values = {"alpha": 1.0, "nu": 1.0, "dt": 0.01, "t_end": 0.1}
    values.update(kwargs)
    return SimParams(**values)


def make_random_field(
    grid: Grid,
    seed: int = 0,
    amplitude: float = 1.0,
    sigma: float = 0.0,
    knee: float | None = None,
) -> SpectralField:
    """Random divergence-free real field filling the dealias ball (or a given knee)."""
    spec = SpectrumSpec(
        sigma=sigma,
        xi_knee=knee if knee is not None else grid.dealias_radius,
        amplitude=amplitude,
        seed=seed,
        origin_compensation=False,
    )
    return random_divfree_field(grid, spec)


def make_raw_field(grid: Grid, seed: int = 0) -> SpectralField:
    """Unprojected coefficients of real white noise (not divergence-free)."""
    rng = np.random.default_rng(seed)
    return SpectralField(grid, forward_fft(rng.standard_normal(grid.field_shape), grid))


def make_shear_flow(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """u = (A sin(k y) + A/2 cos(2 k y), 0, 0) with k the lowest wavenumber."""
    coeffs = np.zeros(grid.field_shape, dtype=np.complex128)
    n = grid.n

    def at(ky: int) -> tuple:
        return (0, 0, ky % n, *([0] * (grid.dim - 2)))

    coeffs[at(1)] += -0.5j * amplitude
    coeffs[at(-1)] += 0.5j * amplitude
    coeffs[at(2)] += 0.25 * amplitude
    coeffs[at(-2)] += 0.25 * amplitude
    return SpectralField(grid, coeffs)


def make_single_mode(grid: Grid, index: tuple[int, ...], vector: np.ndarray) -> SpectralField:
    """Real field with coefficient ``vector`` at ``index`` and its conjugate at -index."""
    coeffs = np.zeros(grid.field_shape, dtype=np.complex128)
    n = grid.n
    pos = tuple(k % n for k in index)
    neg = tuple(-k % n for k in index)
    coeffs[(slice(None), *pos)] = vector
    coeffs[(slice(None), *neg)] = np.conj(vector)
    return SpectralField(grid, coeffs)


def make_run_config(tmp_path: Path, mode: str = "heat", **overrides) -> RunConfig:
    """Small run config writing into tmp_path."""
    if mode == "heat":
        data = {
            "name": "test-heat",
            "grid": Grid(n=16, box_length=200.0 * math.pi),
            "params": SimParams(alpha=1.0, dt=1.0, t_end=1e5),
            "initial_data": SpectrumSpec(sigma=0.0, xi_knee=0.07, seed=3),
            "sampling": Sampling(heat_points=65),
            "m_list": [1],
            "window": WindowSettings(resolve_shells=2.0),
        }
    else:
        data = {
            "name": "test-sim",
            "grid": Grid(n=8, box_length=TWO_PI),
            "params": SimParams(alpha=1.0, nu=0.1, dt=0.05, t_end=1.0, amplitude=0.1),
            "initial_data": TaylorGreenSpec(amplitude=1.0),
            "sampling": Sampling(every=2),
            "m_list": [1],
        }
    data["output_dir"] = tmp_path / data["name"]
    data.update(overrides)
    return RunConfig(**data)


def project(field: SpectralField) -> SpectralField:
    return field.with_coeffs(leray_coeffs(field.coeffs, field.grid))


@pytest.fixture
def grid8() -> Grid:
    return make_grid(8, TWO_PI)


@pytest.fixture
def grid16() -> Grid:
    return make_grid(16, TWO_PI)


@pytest.fixture
def grid2d() -> Grid:
    return make_grid(16, TWO_PI, dim=2)
