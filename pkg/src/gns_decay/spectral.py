"""Spectral core: periodic grids, Fourier multipliers, the Leray projector.

Coefficients are Fourier-series coefficients,
``u_hat[k] = n**-d * sum_x f(x) exp(-i xi_k . x)``, computed with
``scipy.fft.fftn(..., norm="forward")``. Parseval then reads
``||f||_2**2 = (L/n)**d * sum_x |f|**2 = L**d * sum_k |u_hat|**2``, so every
norm on the spectral side carries the lattice measure weight ``L**d``.

Wavevectors are angular: ``xi = 2*pi*k / L`` for integer k.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.fft as sfft
from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)

# Relative slack for |xi| <= radius comparisons (radii come out of a sqrt)
RADIUS_SLACK = 1e-12


class GridMismatchError(ValueError):
    """Raised when fields on different grids, or arrays of the wrong shape, are combined."""


class Grid(BaseModel):
    """Periodic box discretization with its wavenumber lattice.

    The model is frozen and hashable so lattice arrays can be cached per grid.
    """

    model_config = ConfigDict(frozen=True)

    n: int = Field(description="Modes per axis")
    box_length: float = Field(gt=0.0, description="Physical side length L")
    dim: int = Field(default=3, description="Spatial dimension (2 is for fast tests only)")

    @field_validator("n")
    @classmethod
    def validate_n(cls, v: int) -> int:
        if v < 4:
            raise ValueError(f"n must be at least 4, got {v}")
        if v % 2:
            raise ValueError(f"n must be even, got {v}")
        return v

    @field_validator("dim")
    @classmethod
    def validate_dim(cls, v: int) -> int:
        if v not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {v}")
        return v

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.dim

    @property
    def field_shape(self) -> tuple[int, ...]:
        """Shape of a vector field's coefficient array: (dim, n, ..., n)."""
        return (self.dim, *self.shape)

    @property
    def lattice_size(self) -> int:
        return self.n**self.dim

    @property
    def k_min(self) -> float:
        """Lowest nonzero wavenumber magnitude 2*pi/L."""
        return 2.0 * np.pi / self.box_length

    @property
    def measure(self) -> float:
        """Lattice measure weight L**d used by every spectral norm."""
        return self.box_length**self.dim

    @property
    def dealias_index(self) -> int:
        return self.n // 3

    @property
    def dealias_radius(self) -> float:
        """Largest sphere contained in the 2/3-rule cube."""
        return self.k_min * self.dealias_index

    @property
    def indices(self) -> np.ndarray:
        """Integer lattice indices, shape (dim, n, ..., n), in FFT order."""
        return _lattice(self.n, self.box_length, self.dim)[0]

    @property
    def wavevectors(self) -> np.ndarray:
        """Angular wavevectors xi = 2*pi*k/L, shape (dim, n, ..., n)."""
        return _lattice(self.n, self.box_length, self.dim)[1]

    @property
    def k_squared(self) -> np.ndarray:
        return _lattice(self.n, self.box_length, self.dim)[2]

    @property
    def k_magnitude(self) -> np.ndarray:
        return _lattice(self.n, self.box_length, self.dim)[3]

    @property
    def max_wavenumber(self) -> float:
        return float(self.k_magnitude.max())

    @property
    def spatial_axes(self) -> tuple[int, ...]:
        """Axes of a field array that carry the lattice (the last ``dim`` axes)."""
        return tuple(range(-self.dim, 0))

    def coordinates(self) -> np.ndarray:
        """Physical collocation points, shape (dim, n, ..., n)."""
        x = np.arange(self.n) * (self.box_length / self.n)
        return np.stack(np.meshgrid(*([x] * self.dim), indexing="ij"))


@lru_cache(maxsize=16)
def _lattice(n: int, box_length: float, dim: int) -> tuple[np.ndarray, ...]:
    k1 = np.fft.fftfreq(n, d=1.0 / n).round().astype(np.int64)
    indices = np.stack(np.meshgrid(*([k1] * dim), indexing="ij"))
    xi = indices * (2.0 * np.pi / box_length)
    k2 = np.sum(xi**2, axis=0)
    kmag = np.sqrt(k2)
    for arr in (indices, xi, k2, kmag):
        arr.setflags(write=False)
    logger.debug("Built %d^%d lattice for L=%g", n, dim, box_length)
    return indices, xi, k2, kmag


def make_grid(n: int, box_length: float, dim: int = 3) -> Grid:
    """Build a validated grid. Raises ``ValueError`` for odd or tiny n, or L <= 0."""
    return Grid(n=n, box_length=box_length, dim=dim)


@dataclass(frozen=True)
class SpectralField:
    """Vector field as complex Fourier coefficients, shape (dim, n, ..., n)."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        if self.coeffs.shape != self.grid.field_shape:
            raise GridMismatchError(
                f"Coefficient array has shape {self.coeffs.shape}, "
                f"grid expects {self.grid.field_shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid) -> SpectralField:
        return cls(grid, np.zeros(grid.field_shape, dtype=np.complex128))

    def with_coeffs(self, coeffs: np.ndarray) -> SpectralField:
        return SpectralField(self.grid, coeffs)

    def mode_energy(self) -> np.ndarray:
        """Per-mode weighted energy L**d * sum_i |u_hat_i|**2, shape (n, ..., n)."""
        return self.grid.measure * np.sum(np.abs(self.coeffs) ** 2, axis=0)

    def energy(self) -> float:
        """Squared L2 norm ||u||_2**2."""
        return float(self.mode_energy().sum())

    def norm(self) -> float:
        return float(np.sqrt(self.energy()))

    def divergence(self) -> np.ndarray:
        """Spectral divergence xi . u_hat per mode (the factor i is dropped)."""
        return np.sum(self.grid.wavevectors * self.coeffs, axis=0)

    def max_divergence(self) -> float:
        return float(np.abs(self.divergence()).max())

    def hermitian_defect(self) -> float:
        """Max |u_hat(-xi) - conj(u_hat(xi))|; zero for fields of real data."""
        return float(np.abs(reflect(self.coeffs, self.grid) - np.conj(self.coeffs)).max())


@dataclass(frozen=True)
class PhysicalField:
    """Vector field sampled on the collocation grid, shape (dim, n, ..., n)."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self) -> None:
        if self.samples.shape != self.grid.field_shape:
            raise GridMismatchError(
                f"Sample array has shape {self.samples.shape}, "
                f"grid expects {self.grid.field_shape}"
            )

    def energy(self) -> float:
        """Squared L2 norm by the collocation quadrature (L/n)**d * sum |f|**2."""
        cell = (self.grid.box_length / self.grid.n) ** self.grid.dim
        return float(cell * np.sum(self.samples**2))


def ensure_same_grid(a: SpectralField | PhysicalField, b: SpectralField | PhysicalField) -> Grid:
    if a.grid != b.grid:
        raise GridMismatchError(f"Grid mismatch: {a.grid!r} vs {b.grid!r}")
    return a.grid


def reflect(array: np.ndarray, grid: Grid) -> np.ndarray:
    """Return the array evaluated at -k for every lattice index k."""
    axes = grid.spatial_axes
    return np.roll(np.flip(array, axis=axes), 1, axis=axes)


# ---------------------------------------------------------------------------
# Transforms
# ---------------------------------------------------------------------------

def forward_fft(samples: np.ndarray, grid: Grid) -> np.ndarray:
    """Forward transform over the trailing lattice axes (any leading shape)."""
    return sfft.fftn(samples, axes=grid.spatial_axes, norm="forward")


def inverse_fft(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse transform over the trailing lattice axes; returns the real part."""
    return sfft.ifftn(coeffs, axes=grid.spatial_axes, norm="forward").real


def transform(f: PhysicalField, grid: Grid | None = None) -> SpectralField:
    if grid is not None and grid != f.grid:
        raise GridMismatchError(f"Field lives on {f.grid!r}, expected {grid!r}")
    return SpectralField(f.grid, forward_fft(f.samples, f.grid))


def inverse_transform(u: SpectralField, grid: Grid | None = None) -> PhysicalField:
    if grid is not None and grid != u.grid:
        raise GridMismatchError(f"Field lives on {u.grid!r}, expected {grid!r}")
    return PhysicalField(u.grid, inverse_fft(u.coeffs, u.grid))


# ---------------------------------------------------------------------------
# Multipliers
# ---------------------------------------------------------------------------

def lambda_multiplier(grid: Grid, s: float) -> np.ndarray:
    """Symbol |xi|**s of Lambda**s. For s > 0 the origin entry is 0; s = 0 is the identity."""
    if s < 0:
        raise ValueError(f"Multiplier order must be nonnegative, got {s}")
    if s == 0:
        return np.ones(grid.shape)
    return grid.k_magnitude**s


def fractional_multiplier(grid: Grid, alpha: float) -> np.ndarray:
    """Symbol |xi|**(2*alpha) of the fractional dissipation Lambda**(2*alpha)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    return lambda_multiplier(grid, 2.0 * alpha)


def cutoff_mask(grid: Grid, N: float) -> np.ndarray:
    """Boolean indicator of the ball |xi| <= N."""
    if N < 0:
        raise ValueError(f"Cutoff radius must be nonnegative, got {N}")
    return grid.k_magnitude <= N * (1.0 + RADIUS_SLACK)


def dealias_mask(grid: Grid) -> np.ndarray:
    """2/3-rule mask: True where every axis index satisfies |k_i| <= n // 3."""
    return _dealias_mask(grid)


@lru_cache(maxsize=16)
def _dealias_mask(grid: Grid) -> np.ndarray:
    mask = np.all(np.abs(grid.indices) <= grid.dealias_index, axis=0)
    mask.setflags(write=False)
    return mask


def apply_mask(u: SpectralField, mask: np.ndarray) -> SpectralField:
    return u.with_coeffs(np.where(mask, u.coeffs, 0.0))


def spectral_cutoff(u: SpectralField, N: float) -> SpectralField:
    """Galerkin cutoff J_N: zero every coefficient with |xi| > N."""
    return apply_mask(u, cutoff_mask(u.grid, N))


def leray_coeffs(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Project coefficients onto divergence-free fields; the mean mode is zeroed."""
    xi = grid.wavevectors
    k2 = grid.k_squared
    k2_safe = np.where(k2 > 0, k2, 1.0)
    projected = coeffs - xi * (np.sum(xi * coeffs, axis=0) / k2_safe)
    return np.where(k2 > 0, projected, 0.0)


def leray_project(u: SpectralField) -> SpectralField:
    return u.with_coeffs(leray_coeffs(u.coeffs, u.grid))


def inner(u: SpectralField, v: SpectralField) -> float:
    """L2 inner product <u, v> computed on the spectral side."""
    grid = ensure_same_grid(u, v)
    return float(grid.measure * np.sum(np.real(np.conj(u.coeffs) * v.coeffs)))
