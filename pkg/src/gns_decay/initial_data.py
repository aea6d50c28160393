"""Divergence-free initial fields.

Membership u0 in L^p is emulated through the low-frequency spectral profile
|u0_hat(xi)| ~ |xi|**sigma with sigma = 3/p - 3, which gives the shell mass
law  sum_{|xi|<=r} |u0_hat|**2 ~ r**(2 sigma + 3).

Random fields use ``numpy.random.Philox``, a counter-based generator, so a
given seed reproduces the same field bit for bit on every platform.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.special import gamma as gamma_fn
from scipy.special import gammaincc

from gns_decay.models import SpectrumSpec, TaylorGreenSpec
from gns_decay.spectral import (
    RADIUS_SLACK,
    Grid,
    SpectralField,
    forward_fft,
    leray_coeffs,
    reflect,
)

logger = logging.getLogger(__name__)

# Lattice range for the Ewald sums; terms beyond decay like exp(-pi * 25)
_EWALD_RANGE = 5


def sigma_for_p(p: float) -> float:
    """sigma = 3/p - 3; p = 1 gives a flat spectrum."""
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"Lebesgue exponent p must lie in [1, 2], got {p}")
    return 3.0 / p - 3.0


def p_for_sigma(sigma: float) -> float:
    """Inverse of ``sigma_for_p``."""
    if not -1.5 <= sigma <= 0.0:
        raise ValueError(f"sigma must lie in [-3/2, 0] to map onto p in [1, 2], got {sigma}")
    return 3.0 / (sigma + 3.0)


def lattice_origin_constant(sigma: float, dim: int = 3) -> float:
    """Analytically continued lattice sum Z(s) = sum'_{k in Z^d} |k|**-s with s = -2 sigma.

    Z(s) is the constant offset between the lattice sum of |k|**(2 sigma) over
    a ball and the continuum integral over the same ball. It is evaluated with
    the Ewald split into two rapidly converging incomplete-gamma series.
    """
    s = -2.0 * sigma
    if not 0.0 <= s < dim:
        raise ValueError(f"sigma must lie in (-{dim}/2, 0], got {sigma}")
    if s == 0.0:
        return -1.0

    r = _EWALD_RANGE
    ks = np.indices((2 * r + 1,) * dim).reshape(dim, -1) - r
    q = np.pi * np.sum(ks**2, axis=0).astype(float)
    q = q[q > 0]
    a = s / 2.0
    b = (dim - s) / 2.0
    terms = gammaincc(a, q) * gamma_fn(a) * q**-a + gammaincc(b, q) * gamma_fn(b) * q**-b
    total = -2.0 / s - 2.0 / (dim - s) + float(terms.sum())
    return float(total * np.pi**a / gamma_fn(a))


def _origin_compensation(grid: Grid, sigma: float) -> np.ndarray:
    """Extra squared amplitude on the innermost shell cancelling the lattice offset."""
    extra = np.zeros(grid.shape)
    if sigma > 0:
        return extra
    first_shell = np.sum(grid.indices**2, axis=0) == 1
    z = lattice_origin_constant(sigma, grid.dim)
    extra[first_shell] = -z * grid.k_min ** (2.0 * sigma) / first_shell.sum()
    return extra


def spectrum_profile(grid: Grid, spec: SpectrumSpec) -> np.ndarray:
    """Squared per-mode amplitude |xi|**(2 sigma) * rolloff(|xi|)**2; zero at the origin."""
    kmag = grid.k_magnitude
    nonzero = kmag > 0
    amp2 = np.zeros(grid.shape)
    amp2[nonzero] = kmag[nonzero] ** (2.0 * spec.sigma)

    if spec.high_decay is None:
        support = kmag <= spec.xi_knee * (1.0 + RADIUS_SLACK)
    else:
        support = np.ones(grid.shape, dtype=bool)
        beyond = kmag > spec.xi_knee * (1.0 + RADIUS_SLACK)
        amp2[beyond] *= (kmag[beyond] / spec.xi_knee) ** (-2.0 * spec.high_decay)

    if spec.origin_compensation and spec.xi_knee >= grid.k_min * (1.0 - RADIUS_SLACK):
        amp2 = np.maximum(amp2 + _origin_compensation(grid, spec.sigma), 0.0)
    return np.where(support, amp2, 0.0)


def hermitian_symmetrize(coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """(c(xi) + conj(c(-xi))) / 2, exactly Hermitian."""
    return 0.5 * (coeffs + np.conj(reflect(coeffs, grid)))


def random_divfree_field(grid: Grid, spec: SpectrumSpec) -> SpectralField:
    """Random solenoidal field with the designer amplitude profile.

    Each mode carries a random unit complex vector orthogonal to xi, scaled by
    |xi|**sigma * rolloff. The amplitude is applied last, so scaling it by a
    power of two scales every coefficient exactly.
    """
    rng = np.random.Generator(np.random.Philox(spec.seed))
    noise = rng.standard_normal(grid.field_shape)
    coeffs = leray_coeffs(forward_fft(noise, grid), grid)

    magnitude = np.sqrt(np.sum(np.abs(coeffs) ** 2, axis=0))
    unit = np.where(magnitude > 0, coeffs / np.where(magnitude > 0, magnitude, 1.0), 0.0)
    shaped = unit * np.sqrt(spectrum_profile(grid, spec))
    coeffs = hermitian_symmetrize(leray_coeffs(shaped, grid), grid) * spec.amplitude

    logger.debug(
        "Designer field: sigma=%g knee=%g seed=%d modes=%d",
        spec.sigma, spec.xi_knee, spec.seed, int(np.count_nonzero(np.any(coeffs != 0, axis=0))),
    )
    return SpectralField(grid, coeffs)


def taylor_green_field(grid: Grid, amplitude: float = 1.0) -> SpectralField:
    """u = A (sin x cos y cos z, -cos x sin y cos z, 0) on the lowest lattice shell.

    Coordinates are scaled by 2 pi / L so the field is periodic on any box;
    on L = 2 pi this is the classical vortex. Built directly in spectral space,
    so the support is exactly the eight modes (+-1, +-1, +-1).
    """
    if grid.dim != 3:
        raise ValueError("Taylor-Green field needs a 3D grid")
    coeffs = np.zeros(grid.field_shape, dtype=np.complex128)
    n = grid.n
    for s1 in (-1, 1):
        for s2 in (-1, 1):
            for s3 in (-1, 1):
                idx = (s1 % n, s2 % n, s3 % n)
                coeffs[(0, *idx)] = -1j * s1 * amplitude / 8.0
                coeffs[(1, *idx)] = 1j * s2 * amplitude / 8.0
    return SpectralField(grid, coeffs)


def build_initial_field(
    grid: Grid, spec: SpectrumSpec | TaylorGreenSpec, scale: float = 1.0
) -> SpectralField:
    """Field described by a config entry, multiplied by the run's amplitude knob."""
    if isinstance(spec, TaylorGreenSpec):
        field = taylor_green_field(grid, spec.amplitude)
    else:
        field = random_divfree_field(grid, spec)
    if scale == 1.0:
        return field
    return field.with_coeffs(field.coeffs * scale)
