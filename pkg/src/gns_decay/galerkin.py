"""Galerkin system  d/dt u_N + P J_N (u_N . grad u_N) + nu Lambda**(2 alpha) u_N = 0.

The nonlinear term is evaluated pseudo-spectrally with the 2/3 rule. Time
stepping is the integrating-factor Heun scheme, exact on the linear part:

    E = exp(-nu |xi|**(2 alpha) dt)
    predictor  u~  = E (u + dt H(u))
    corrector  u+  = E u + dt/2 (E H(u) + H(u~))
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterator
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_trapezoid

from gns_decay.models import SimParams
from gns_decay.spectral import (
    RADIUS_SLACK,
    Grid,
    SpectralField,
    cutoff_mask,
    dealias_mask,
    forward_fft,
    fractional_multiplier,
    inverse_fft,
    leray_coeffs,
)

logger = logging.getLogger(__name__)

RhsFunction = Callable[[SpectralField, SimParams], SpectralField]


class BlowUpError(RuntimeError):
    """Raised when a step produces NaN or Inf coefficients."""

    def __init__(self, last_time: float, step: int, message: str = "") -> None:
        self.last_time = last_time
        self.step = step
        super().__init__(message or f"Non-finite state after step {step} (last finite t={last_time})")


@dataclass(frozen=True)
class SimState:
    """Divergence-free, cutoff-compliant state at time t."""

    t: float
    u: SpectralField
    step: int = 0


@dataclass(frozen=True)
class EnergyBudget:
    """Discrete energy equality: kinetic(t) + dissipated(t) - kinetic(0) = defect(t)."""

    times: np.ndarray
    kinetic: np.ndarray
    dissipated: np.ndarray
    defect: np.ndarray

    def max_relative_defect(self) -> float:
        if self.kinetic[0] == 0:
            return float(np.abs(self.defect).max())
        return float(np.abs(self.defect).max() / self.kinetic[0])


def resolve_cutoff(grid: Grid, params: SimParams) -> float:
    """Galerkin radius N; defaults to the dealias radius and may not exceed it."""
    if params.cutoff_N is None:
        return grid.dealias_radius
    if params.cutoff_N > grid.dealias_radius * (1.0 + RADIUS_SLACK):
        raise ValueError(
            f"cutoff_N ({params.cutoff_N}) exceeds the dealias radius ({grid.dealias_radius})"
        )
    return params.cutoff_N


def _product_mask(grid: Grid, dealias: bool) -> np.ndarray | None:
    return dealias_mask(grid) if dealias else None


def velocity_gradients(u: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Physical velocity u_i and gradients d_j u_i, shapes (d, ...) and (d, d, ...)."""
    grid = u.grid
    xi = grid.wavevectors
    velocity = inverse_fft(u.coeffs, grid)
    gradients = inverse_fft(1j * xi[:, None] * u.coeffs[None, :], grid)
    return velocity, gradients


def convection(u: SpectralField, dealias: bool = True) -> np.ndarray:
    """Coefficients of (u . grad) u, with the 2/3 mask applied to the product."""
    velocity, gradients = velocity_gradients(u)
    product = np.einsum("j...,ji...->i...", velocity, gradients)
    coeffs = forward_fft(product, u.grid)
    mask = _product_mask(u.grid, dealias)
    if mask is not None:
        coeffs = np.where(mask, coeffs, 0.0)
    return coeffs


def nonlinear_rhs(u: SpectralField, params: SimParams) -> SpectralField:
    """-P J_N (u . grad u): divergence-free and supported in |xi| <= N."""
    grid = u.grid
    coeffs = convection(u, params.dealias)
    coeffs = np.where(cutoff_mask(grid, resolve_cutoff(grid, params)), coeffs, 0.0)
    return u.with_coeffs(-leray_coeffs(coeffs, grid))


def zero_rhs(u: SpectralField, params: SimParams) -> SpectralField:
    """Nonlinearity switched off; stepping then reproduces the heat semigroup."""
    return SpectralField.zeros(u.grid)


def pressure_from_velocity(u: SpectralField, dealias: bool = True) -> np.ndarray:
    """p_hat = -sum_ij xi_i xi_j (u_i u_j)^ / |xi|**2, zero mean."""
    grid = u.grid
    xi = grid.wavevectors
    velocity = inverse_fft(u.coeffs, grid)
    products = forward_fft(velocity[:, None] * velocity[None, :], grid)
    mask = _product_mask(grid, dealias)
    if mask is not None:
        products = np.where(mask, products, 0.0)
    k2 = grid.k_squared
    source = np.einsum("i...,j...,ij...->...", xi, xi, products)
    return np.where(k2 > 0, -source / np.where(k2 > 0, k2, 1.0), 0.0)


def nonlinear_fourier_term(u: SpectralField, dealias: bool = True) -> SpectralField:
    """H = -F(u . grad u) - F(grad p), without the Galerkin cutoff."""
    p_hat = pressure_from_velocity(u, dealias)
    h = -convection(u, dealias) - 1j * u.grid.wavevectors * p_hat
    return u.with_coeffs(h)


def add6_constant(u: SpectralField, dealias: bool = True) -> float:
    """max over xi != 0 of |H(xi)| / (|xi| ||u||_2**2); 0 for the zero field."""
    energy = u.energy()
    if energy == 0:
        return 0.0
    h = nonlinear_fourier_term(u, dealias).coeffs
    kmag = u.grid.k_magnitude
    nonzero = kmag > 0
    h_abs = np.sqrt(np.sum(np.abs(h) ** 2, axis=0))
    return float((h_abs[nonzero] / kmag[nonzero]).max() / energy)


def transfer_rate(u: SpectralField, params: SimParams) -> float:
    """Gross nonlinear exchange sum_xi L**d |Re(conj(u_hat) . H_N)|; its signed sum is zero."""
    h = nonlinear_rhs(u, params).coeffs
    per_mode = np.real(np.sum(np.conj(u.coeffs) * h, axis=0))
    return float(u.grid.measure * np.abs(per_mode).sum())


def dissipation_rate(u: SpectralField, params: SimParams) -> float:
    """2 nu ||Lambda**alpha u||_2**2."""
    weights = fractional_multiplier(u.grid, params.alpha)
    return float(2.0 * params.nu * np.sum(weights * u.mode_energy()))


@lru_cache(maxsize=8)
def integrating_factor(grid: Grid, alpha: float, nu: float, dt: float) -> np.ndarray:
    factor = np.exp(-nu * fractional_multiplier(grid, alpha) * dt)
    factor.setflags(write=False)
    return factor


def step(state: SimState, params: SimParams, rhs: RhsFunction = nonlinear_rhs) -> SimState:
    """Advance one dt with the integrating-factor Heun scheme."""
    u = state.u
    dt = params.dt
    E = integrating_factor(u.grid, params.alpha, params.nu, dt)

    h0 = rhs(u, params).coeffs
    predicted = E * (u.coeffs + dt * h0)
    h1 = rhs(u.with_coeffs(predicted), params).coeffs
    advanced = E * u.coeffs + 0.5 * dt * (E * h0 + h1)

    if not np.all(np.isfinite(advanced)):
        raise BlowUpError(last_time=state.t, step=state.step)
    return SimState(t=state.t + dt, u=u.with_coeffs(advanced), step=state.step + 1)


def integrate(
    state: SimState,
    params: SimParams,
    sample_every: int = 1,
    on_sample: Callable[[SimState], None] | None = None,
    rhs: RhsFunction = nonlinear_rhs,
) -> Iterator[SimState]:
    """Yield the initial state and every ``sample_every``-th state up to t_end.

    Time is stamped as t0 + k * dt so long runs do not accumulate drift.
    """
    if sample_every < 1:
        raise ValueError(f"sample_every must be >= 1, got {sample_every}")
    t0 = state.t
    n_steps = int(np.floor(params.t_end / params.dt + 1e-9))
    logger.debug("Integrating %d steps of dt=%g", n_steps, params.dt)

    if on_sample:
        on_sample(state)
    yield state
    current = state
    for k in range(1, n_steps + 1):
        current = replace(step(current, params, rhs), t=t0 + k * params.dt)
        if k % sample_every == 0:
            if on_sample:
                on_sample(current)
            yield current


def budget_from_rates(
    times: np.ndarray, kinetic: np.ndarray, rates: np.ndarray
) -> EnergyBudget:
    """Energy budget from sampled kinetic energies and dissipation rates (trapezoid rule)."""
    times = np.asarray(times, dtype=float)
    kinetic = np.asarray(kinetic, dtype=float)
    if times.size < 2:
        raise ValueError("Energy budget needs at least 2 samples")
    dissipated = cumulative_trapezoid(np.asarray(rates, dtype=float), times, initial=0.0)
    defect = kinetic + dissipated - kinetic[0]
    return EnergyBudget(times=times, kinetic=kinetic, dissipated=dissipated, defect=defect)


def energy_budget(states: list[SimState], params: SimParams) -> EnergyBudget:
    """Kinetic energy, dissipated energy and defect along uniformly spaced states."""
    if len(states) < 2:
        raise ValueError("Energy budget needs at least 2 states")
    times = np.array([s.t for s in states])
    spacing = np.diff(times)
    if not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        raise ValueError("Energy budget needs uniformly spaced states")
    kinetic = np.array([s.u.energy() for s in states])
    rates = np.array([dissipation_rate(s.u, params) for s in states])
    return budget_from_rates(times, kinetic, rates)
