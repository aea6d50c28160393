"""Decay measurement: norm series, Fourier-splitting shells, bound checks and fits.

All fits target squared norms, ||.||**2 ~ c (t+1)**-rho, by ordinary least
squares on log(value) against log(t+1).
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.stats import linregress

from gns_decay.galerkin import SimState, dissipation_rate
from gns_decay.heat import (
    classify_criticality,
    governing_claim,
    predicted_exponent,
    sobolev_threshold,
)
from gns_decay.models import BoundReport, DecayFit, SimParams, Verdict, VerdictStatus
from gns_decay.spectral import (
    Grid,
    SpectralField,
    cutoff_mask,
    ensure_same_grid,
    fractional_multiplier,
    lambda_multiplier,
)

logger = logging.getLogger(__name__)

MIN_FIT_SAMPLES = 8
_WINDOW_SLACK = 1e-9


class FitError(ValueError):
    """Raised when a series cannot be fitted (too few samples, nonpositive values)."""


@dataclass
class NormSeries:
    """Sampled norms of one trajectory (or of its heat-oracle evolution)."""

    times: np.ndarray
    l2_sq: np.ndarray
    diss_integral: np.ndarray
    shell_energy: np.ndarray
    g_t: np.ndarray
    deriv_sq: dict[int, np.ndarray] = field(default_factory=dict)
    hs_sq: np.ndarray | None = None
    valid_window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or self.times.size == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if self.times.size > 1 and np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, values in self._columns():
            if values.shape != self.times.shape:
                raise ValueError(f"{name} has {values.shape[0]} samples, expected {self.times.size}")
            if not np.all(np.isfinite(values)):
                raise ValueError(f"{name} contains non-finite values")
            if np.any(values < 0):
                raise ValueError(f"{name} contains negative values")

    def _columns(self) -> list[tuple[str, np.ndarray]]:
        cols = [
            ("times", self.times),
            ("l2_sq", self.l2_sq),
            ("diss_integral", self.diss_integral),
            ("shell_energy", self.shell_energy),
            ("g_t", self.g_t),
        ]
        cols += [(f"deriv{m}_sq", v) for m, v in sorted(self.deriv_sq.items())]
        if self.hs_sq is not None:
            cols.append(("hs_sq", self.hs_sq))
        return cols

    def select(self, which: str) -> np.ndarray:
        """Column by name: ``l2_sq``, ``deriv{m}_sq``, ``hs_sq``, ``shell_energy``..."""
        for name, values in self._columns():
            if name == which:
                return values
        raise KeyError(f"Unknown norm selector: {which!r}")


# ---------------------------------------------------------------------------
# Fourier splitting
# ---------------------------------------------------------------------------

def splitting_radius(t: float | np.ndarray, gamma: float, alpha: float) -> float | np.ndarray:
    """g(t) = (gamma / (t + 1))**(1 / (2 alpha))."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("t must be nonnegative")
    g = (gamma / (t_arr + 1.0)) ** (1.0 / (2.0 * alpha))
    return float(g) if g.ndim == 0 else g


def shell_energy(u: SpectralField, radius: float) -> float:
    """Weighted sum of |u_hat|**2 over the ball |xi| <= radius."""
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    return float(u.mode_energy()[cutoff_mask(u.grid, radius)].sum())


def _derivative_norm(mode_energy: np.ndarray, grid: Grid, m: float) -> float:
    return float(np.sum(lambda_multiplier(grid, 2.0 * m) * mode_energy))


# ---------------------------------------------------------------------------
# Series construction
# ---------------------------------------------------------------------------

class SeriesBuilder:
    """Accumulates the norms of states one sample at a time; states are not kept."""

    def __init__(
        self, m_list: Sequence[int], params: SimParams, sobolev_s: float | None = None
    ) -> None:
        self.m_list = list(m_list)
        self.params = params
        self.sobolev_s = sobolev_s
        self.times: list[float] = []
        self.l2: list[float] = []
        self.shells: list[float] = []
        self.g_t: list[float] = []
        self.rates: list[float] = []
        self.derivs: dict[int, list[float]] = {m: [] for m in self.m_list}
        self.hs: list[float] = []

    def add(self, state: SimState) -> None:
        grid = state.u.grid
        g = splitting_radius(state.t, self.params.gamma, self.params.alpha)
        energy = state.u.mode_energy()
        self.times.append(float(state.t))
        self.l2.append(float(energy.sum()))
        self.shells.append(float(energy[cutoff_mask(grid, g)].sum()))
        self.g_t.append(g)
        self.rates.append(dissipation_rate(state.u, self.params))
        for m in self.m_list:
            self.derivs[m].append(_derivative_norm(energy, grid, m))
        if self.sobolev_s is not None:
            self.hs.append(self.l2[-1] + _derivative_norm(energy, grid, self.sobolev_s))

    def build(self, valid: tuple[float, float] | None = None) -> NormSeries:
        if not self.times:
            raise ValueError("No samples recorded")
        times = np.array(self.times)
        if times.size > 1:
            diss = cumulative_trapezoid(self.rates, times, initial=0.0)
        else:
            diss = np.zeros(1)
        return NormSeries(
            times=times,
            l2_sq=np.array(self.l2),
            diss_integral=diss,
            shell_energy=np.array(self.shells),
            g_t=np.array(self.g_t),
            deriv_sq={m: np.array(v) for m, v in self.derivs.items()},
            hs_sq=np.array(self.hs) if self.sobolev_s is not None else None,
            valid_window=valid,
        )


def derivative_series(
    trajectory: Sequence[SimState],
    m_list: Sequence[int],
    params: SimParams,
    sobolev_s: float | None = None,
    valid: tuple[float, float] | None = None,
) -> NormSeries:
    """Norm series of stored states; ||Lambda**m u||_2**2 via the multiplier |xi|**m."""
    if not trajectory:
        raise ValueError("trajectory is empty")
    builder = SeriesBuilder(m_list, params, sobolev_s)
    for state in trajectory:
        builder.add(state)
    return builder.build(valid)


def oracle_series(
    u0: SpectralField,
    times: np.ndarray,
    params: SimParams,
    m_list: Sequence[int],
    sobolev_s: float | None = None,
    valid: tuple[float, float] | None = None,
) -> NormSeries:
    """Norm series of the heat evolution of u0, from per-mode energies (no fields built).

    The dissipated energy is exact: ||u0||**2 - ||v(t)||**2.
    """
    times = np.asarray(times, dtype=float)
    if np.any(times < 0):
        raise ValueError("times must be nonnegative")
    grid = u0.grid
    energy0 = u0.mode_energy()
    support = energy0 > 0
    w0 = energy0[support]
    kmag = grid.k_magnitude[support]
    rate = 2.0 * params.nu * fractional_multiplier(grid, params.alpha)[support]
    g_t = np.atleast_1d(splitting_radius(times, params.gamma, params.alpha))

    l2 = np.empty(times.size)
    shells = np.empty(times.size)
    derivs = {m: np.empty(times.size) for m in m_list}
    hs = np.empty(times.size) if sobolev_s is not None else None
    for i, t in enumerate(times):
        w = w0 * np.exp(-rate * t)
        l2[i] = w.sum()
        shells[i] = w[kmag <= g_t[i] * (1.0 + 1e-12)].sum()
        for m in m_list:
            derivs[m][i] = np.sum(kmag ** (2.0 * m) * w)
        if hs is not None:
            hs[i] = l2[i] + np.sum(kmag ** (2.0 * sobolev_s) * w)

    return NormSeries(
        times=times,
        l2_sq=l2,
        diss_integral=np.maximum(w0.sum() - l2, 0.0),
        shell_energy=shells,
        g_t=g_t,
        deriv_sq=derivs,
        hs_sq=hs,
        valid_window=valid,
    )


# ---------------------------------------------------------------------------
# Bound checks
# ---------------------------------------------------------------------------

def spectral_bound_check(u_t: SpectralField, u0: SpectralField, alpha: float) -> BoundReport:
    """C* = max over xi != 0 of |u_hat(t)| / (|u0_hat| + |xi|**(1 - 2 alpha))."""
    grid = ensure_same_grid(u_t, u0)
    kmag = grid.k_magnitude
    nonzero = kmag > 0
    amp_t = np.sqrt(np.sum(np.abs(u_t.coeffs) ** 2, axis=0))[nonzero]
    amp_0 = np.sqrt(np.sum(np.abs(u0.coeffs) ** 2, axis=0))[nonzero]
    envelope = amp_0 + kmag[nonzero] ** (1.0 - 2.0 * alpha)
    ratio = amp_t / envelope
    worst = int(np.argmax(ratio))
    return BoundReport(
        c_star=float(ratio[worst]),
        worst_wavenumber=float(kmag[nonzero][worst]),
        violations=int(np.count_nonzero(ratio > 1.0)),
        modes_checked=int(ratio.size),
    )


def bound_trend(times: np.ndarray, c_star: np.ndarray) -> float:
    """Ratio of the last-decade maximum of C* to its first-decade maximum, in t + 1.

    Series spanning less than a decade are split into halves in log(t + 1).
    """
    t1 = np.asarray(times, dtype=float) + 1.0
    c = np.asarray(c_star, dtype=float)
    if t1.size < 2:
        raise ValueError("bound_trend needs at least 2 samples")
    start, end = t1[0], t1[-1]
    if end / start >= 10.0:
        first = t1 <= 10.0 * start
        last = t1 >= end / 10.0
    else:
        mid = np.sqrt(start * end)
        first = t1 <= mid
        last = t1 >= mid
    head = c[first].max()
    if head == 0:
        return 0.0 if c[last].max() == 0 else float("inf")
    return float(c[last].max() / head)


def splitting_inequality_margin(series: NormSeries, alpha: float, nu: float = 1.0) -> float:
    """Worst excess of d/dt||u||**2 over -nu g**(2 alpha) (||u||**2 - shell energy).

    The excess is normalized by nu g**(2 alpha) ||u||**2; a nonpositive result
    means the inequality holds at every interior sample.
    """
    if series.times.size < 3:
        raise ValueError("splitting_inequality_margin needs at least 3 samples")
    d_energy = np.gradient(series.l2_sq, series.times)
    g2a = series.g_t ** (2.0 * alpha)
    bound = -nu * g2a * (series.l2_sq - series.shell_energy)
    scale = nu * g2a * series.l2_sq
    interior = slice(1, -1)
    excess = (d_energy - bound)[interior]
    norm = scale[interior]
    usable = norm > 0
    if not np.any(usable):
        return 0.0
    return float((excess[usable] / norm[usable]).max())


# ---------------------------------------------------------------------------
# Fitting and verdicts
# ---------------------------------------------------------------------------

def _inside(window: tuple[float, float], outer: tuple[float, float] | None) -> bool:
    if outer is None:
        return False
    lo, hi = outer
    return window[0] >= lo * (1.0 - _WINDOW_SLACK) and window[1] <= hi * (1.0 + _WINDOW_SLACK)


def fit_decay_exponent(
    series: NormSeries,
    which: str = "l2_sq",
    window: tuple[float, float] | None = None,
) -> DecayFit:
    """Least-squares rho in value ~ c (t+1)**-rho over the window (default: valid window)."""
    values = series.select(which)
    times = series.times
    if window is None:
        window = series.valid_window or (float(times[0]), float(times[-1]))
    lo, hi = window
    in_window = (times >= lo * (1.0 - _WINDOW_SLACK)) & (times <= hi * (1.0 + _WINDOW_SLACK))
    count = int(in_window.sum())
    if count < MIN_FIT_SAMPLES:
        raise FitError(f"{which}: {count} samples in window [{lo:g}, {hi:g}], need {MIN_FIT_SAMPLES}")
    t = times[in_window]
    y = values[in_window]
    if np.any(y <= 0):
        raise FitError(f"{which}: nonpositive values in window")

    result = linregress(np.log1p(t), np.log(y))
    used = (float(t[0]), float(t[-1]))
    fit = DecayFit(
        which=which,
        exponent=float(-result.slope),
        intercept=float(np.exp(result.intercept)),
        r_squared=float(np.clip(result.rvalue**2, 0.0, 1.0)),
        window=used,
        samples=count,
        valid=_inside(used, series.valid_window),
    )
    logger.debug("Fit %s: rho=%.6g r2=%.6g over %s", which, fit.exponent, fit.r_squared, used)
    return fit


def _judge(fitted: float, predicted: float, tolerance: float, valid: bool) -> tuple[float, VerdictStatus]:
    deviation = abs(fitted - predicted) / abs(predicted)
    if not valid:
        return deviation, VerdictStatus.INVALID_WINDOW
    status = VerdictStatus.PASS if deviation <= tolerance else VerdictStatus.FAIL
    return deviation, status


def compare_to_theory(
    fit: DecayFit,
    p: float,
    alpha: float,
    m: int = 0,
    tolerance: float = 0.10,
    *,
    sobolev: bool = False,
    s: float | None = None,
) -> Verdict:
    """Judge a fitted exponent against the predicted squared-norm rate.

    H^s fits (``sobolev=True``, index ``s``) are judged against the L2 rate
    (m = 0). When no claim covers the run the comparison is still made and
    the verdict is marked not applicable.
    """
    predicted = predicted_exponent(p, alpha, 0 if sobolev else m)
    claim = governing_claim(p, alpha, m, sobolev=sobolev, s=s)
    regime = classify_criticality(alpha).regime.value
    deviation = None
    note = None
    if predicted == 0:
        status = VerdictStatus.NO_CLAIM
    else:
        deviation, status = _judge(fit.exponent, predicted, tolerance, fit.valid)
    if claim is None:
        if sobolev and governing_claim(p, alpha, m, sobolev=True) is not None:
            note = f"s={s:g} is below 5/2 - 2 alpha = {sobolev_threshold(alpha):g}"
        else:
            note = f"no claim covers p={p:g}, alpha={alpha:g}, m={m}"
    return Verdict(
        kind="exponent",
        which=fit.which,
        p=p,
        alpha=alpha,
        m=m,
        predicted=predicted,
        fitted=fit.exponent,
        deviation=deviation,
        tolerance=tolerance,
        status=status,
        claim=claim.value if claim else None,
        applicable=claim is not None,
        regime=regime,
        window_valid=fit.valid,
        note=note,
    )


def compare_gap(
    fit_m: DecayFit,
    fit_0: DecayFit,
    alpha: float,
    m: int,
    tolerance: float = 0.15,
    p: float | None = None,
) -> Verdict:
    """Derivative boost: fitted rho_m - rho_0 against m / alpha.

    Without a Lebesgue exponent the gap is judged on its own; with one, it
    is marked not applicable when no derivative claim covers (p, alpha).
    """
    predicted = m / alpha
    claim = governing_claim(p, alpha, m) if p is not None else None
    applicable = p is None or claim is not None
    valid = fit_m.valid and fit_0.valid
    fitted = fit_m.exponent - fit_0.exponent
    deviation, status = _judge(fitted, predicted, tolerance, valid)
    return Verdict(
        kind="gap",
        which=f"{fit_m.which}-{fit_0.which}",
        p=p,
        alpha=alpha,
        m=m,
        predicted=predicted,
        fitted=fitted,
        deviation=deviation,
        tolerance=tolerance,
        status=status,
        claim=claim.value if claim else None,
        applicable=applicable,
        regime=classify_criticality(alpha).regime.value,
        window_valid=valid,
        note=None if applicable else f"no claim covers p={p:g}, alpha={alpha:g}, m={m}",
    )
