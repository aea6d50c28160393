"""Heat oracle: exact fractional heat evolution and the predicted decay laws.

The linear equation v_t + nu * Lambda**(2 alpha) v = 0 is solved exactly per
mode. Its algebraic decay on a periodic box is only transient, so every fit
is judged against the window where the splitting radius still resolves
several lattice shells (see ``valid_window``).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np

from gns_decay.spectral import Grid, SpectralField, fractional_multiplier

logger = logging.getLogger(__name__)

CRITICAL_ALPHA = 1.25
_EPS = 1e-12


class Criticality(str, Enum):
    SUPERCRITICAL = "supercritical"
    CRITICAL = "critical"
    SUBCRITICAL = "subcritical"


@dataclass(frozen=True)
class CriticalityReport:
    regime: Criticality
    scaling_exponent: float


class DecayClaim(str, Enum):
    """Hypothesis sets under which a decay rate is asserted."""

    WEAK_L2_MODERATE = "weak-l2 decay, 0<alpha<=1, 1<=p<2"
    WEAK_L2_STRONG = "weak-l2 decay, 1<=alpha<5/4, 1/(3-2alpha)<=p<2"
    DERIVATIVE_L1 = "small-data derivative decay, 0<alpha<=1, p=1"
    DERIVATIVE_LP = "small-data derivative decay, 1<=alpha<5/4, 1/(3-2alpha)<=p<2"
    DERIVATIVE_WEAK_DISSIPATION = "derivative decay, 0<alpha<=1/2, p<=6/(4alpha+3)"
    DERIVATIVE_MODERATE_DISSIPATION = "derivative decay, 1/2<alpha<=1, p<=6/(4alpha+1)"
    SOBOLEV_SMALL_DATA = "small-data H^s decay"


# Preference order when several claims cover the same norm
_L2_CLAIMS = (DecayClaim.WEAK_L2_MODERATE, DecayClaim.WEAK_L2_STRONG)
_DERIVATIVE_CLAIMS = (
    DecayClaim.DERIVATIVE_L1,
    DecayClaim.DERIVATIVE_LP,
    DecayClaim.DERIVATIVE_WEAK_DISSIPATION,
    DecayClaim.DERIVATIVE_MODERATE_DISSIPATION,
)


def heat_evolve(u0: SpectralField, t: float, alpha: float, nu: float = 1.0) -> SpectralField:
    """Multiply every mode by exp(-nu |xi|**(2 alpha) t)."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    decay = np.exp(-nu * fractional_multiplier(u0.grid, alpha) * t)
    return u0.with_coeffs(u0.coeffs * decay)


def _check_p(p: float) -> None:
    if not 1.0 <= p <= 2.0:
        raise ValueError(f"Lebesgue exponent p must lie in [1, 2], got {p}")


def predicted_exponent(p: float, alpha: float, m: int = 0) -> float:
    """rho = (3/(2 alpha))(2/p - 1) + m/alpha, the decay exponent of the squared norm."""
    _check_p(p)
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if m < 0 or int(m) != m:
        raise ValueError(f"Derivative order must be a nonnegative integer, got {m}")
    return 3.0 / (2.0 * alpha) * (2.0 / p - 1.0) + m / alpha


def classify_criticality(alpha: float) -> CriticalityReport:
    """Energy-scaling regime; the scaling exponent is 4 alpha - 5."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if abs(alpha - CRITICAL_ALPHA) <= _EPS:
        regime = Criticality.CRITICAL
    elif alpha < CRITICAL_ALPHA:
        regime = Criticality.SUPERCRITICAL
    else:
        regime = Criticality.SUBCRITICAL
    return CriticalityReport(regime=regime, scaling_exponent=4.0 * alpha - 5.0)


def strong_band_p_min(alpha: float) -> float:
    """Smallest p covered when 1 <= alpha < 5/4."""
    return 1.0 / (3.0 - 2.0 * alpha)


def sobolev_threshold(alpha: float) -> float:
    """Smallest Sobolev index s = 5/2 - 2 alpha for the small-data H^s claims."""
    return 2.5 - 2.0 * alpha


def theorem_applicability(p: float, alpha: float) -> frozenset[DecayClaim]:
    """Every decay claim whose hypotheses the pair (p, alpha) satisfies."""
    _check_p(p)
    claims: set[DecayClaim] = set()
    moderate = 0.0 < alpha <= 1.0 + _EPS
    strong = 1.0 - _EPS <= alpha < CRITICAL_ALPHA - _EPS
    below_two = p < 2.0 - _EPS

    if moderate and below_two:
        claims.add(DecayClaim.WEAK_L2_MODERATE)
        claims.add(DecayClaim.SOBOLEV_SMALL_DATA)
    if strong and below_two and p >= strong_band_p_min(alpha) - _EPS:
        claims.add(DecayClaim.WEAK_L2_STRONG)
        claims.add(DecayClaim.DERIVATIVE_LP)
        claims.add(DecayClaim.SOBOLEV_SMALL_DATA)
    if moderate and abs(p - 1.0) <= _EPS:
        claims.add(DecayClaim.DERIVATIVE_L1)
    if alpha <= 0.5 + _EPS and p <= 6.0 / (4.0 * alpha + 3.0) + _EPS:
        claims.add(DecayClaim.DERIVATIVE_WEAK_DISSIPATION)
    if 0.5 + _EPS < alpha <= 1.0 + _EPS and p <= 6.0 / (4.0 * alpha + 1.0) + _EPS:
        claims.add(DecayClaim.DERIVATIVE_MODERATE_DISSIPATION)
    return frozenset(claims)


def governing_claim(
    p: float,
    alpha: float,
    m: int = 0,
    *,
    sobolev: bool = False,
    s: float | None = None,
) -> DecayClaim | None:
    """The claim a verdict on the m-th derivative norm (or the H^s norm) is judged under.

    The H^s claim also needs s >= 5/2 - 2 alpha; pass the index as ``s``.
    """
    claims = theorem_applicability(p, alpha)
    if sobolev:
        if s is not None and s < sobolev_threshold(alpha) - _EPS:
            return None
        return DecayClaim.SOBOLEV_SMALL_DATA if DecayClaim.SOBOLEV_SMALL_DATA in claims else None
    candidates = _L2_CLAIMS if m == 0 else _DERIVATIVE_CLAIMS
    for claim in candidates:
        if claim in claims:
            return claim
    return None


def valid_window(
    grid: Grid,
    gamma: float,
    alpha: float,
    nu: float = 1.0,
    xi_top: float | None = None,
    resolve_shells: float = 4.0,
) -> tuple[float, float] | None:
    """Times where resolve_shells * k_min <= g(nu t) <= xi_top.

    Below the window the splitting ball still reaches past the resolved
    spectrum; above it the ball holds too few lattice shells and the box's
    exponential decay takes over. Returns None when the range is empty.
    """
    if xi_top is None:
        xi_top = grid.dealias_radius
    scale = 1.0 / nu if nu > 0 else np.inf
    t_hi = (gamma / (resolve_shells * grid.k_min) ** (2.0 * alpha) - 1.0) * scale
    t_lo = max(0.0, (gamma / xi_top ** (2.0 * alpha) - 1.0) * scale)
    if not np.isfinite(t_hi) or t_hi <= t_lo:
        logger.debug("Empty valid window: lo=%g hi=%g", t_lo, t_hi)
        return None
    return (t_lo, float(t_hi))
