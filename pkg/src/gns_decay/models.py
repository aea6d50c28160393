"""Pydantic models for run configuration and verification records.

A run config is UTF-8 JSON, for example::

    {
        "schema_version": 1,
        "name": "flagship",
        "grid": {"n": 32, "box_length": 628.3185307179587},
        "params": {"alpha": 1.0, "dt": 0.5, "t_end": 1900.0, "amplitude": 1e-05},
        "initial_data": {"kind": "spectrum", "sigma": 0.0, "xi_knee": 0.1, "seed": 7},
        "sampling": {"every": 2},
        "m_list": [1]
    }
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Annotated, Literal

from pydantic import BaseModel, Field, field_validator, model_validator

from gns_decay.spectral import RADIUS_SLACK, Grid

SCHEMA_VERSION = 1

# alpha above this is outside every decay statement the lab checks
ALPHA_MAX = 1.25


class SimParams(BaseModel):
    """Physical and numerical parameters of one trajectory."""

    model_config = {"frozen": True}

    alpha: float = Field(gt=0.0, le=ALPHA_MAX, description="Dissipation exponent")
    nu: float = Field(default=1.0, ge=0.0, description="Viscosity")
    dt: float = Field(gt=0.0, description="Time step (first sample time for heat runs)")
    t_end: float = Field(gt=0.0, description="Horizon")
    cutoff_N: float | None = Field(
        default=None, ge=0.0, description="Galerkin radius; None means the dealias radius"
    )
    gamma: float = Field(default=3.0, gt=0.0, description="Fourier-splitting constant")
    amplitude: float = Field(default=1.0, gt=0.0, description="Initial-data scale epsilon")
    dealias: bool = True

    @model_validator(mode="after")
    def check_horizon(self) -> SimParams:
        if self.t_end < self.dt:
            raise ValueError(f"t_end ({self.t_end}) must be at least dt ({self.dt})")
        return self


class SpectrumSpec(BaseModel):
    """Designer spectrum |u0_hat(xi)| ~ |xi|**sigma up to the knee."""

    model_config = {"frozen": True}

    kind: Literal["spectrum"] = "spectrum"
    sigma: float = Field(gt=-1.5, description="Low-frequency exponent")
    xi_knee: float = Field(gt=0.0, description="Transition wavenumber")
    high_decay: float | None = Field(
        default=None, gt=0.0, description="Power rolloff beyond the knee; None caps the support"
    )
    amplitude: float = Field(default=1.0, gt=0.0)
    seed: int = Field(default=0, ge=0, lt=2**64)
    origin_compensation: bool = True


class TaylorGreenSpec(BaseModel):
    """Taylor-Green vortex on the lowest lattice shell."""

    model_config = {"frozen": True}

    kind: Literal["taylor_green"] = "taylor_green"
    amplitude: float = Field(default=1.0, gt=0.0)


InitialData = Annotated[SpectrumSpec | TaylorGreenSpec, Field(discriminator="kind")]


class Sampling(BaseModel):
    model_config = {"frozen": True}

    every: int = Field(default=1, ge=1, description="Steps between recorded samples")
    heat_points: int = Field(default=129, ge=9, description="Sample count for heat runs")


class WindowSettings(BaseModel):
    model_config = {"frozen": True}

    resolve_shells: float = Field(default=4.0, gt=0.0)
    fit_window: tuple[float, float] | None = None

    @field_validator("fit_window")
    @classmethod
    def validate_window(cls, v: tuple[float, float] | None) -> tuple[float, float] | None:
        if v is not None and not 0.0 <= v[0] < v[1]:
            raise ValueError(f"fit_window must satisfy 0 <= lo < hi, got {v}")
        return v


class Tolerances(BaseModel):
    model_config = {"frozen": True}

    l2: float = Field(default=0.10, gt=0.0)
    derivative_gap: float = Field(default=0.15, gt=0.0)


class RunConfig(BaseModel):
    """Everything needed to reproduce one run."""

    model_config = {"frozen": True}

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "run"
    grid: Grid
    params: SimParams
    initial_data: InitialData
    sampling: Sampling = Field(default_factory=Sampling)
    m_list: list[int] = Field(default_factory=lambda: [1, 2])
    lebesgue_p: float | None = Field(default=None, ge=1.0, le=2.0)
    sobolev_s: float | None = Field(default=None, gt=0.0)
    output_dir: Path | None = None
    snapshot_every: int | None = Field(default=None, ge=1)
    window: WindowSettings = Field(default_factory=WindowSettings)
    tolerances: Tolerances = Field(default_factory=Tolerances)

    @field_validator("m_list")
    @classmethod
    def validate_m_list(cls, v: list[int]) -> list[int]:
        if any(m < 1 for m in v):
            raise ValueError(f"m_list entries must be >= 1, got {v}")
        return sorted(set(v))

    @model_validator(mode="after")
    def check_consistency(self) -> RunConfig:
        cutoff = self.params.cutoff_N
        if cutoff is not None and cutoff > self.grid.dealias_radius * (1.0 + RADIUS_SLACK):
            raise ValueError(
                f"cutoff_N ({cutoff}) exceeds the dealias radius "
                f"({self.grid.dealias_radius}) of the grid"
            )
        if isinstance(self.initial_data, TaylorGreenSpec) and self.grid.dim != 3:
            raise ValueError("taylor_green initial data needs a 3D grid")
        return self

    def resolved_p(self) -> float | None:
        """Lebesgue exponent the verdicts use: explicit, else recovered from sigma."""
        if self.lebesgue_p is not None:
            return self.lebesgue_p
        from gns_decay.initial_data import p_for_sigma

        if isinstance(self.initial_data, SpectrumSpec):
            try:
                return p_for_sigma(self.initial_data.sigma)
            except ValueError:
                return None
        return None

    def resolved_cutoff(self) -> float:
        if self.params.cutoff_N is None:
            return self.grid.dealias_radius
        return self.params.cutoff_N


# ---------------------------------------------------------------------------
# Verification records
# ---------------------------------------------------------------------------

class VerdictStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    NO_CLAIM = "no-claim"
    INAPPLICABLE = "inapplicable"
    INVALID_WINDOW = "invalid-window"


class DecayFit(BaseModel):
    """Least-squares power law ||.||**2 ~ c (t+1)**-rho."""

    which: str
    exponent: float
    intercept: float
    r_squared: float = Field(ge=0.0, le=1.0)
    window: tuple[float, float]
    samples: int
    valid: bool


class Verdict(BaseModel):
    """Comparison of a fitted exponent (or gap) with its predicted value.

    ``applicable`` is false when no claim's hypotheses cover the run; the
    comparison is still made and reported but never fails the run.
    """

    kind: Literal["exponent", "gap"] = "exponent"
    which: str
    p: float | None
    alpha: float
    m: int
    predicted: float | None
    fitted: float | None
    deviation: float | None = None
    tolerance: float
    status: VerdictStatus
    claim: str | None
    applicable: bool = True
    regime: str
    window_valid: bool
    note: str | None = None

    @property
    def failed(self) -> bool:
        return self.applicable and self.status in (VerdictStatus.FAIL, VerdictStatus.INVALID_WINDOW)


class BoundReport(BaseModel):
    """Result of checking |u_hat(t)| <= C (|u0_hat| + |xi|**(1-2 alpha))."""

    c_star: float
    worst_wavenumber: float
    violations: int
    modes_checked: int


class SweepRow(BaseModel):
    axis: str
    value: float
    p: float | None
    alpha: float | None
    m: int
    predicted: float | None
    fitted: float | None
    deviation: float | None
    window_valid: bool
    claim: str | None
    applicable: bool = True
    regime: str
    status: str
    error: str | None = None
