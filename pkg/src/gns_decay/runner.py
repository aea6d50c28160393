"""Orchestrator for simulate and heat runs.

A run resolves its config, builds the initial field, produces a norm series
(time stepping or exact heat evolution), fits decay exponents, judges them,
and writes every artifact into the run's own directory.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft as sfft

from gns_decay.config import Settings, save_run_config
from gns_decay.decay import (
    FitError,
    NormSeries,
    SeriesBuilder,
    bound_trend,
    compare_gap,
    compare_to_theory,
    fit_decay_exponent,
    oracle_series,
    spectral_bound_check,
    splitting_inequality_margin,
)
from gns_decay.export import export_series, write_json
from gns_decay.galerkin import (
    BlowUpError,
    SimState,
    add6_constant,
    budget_from_rates,
    integrate,
    resolve_cutoff,
    transfer_rate,
)
from gns_decay.heat import classify_criticality, governing_claim, valid_window
from gns_decay.initial_data import build_initial_field
from gns_decay.models import (
    DecayFit,
    RunConfig,
    SpectrumSpec,
    Verdict,
    VerdictStatus,
)
from gns_decay.snapshot import write_snapshot
from gns_decay.spectral import SpectralField, leray_project, spectral_cutoff
from gns_decay.summary import RunSummary, oracle_deviation, transfer_ratio

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERDICT_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_BLOWUP = 3


class RunProgress:
    """Tracks progress of a single run."""

    def __init__(self, total_steps: int = 0) -> None:
        self.total_steps = total_steps
        self.completed_steps = 0
        self.samples = 0

        # Callbacks
        self.on_start: Callable[[int], None] | None = None
        self.on_sample: Callable[[float, int], None] | None = None


@dataclass
class RunOutcome:
    run_dir: Path
    series: NormSeries | None = None
    fits: list[DecayFit] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    summary: RunSummary | None = None
    failure: dict | None = None

    @property
    def exit_code(self) -> int:
        if self.failure is not None:
            return EXIT_BLOWUP
        if any(v.failed for v in self.verdicts):
            return EXIT_VERDICT_FAILED
        return EXIT_OK


def resolve_run_dir(config: RunConfig, settings: Settings | None = None) -> Path:
    if config.output_dir is not None:
        return Path(config.output_dir)
    root = settings.out_dir if settings else Path("runs")
    return root / config.name


def initial_state(config: RunConfig, *, galerkin: bool = True) -> SimState:
    """u0 = P J_N (amplitude * field); heat runs skip the cutoff."""
    u0 = build_initial_field(config.grid, config.initial_data, config.params.amplitude)
    if galerkin:
        u0 = spectral_cutoff(u0, resolve_cutoff(config.grid, config.params))
    return SimState(t=0.0, u=leray_project(u0))


def data_top(config: RunConfig, *, galerkin: bool = True) -> float:
    """Largest wavenumber carrying initial energy, used as the window's lower edge."""
    grid = config.grid
    top = grid.k_min * (grid.n // 2)
    if isinstance(config.initial_data, SpectrumSpec):
        top = min(top, config.initial_data.xi_knee)
    else:
        top = min(top, grid.k_min * np.sqrt(grid.dim))
    if galerkin:
        top = min(top, resolve_cutoff(grid, config.params))
    return top


def run_window(config: RunConfig, *, galerkin: bool = True) -> tuple[float, float] | None:
    p = config.params
    return valid_window(
        config.grid,
        p.gamma,
        p.alpha,
        p.nu,
        xi_top=data_top(config, galerkin=galerkin),
        resolve_shells=config.window.resolve_shells,
    )


def heat_times(config: RunConfig) -> np.ndarray:
    """t = 0 followed by log-spaced samples from dt to t_end."""
    p = config.params
    return np.concatenate(([0.0], np.geomspace(p.dt, p.t_end, config.sampling.heat_points - 1)))


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------

def _fit_or_none(
    series: NormSeries, which: str, window: tuple[float, float] | None, notes: dict[str, str]
) -> DecayFit | None:
    try:
        return fit_decay_exponent(series, which, window)
    except FitError as e:
        logger.warning("Fit of %s failed: %s", which, e)
        notes[which] = str(e)
        return None


def _unfitted_verdict(
    config: RunConfig, which: str, m: int, note: str, kind: str = "exponent", sobolev: bool = False
) -> Verdict:
    p = config.resolved_p()
    alpha = config.params.alpha
    claim = governing_claim(p, alpha, m, sobolev=sobolev, s=config.sobolev_s) if p is not None else None
    return Verdict(
        kind=kind,
        which=which,
        p=p,
        alpha=alpha,
        m=m,
        predicted=None,
        fitted=None,
        tolerance=config.tolerances.l2 if m == 0 else config.tolerances.derivative_gap,
        status=VerdictStatus.FAIL,
        claim=claim.value if claim else None,
        applicable=p is None or claim is not None,
        regime=classify_criticality(alpha).regime.value,
        window_valid=False,
        note=note,
    )


def _no_p_verdict(fit: DecayFit, config: RunConfig, m: int) -> Verdict:
    alpha = config.params.alpha
    return Verdict(
        which=fit.which,
        p=None,
        alpha=alpha,
        m=m,
        predicted=None,
        fitted=fit.exponent,
        tolerance=config.tolerances.l2,
        status=VerdictStatus.INAPPLICABLE,
        claim=None,
        applicable=False,
        regime=classify_criticality(alpha).regime.value,
        window_valid=fit.valid,
        note="initial data has no Lebesgue exponent",
    )


def evaluate_verdicts(series: NormSeries, config: RunConfig) -> tuple[list[DecayFit], list[Verdict]]:
    """Fit every recorded norm and judge it against its predicted rate."""
    p = config.resolved_p()
    alpha = config.params.alpha
    tol = config.tolerances
    window = config.window.fit_window
    notes: dict[str, str] = {}
    fits: list[DecayFit] = []
    verdicts: list[Verdict] = []

    fit0 = _fit_or_none(series, "l2_sq", window, notes)
    if fit0 is None:
        verdicts.append(_unfitted_verdict(config, "l2_sq", 0, notes["l2_sq"]))
    else:
        fits.append(fit0)
        verdicts.append(
            compare_to_theory(fit0, p, alpha, 0, tol.l2) if p is not None else _no_p_verdict(fit0, config, 0)
        )

    for m in config.m_list:
        which = f"deriv{m}_sq"
        fit_m = _fit_or_none(series, which, window, notes)
        if fit_m is None:
            verdicts.append(_unfitted_verdict(config, which, m, notes[which], kind="gap"))
            continue
        fits.append(fit_m)
        if fit0 is not None:
            verdicts.append(compare_gap(fit_m, fit0, alpha, m, tol.derivative_gap, p))

    if series.hs_sq is not None:
        fit_hs = _fit_or_none(series, "hs_sq", window, notes)
        if fit_hs is None:
            verdicts.append(_unfitted_verdict(config, "hs_sq", 0, notes["hs_sq"], sobolev=True))
        else:
            fits.append(fit_hs)
            if p is not None:
                verdicts.append(
                    compare_to_theory(fit_hs, p, alpha, 0, tol.l2, sobolev=True, s=config.sobolev_s)
                )
            else:
                verdicts.append(_no_p_verdict(fit_hs, config, 0))
    return fits, verdicts


def _write_artifacts(
    run_dir: Path,
    config: RunConfig,
    series: NormSeries,
    fits: list[DecayFit],
    verdicts: list[Verdict],
    summary: RunSummary,
) -> None:
    save_run_config(config, run_dir / "config.json")
    export_series(series, config.m_list, run_dir / "series.csv")
    write_json(run_dir / "fits.json", fits)
    write_json(run_dir / "verdicts.json", verdicts)
    write_json(run_dir / "summary.json", summary)


def _with_counts(summary: RunSummary, verdicts: list[Verdict]) -> RunSummary:
    return summary.model_copy(
        update={
            "verdicts_total": len(verdicts),
            "verdicts_failed": sum(1 for v in verdicts if v.failed),
        }
    )


# ---------------------------------------------------------------------------
# Heat runs
# ---------------------------------------------------------------------------

def run_heat(
    config: RunConfig,
    settings: Settings | None = None,
    progress: RunProgress | None = None,
    threads: int = 1,
) -> RunOutcome:
    """Exact heat-oracle evolution of the configured data at log-spaced times."""
    run_dir = resolve_run_dir(config, settings)
    run_dir.mkdir(parents=True, exist_ok=True)
    times = heat_times(config)
    if progress is not None:
        progress.total_steps = int(times.size)
        if progress.on_start:
            progress.on_start(progress.total_steps)

    with sfft.set_workers(threads):
        u0 = initial_state(config, galerkin=False).u
    window = run_window(config, galerkin=False)
    series = oracle_series(
        u0, times, config.params, config.m_list, config.sobolev_s, valid=window
    )
    if progress is not None:
        progress.completed_steps = progress.samples = int(times.size)
        if progress.on_sample:
            progress.on_sample(float(times[-1]), progress.completed_steps)

    fits, verdicts = evaluate_verdicts(series, config)
    summary = RunSummary(
        mode="heat",
        name=config.name,
        alpha=config.params.alpha,
        regime=classify_criticality(config.params.alpha).regime.value,
        gamma=config.params.gamma,
        samples=int(times.size),
        valid_window=window,
        splitting_margin=_safe_margin(series, config),
    )
    summary = _with_counts(summary, verdicts)
    _write_artifacts(run_dir, config, series, fits, verdicts, summary)
    logger.info("Heat run %s written to %s", config.name, run_dir)
    return RunOutcome(run_dir=run_dir, series=series, fits=fits, verdicts=verdicts, summary=summary)


def _safe_margin(series: NormSeries, config: RunConfig) -> float | None:
    if series.times.size < 3:
        return None
    return splitting_inequality_margin(series, config.params.alpha, config.params.nu)


# ---------------------------------------------------------------------------
# Galerkin runs
# ---------------------------------------------------------------------------

class _Recorder:
    """Per-sample norms and diagnostics; states are not retained."""

    def __init__(self, config: RunConfig, u0: SpectralField, run_dir: Path) -> None:
        self.config = config
        self.u0 = u0
        self.run_dir = run_dir
        self.norms = SeriesBuilder(config.m_list, config.params, config.sobolev_s)
        self.transfer: list[float] = []
        self.c_star: list[float] = []
        self.add6: list[float] = []

    def record(self, state: SimState, index: int) -> None:
        params = self.config.params
        self.norms.add(state)
        self.transfer.append(transfer_rate(state.u, params))
        self.c_star.append(spectral_bound_check(state.u, self.u0, params.alpha).c_star)
        self.add6.append(add6_constant(state.u, params.dealias))
        every = self.config.snapshot_every
        if every and index % every == 0 and state.u.grid.dim == 3:
            write_snapshot(
                self.run_dir / "snapshots" / f"{state.step:08d}.fns", state.u, params.alpha, state.t
            )

    def summarize(
        self, series: NormSeries, oracle: NormSeries, window: tuple[float, float] | None, steps: int
    ) -> RunSummary:
        params = self.config.params
        times = series.times
        multi = times.size > 1
        c_star = np.array(self.c_star)
        return RunSummary(
            mode="simulate",
            name=self.config.name,
            alpha=params.alpha,
            regime=classify_criticality(params.alpha).regime.value,
            gamma=params.gamma,
            samples=int(times.size),
            steps=steps,
            valid_window=window,
            max_relative_defect=(
                budget_from_rates(times, series.l2_sq, np.array(self.norms.rates)).max_relative_defect()
                if multi
                else 0.0
            ),
            transfer_ratio=transfer_ratio(times, np.array(self.transfer), float(series.diss_integral[-1])),
            oracle_deviation=oracle_deviation(series, oracle, window),
            c_star_initial=float(c_star[0]),
            c_star_max=float(c_star.max()),
            c_star_trend=bound_trend(times, c_star) if multi else None,
            add6_constant=float(max(self.add6)),
            splitting_margin=_safe_margin(series, self.config),
        )


def run_simulate(
    config: RunConfig,
    settings: Settings | None = None,
    progress: RunProgress | None = None,
    threads: int = 1,
) -> RunOutcome:
    """Integrate the Galerkin system and verify its decay against the heat oracle."""
    run_dir = resolve_run_dir(config, settings)
    run_dir.mkdir(parents=True, exist_ok=True)
    params = config.params
    n_steps = int(np.floor(params.t_end / params.dt + 1e-9))
    if progress is not None:
        progress.total_steps = n_steps
        if progress.on_start:
            progress.on_start(n_steps)

    window = run_window(config)
    failure: dict | None = None
    with sfft.set_workers(threads):
        state0 = initial_state(config)
        recorder = _Recorder(config, state0.u, run_dir)
        try:
            for index, state in enumerate(integrate(state0, params, config.sampling.every)):
                recorder.record(state, index)
                if progress is not None:
                    progress.completed_steps = state.step
                    progress.samples = index + 1
                    if progress.on_sample:
                        progress.on_sample(state.t, state.step)
        except BlowUpError as e:
            logger.error("Blow-up: %s", e)
            failure = {"error": "blow-up", "last_finite_time": e.last_time, "step": e.step}

    series = recorder.norms.build(window)
    if failure is not None:
        save_run_config(config, run_dir / "config.json")
        export_series(series, config.m_list, run_dir / "series.csv")
        write_json(run_dir / "failure.json", failure)
        return RunOutcome(run_dir=run_dir, series=series, failure=failure)

    oracle = oracle_series(state0.u, series.times, params, config.m_list, config.sobolev_s, valid=window)
    fits, verdicts = evaluate_verdicts(series, config)
    summary = _with_counts(recorder.summarize(series, oracle, window, n_steps), verdicts)
    _write_artifacts(run_dir, config, series, fits, verdicts, summary)
    logger.info("Simulation %s written to %s", config.name, run_dir)
    return RunOutcome(run_dir=run_dir, series=series, fits=fits, verdicts=verdicts, summary=summary)
