"""Run-level diagnostics and their rendering."""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel
from rich.console import Console
from rich.table import Table
from scipy.integrate import trapezoid

from gns_decay.decay import NormSeries

console = Console()


class RunSummary(BaseModel):
    """Scalar diagnostics of one run, written to summary.json."""

    mode: Literal["simulate", "heat"]
    name: str
    alpha: float
    regime: str
    gamma: float
    samples: int
    steps: int = 0
    valid_window: tuple[float, float] | None = None
    max_relative_defect: float | None = None
    transfer_ratio: float | None = None
    oracle_deviation: float | None = None
    c_star_initial: float | None = None
    c_star_max: float | None = None
    c_star_trend: float | None = None
    add6_constant: float | None = None
    splitting_margin: float | None = None
    verdicts_total: int = 0
    verdicts_failed: int = 0


def oracle_deviation(
    series: NormSeries, oracle: NormSeries, window: tuple[float, float] | None = None
) -> float:
    """Max relative gap between simulated and heat-oracle ||u||**2 over the window."""
    if series.times.shape != oracle.times.shape or not np.allclose(series.times, oracle.times):
        raise ValueError("Series and oracle must share sample times")
    selected = np.ones(series.times.size, dtype=bool)
    if window is not None:
        selected = (series.times >= window[0]) & (series.times <= window[1])
    ref = oracle.l2_sq[selected]
    if ref.size == 0:
        return 0.0
    positive = ref > 0
    gap = np.abs(series.l2_sq[selected] - ref)
    return float((gap[positive] / ref[positive]).max()) if np.any(positive) else 0.0


def transfer_ratio(times: np.ndarray, transfer: np.ndarray, dissipated: float) -> float:
    """Time-integrated gross nonlinear exchange relative to the total dissipated energy."""
    if dissipated <= 0 or len(times) < 2:
        return 0.0
    return float(trapezoid(transfer, times) / dissipated)


def _fmt(value: float | None, spec: str = ".4g") -> str:
    return "-" if value is None else format(value, spec)


def display_run_summary(summary: RunSummary) -> None:
    """Display the diagnostics table of a finished run."""
    table = Table(title=f"Run {summary.name} ({summary.mode})", show_lines=True)
    table.add_column("Metric", style="bold")
    table.add_column("Value")

    table.add_row("alpha / regime", f"{summary.alpha:g} / {summary.regime}")
    table.add_row("gamma", f"{summary.gamma:g} [dim](free splitting constant)[/dim]")
    table.add_row("Samples", f"{summary.samples:,}")
    if summary.mode == "simulate":
        table.add_row("Steps", f"{summary.steps:,}")
    if summary.valid_window:
        lo, hi = summary.valid_window
        table.add_row("Valid window", f"[{lo:.4g}, {hi:.4g}]")
    else:
        table.add_row("Valid window", "[red]empty[/red]")

    table.add_row("Max relative energy defect", _fmt(summary.max_relative_defect, ".3e"))
    table.add_row("Transfer / dissipation", _fmt(summary.transfer_ratio, ".3e"))
    table.add_row("Deviation from heat oracle", _fmt(summary.oracle_deviation, ".3e"))
    table.add_row("C* at t=0", _fmt(summary.c_star_initial))
    table.add_row("C* max / trend", f"{_fmt(summary.c_star_max)} / {_fmt(summary.c_star_trend)}")
    table.add_row("Nonlinear bound constant", _fmt(summary.add6_constant))
    table.add_row("Splitting inequality margin", _fmt(summary.splitting_margin, ".3e"))

    failed = summary.verdicts_failed
    verdict_text = f"{summary.verdicts_total - failed}/{summary.verdicts_total} ok"
    style = "red" if failed else "green"
    table.add_row("Verdicts", f"[{style}]{verdict_text}[/{style}]")
    console.print(table)
