"""Rich terminal display for runs, verdicts, sweeps and predictions."""

from __future__ import annotations

from rich.console import Console
from rich.panel import Panel
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TextColumn,
    TimeElapsedColumn,
)
from rich.table import Table
from rich.text import Text

from gns_decay.heat import CriticalityReport, DecayClaim
from gns_decay.models import DecayFit, SweepRow, Verdict
from gns_decay.snapshot import InvariantCheck

console = Console()

# Color mapping for verdict statuses
STATUS_COLORS = {
    "pass": "green",
    "fail": "red",
    "invalid-window": "red",
    "no-claim": "yellow",
    "inapplicable": "yellow",
    "predicted": "cyan",
    "error": "red",
}

REGIME_COLORS = {
    "supercritical": "magenta",
    "critical": "yellow",
    "subcritical": "cyan",
}


def _status_text(status: str) -> Text:
    return Text(status, style=STATUS_COLORS.get(status, "white"))


def _num(value: float | None, spec: str = ".4f") -> str:
    return "-" if value is None else format(value, spec)


def display_fits(fits: list[DecayFit]) -> None:
    if not fits:
        return
    table = Table(title="Power-law fits", show_lines=False)
    table.add_column("Norm", style="bold")
    table.add_column("rho", justify="right")
    table.add_column("r^2", justify="right")
    table.add_column("Window")
    table.add_column("Samples", justify="right")
    table.add_column("Valid")
    for fit in fits:
        lo, hi = fit.window
        table.add_row(
            fit.which,
            f"{fit.exponent:.4f}",
            f"{fit.r_squared:.6f}",
            f"[{lo:.4g}, {hi:.4g}]",
            str(fit.samples),
            "[green]yes[/green]" if fit.valid else "[red]no[/red]",
        )
    console.print(table)


def display_verdicts(verdicts: list[Verdict]) -> None:
    if not verdicts:
        console.print("[dim]No verdicts.[/dim]")
        return
    table = Table(title="Verdicts", show_lines=True)
    table.add_column("Kind")
    table.add_column("Norm", style="bold")
    table.add_column("m", justify="right")
    table.add_column("Predicted", justify="right")
    table.add_column("Fitted", justify="right")
    table.add_column("Deviation", justify="right")
    table.add_column("Status")
    table.add_column("Claim", max_width=40)
    for v in verdicts:
        table.add_row(
            v.kind,
            v.which,
            str(v.m),
            _num(v.predicted),
            _num(v.fitted),
            "-" if v.deviation is None else f"{v.deviation:.1%}",
            _status_text(v.status.value),
            v.claim or ("[dim]none[/dim]" if v.applicable else "[dim]not applicable[/dim]"),
        )
    console.print(table)
    for v in verdicts:
        if v.note:
            console.print(f"  [yellow]Note[/yellow] {v.which}: {v.note}")


def display_sweep(rows: list[SweepRow]) -> None:
    if not rows:
        console.print("[dim]Empty sweep.[/dim]")
        return
    table = Table(title=f"Sweep over {rows[0].axis} ({len(rows)} rows)", show_lines=False)
    for column in ("Value", "p", "alpha", "m", "Predicted", "Fitted", "Deviation", "Window", "Regime", "Status"):
        table.add_column(column, justify="right" if column not in ("Regime", "Status") else "left")
    table.add_column("Claim", max_width=40)
    for row in rows:
        table.add_row(
            f"{row.value:g}",
            _num(row.p, ".3g"),
            _num(row.alpha, ".3g"),
            str(row.m),
            _num(row.predicted),
            _num(row.fitted),
            "-" if row.deviation is None else f"{row.deviation:.1%}",
            "ok" if row.window_valid else "-",
            Text(row.regime, style=REGIME_COLORS.get(row.regime, "white")),
            _status_text(row.status),
            row.error or row.claim or ("" if row.applicable else "[dim]not applicable[/dim]"),
        )
    console.print(table)


def display_prediction(
    p: float,
    alpha: float,
    m: int,
    exponent: float,
    criticality: CriticalityReport,
    claims: frozenset[DecayClaim],
    governing: DecayClaim | None,
) -> None:
    lines = [
        f"p = {p:g}, alpha = {alpha:g}, m = {m}",
        f"Predicted decay of the squared norm: [bold]{exponent:.6g}[/bold]  (t+1)^-rho",
        f"Regime: {criticality.regime.value} (scaling exponent 4 alpha - 5 = {criticality.scaling_exponent:g})",
        f"Governing claim: {governing.value if governing else '[yellow]none[/yellow]'}",
    ]
    if exponent == 0:
        lines.append("[yellow]No decay claim (rate 0).[/yellow]")
    lines.append("Applicable claims:")
    lines += [f"  - {c.value}" for c in sorted(claims, key=lambda c: c.value)] or ["  (none)"]
    console.print(Panel("\n".join(lines), title="Prediction", expand=False))


def display_checks(checks: list[InvariantCheck]) -> None:
    table = Table(title="Snapshot invariants", show_lines=True)
    table.add_column("Check", style="bold")
    table.add_column("Value", justify="right")
    table.add_column("Limit", justify="right")
    table.add_column("Status")
    for check in checks:
        table.add_row(
            check.name,
            f"{check.value:.3e}",
            f"{check.limit:.1e}",
            "[green]OK[/green]" if check.passed else "[red]FAILED[/red]",
        )
    console.print(table)


def display_failure(failure: dict) -> None:
    console.print(
        Panel(
            f"Non-finite state after step {failure['step']}; "
            f"last finite time t = {failure['last_finite_time']:g}",
            title="[red]Blow-up[/red]",
            expand=False,
        )
    )


def create_run_progress() -> Progress:
    """Create a Rich Progress bar for time stepping."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
    )
