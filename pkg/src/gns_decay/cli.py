"""CLI entry point for the generalized Navier-Stokes decay lab.

Provides commands: simulate, heat, sweep, check, predict.
"""

from __future__ import annotations

import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import typer
from rich.console import Console

app = typer.Typer(
    name="gns-decay",
    help="Simulate generalized Navier-Stokes decay and verify predicted rates.",
    no_args_is_help=True,
)

console = Console(stderr=True)

EXIT_CONFIG_ERROR = 2


@dataclass
class GlobalOptions:
    config: Path | None
    out: Path | None
    seed: int | None
    threads: int | None
    verbose: bool


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _get_settings():
    """Load settings, printing a helpful error on failure."""
    from gns_decay.config import load_settings
    try:
        return load_settings()
    except ValueError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)


def _get_config(opts: GlobalOptions, mode: str):
    """Load the run config (or the built-in default for the mode) and apply overrides."""
    from gns_decay.config import apply_overrides, default_run_config, load_run_config
    try:
        config = load_run_config(opts.config) if opts.config else default_run_config(mode)
        return apply_overrides(config, out=opts.out, seed=opts.seed)
    except ValueError as e:
        console.print(f"[red]Configuration error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)


def _threads(opts: GlobalOptions, settings) -> int:
    return opts.threads if opts.threads is not None else settings.threads


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", "-c", help="Run config JSON file."),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output directory for the run."),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, help="Override the initial-data seed."),
    threads: Optional[int] = typer.Option(None, "--threads", min=1, help="FFT worker threads."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Enable debug logging."),
) -> None:
    """Global options shared by every command."""
    _setup_logging(verbose)
    ctx.obj = GlobalOptions(config=config, out=out, seed=seed, threads=threads, verbose=verbose)


def _run(ctx: typer.Context, mode: str) -> None:
    from gns_decay.display import (
        create_run_progress,
        display_failure,
        display_fits,
        display_verdicts,
    )
    from gns_decay.runner import RunProgress, run_heat, run_simulate
    from gns_decay.summary import display_run_summary

    opts: GlobalOptions = ctx.obj
    settings = _get_settings()
    config = _get_config(opts, mode)
    runner = run_simulate if mode == "simulate" else run_heat

    tracker = RunProgress()
    with create_run_progress() as rich_progress:
        task = rich_progress.add_task(f"{mode} {config.name}", total=None)

        def on_start(total: int) -> None:
            rich_progress.update(task, total=total)

        def on_sample(t: float, completed: int) -> None:
            rich_progress.update(task, completed=completed, description=f"{mode} t={t:.4g}")

        tracker.on_start = on_start
        tracker.on_sample = on_sample
        try:
            outcome = runner(config, settings=settings, progress=tracker, threads=_threads(opts, settings))
        except OSError as e:
            console.print(f"[red]I/O error:[/red] {e}")
            raise typer.Exit(EXIT_CONFIG_ERROR)

    if outcome.failure is not None:
        display_failure(outcome.failure)
    else:
        display_fits(outcome.fits)
        display_verdicts(outcome.verdicts)
        display_run_summary(outcome.summary)
    console.print(f"Artifacts written to [bold]{outcome.run_dir}[/bold]")
    raise typer.Exit(outcome.exit_code)


# ── simulate / heat ──────────────────────────────────────────────────────────


@app.command()
def simulate(ctx: typer.Context) -> None:
    """Integrate the Galerkin system and verify its decay."""
    _run(ctx, "simulate")


@app.command()
def heat(ctx: typer.Context) -> None:
    """Evolve the data with the exact heat oracle and verify its decay."""
    _run(ctx, "heat")


# ── sweep ────────────────────────────────────────────────────────────────────


@app.command()
def sweep(
    ctx: typer.Context,
    axis: str = typer.Option(..., "--axis", "-a", help="Axis and values, e.g. 'alpha=0.6,1.0,1.2'."),
    mode: str = typer.Option("heat", "--mode", "-m", help="heat, simulate or predict."),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", min=1, help="Parallel runs."),
) -> None:
    """Run one configuration per axis value and tabulate the verdicts."""
    from gns_decay.display import display_sweep
    from gns_decay.export import export_sweep
    from gns_decay.runner import resolve_run_dir
    from gns_decay.sweep import parse_axis, run_sweep

    opts: GlobalOptions = ctx.obj
    if mode not in ("heat", "simulate", "predict"):
        console.print(f"[red]Error:[/red] Unknown sweep mode '{mode}'. Use heat, simulate or predict.")
        raise typer.Exit(EXIT_CONFIG_ERROR)
    try:
        parsed = parse_axis(axis)
    except ValueError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)

    settings = _get_settings()
    template = _get_config(opts, "simulate" if mode == "simulate" else "heat")
    rows = run_sweep(
        template,
        parsed,
        mode=mode,
        settings=settings,
        max_workers=workers or settings.max_parallel_runs,
        threads=_threads(opts, settings),
    )
    display_sweep(rows)

    if mode != "predict":
        out_dir = resolve_run_dir(template, settings)
        out_dir.mkdir(parents=True, exist_ok=True)
        export_sweep(rows, out_dir / "sweep.csv")
        console.print(f"Sweep table written to [bold]{out_dir / 'sweep.csv'}[/bold]")
    if any(row.status in ("fail", "invalid-window", "error") for row in rows):
        raise typer.Exit(1)


# ── check ────────────────────────────────────────────────────────────────────


@app.command()
def check(
    snapshot: Path = typer.Argument(..., help="FNS1 snapshot file."),
    tolerance: float = typer.Option(1e-12, "--tolerance", "-t", help="Relative tolerance."),
    cutoff: Optional[float] = typer.Option(
        None, "--cutoff", help="Galerkin radius to check against (default: dealias radius)."
    ),
) -> None:
    """Run the invariant suite on a stored snapshot."""
    from gns_decay.display import display_checks
    from gns_decay.snapshot import check_snapshot, read_snapshot

    try:
        snap = read_snapshot(snapshot)
    except (OSError, ValueError) as e:
        console.print(f"[red]Cannot read snapshot:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)

    console.print(f"Snapshot n={snap.grid.n} L={snap.grid.box_length:g} alpha={snap.alpha:g} t={snap.t:g}")
    checks = check_snapshot(snap, tolerance=tolerance, cutoff_N=cutoff)
    display_checks(checks)
    if not all(c.passed for c in checks):
        raise typer.Exit(1)


# ── predict ──────────────────────────────────────────────────────────────────


@app.command()
def predict(
    p: float = typer.Option(..., "--p", help="Lebesgue exponent of the data, 1 <= p <= 2."),
    alpha: float = typer.Option(..., "--alpha", help="Dissipation exponent."),
    m: int = typer.Option(0, "--m", min=0, help="Derivative order."),
) -> None:
    """Print the predicted decay exponent and the claims covering (p, alpha)."""
    from gns_decay.display import display_prediction
    from gns_decay.heat import (
        classify_criticality,
        governing_claim,
        predicted_exponent,
        theorem_applicability,
    )

    try:
        exponent = predicted_exponent(p, alpha, m)
        criticality = classify_criticality(alpha)
        claims = theorem_applicability(p, alpha)
    except ValueError as e:
        console.print(f"[red]Error:[/red] {e}")
        raise typer.Exit(EXIT_CONFIG_ERROR)
    display_prediction(p, alpha, m, exponent, criticality, claims, governing_claim(p, alpha, m))
