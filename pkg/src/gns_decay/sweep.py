"""Parameter sweeps: one run per axis value, aggregated into a comparison table.

Runs are independent and execute in a thread pool; each worker owns its run
directory. Rows come back in axis order whatever the completion order.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Literal

from gns_decay.config import Settings
from gns_decay.heat import classify_criticality, governing_claim, predicted_exponent
from gns_decay.initial_data import sigma_for_p
from gns_decay.models import RunConfig, SweepRow, Verdict
from gns_decay.runner import run_heat, run_simulate

logger = logging.getLogger(__name__)

SWEEP_AXES = ("alpha", "p", "sigma", "nu", "amplitude", "gamma", "n", "box_length")

SweepMode = Literal["heat", "simulate", "predict"]


@dataclass(frozen=True)
class SweepAxis:
    name: str
    values: tuple[float, ...]


def parse_axis(text: str) -> SweepAxis:
    """Parse ``name=v1,v2,...``; an empty value list is allowed."""
    name, sep, raw = text.partition("=")
    name = name.strip()
    if not sep:
        raise ValueError(f"Axis must look like name=v1,v2,..., got {text!r}")
    if name not in SWEEP_AXES:
        raise ValueError(f"Unknown sweep axis {name!r}; choose from {', '.join(SWEEP_AXES)}")
    try:
        values = tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ValueError(f"Axis values must be numbers, got {raw!r}") from None
    return SweepAxis(name=name, values=values)


def apply_axis(config: RunConfig, name: str, value: float) -> RunConfig:
    """Return a revalidated config with one axis set to ``value``."""
    data = config.model_dump(mode="json")
    label = f"{name}={value:g}"
    data["name"] = f"{config.name}/{label}"
    if config.output_dir is not None:
        data["output_dir"] = str(Path(config.output_dir) / label)

    if name in ("alpha", "nu", "gamma", "amplitude"):
        data["params"][name] = value
    elif name in ("n", "box_length"):
        data["grid"][name] = int(value) if name == "n" else value
    elif name in ("p", "sigma"):
        if data["initial_data"]["kind"] != "spectrum":
            raise ValueError(f"Axis {name} needs spectrum initial data")
        sigma = sigma_for_p(value) if name == "p" else value
        data["initial_data"]["sigma"] = sigma
        data["lebesgue_p"] = value if name == "p" else None
    else:
        raise ValueError(f"Unknown sweep axis {name!r}")
    return RunConfig.model_validate(data)


def _prediction_rows(axis: str, value: float, config: RunConfig, p: float | None = None) -> list[SweepRow]:
    """Predicted exponents only; ``p`` overrides the config's Lebesgue exponent."""
    if p is None:
        p = config.resolved_p()
    alpha = config.params.alpha
    regime = classify_criticality(alpha).regime.value
    rows = []
    for m in [0, *config.m_list]:
        predicted = predicted_exponent(p, alpha, m) if p is not None else None
        claim = governing_claim(p, alpha, m) if p is not None else None
        rows.append(
            SweepRow(
                axis=axis,
                value=value,
                p=p,
                alpha=alpha,
                m=m,
                predicted=predicted,
                fitted=None,
                deviation=None,
                window_valid=False,
                claim=claim.value if claim else None,
                applicable=claim is not None,
                regime=regime,
                status="no-claim" if predicted == 0 else "predicted",
            )
        )
    return rows


def _verdict_row(axis: str, value: float, verdict: Verdict) -> SweepRow:
    return SweepRow(
        axis=axis,
        value=value,
        p=verdict.p,
        alpha=verdict.alpha,
        m=verdict.m,
        predicted=verdict.predicted,
        fitted=verdict.fitted,
        deviation=verdict.deviation,
        window_valid=verdict.window_valid,
        claim=verdict.claim,
        applicable=verdict.applicable,
        regime=verdict.regime,
        status=verdict.status.value,
        error=verdict.note,
    )


def _error_row(axis: str, value: float, error: Exception) -> SweepRow:
    return SweepRow(
        axis=axis,
        value=value,
        p=None,
        alpha=None,
        m=0,
        predicted=None,
        fitted=None,
        deviation=None,
        window_valid=False,
        claim=None,
        regime="unknown",
        status="error",
        error=str(error),
    )


def run_one(
    template: RunConfig,
    axis: str,
    value: float,
    mode: SweepMode,
    settings: Settings | None,
    threads: int,
) -> list[SweepRow]:
    """Rows for one axis value; any failure becomes a single error row."""
    try:
        if mode == "predict" and axis == "p":
            # predictions need only p, so p = 2 (sigma = -3/2) needs no data
            return _prediction_rows(axis, value, template, p=value)
        config = apply_axis(template, axis, value)
        if mode == "predict":
            return _prediction_rows(axis, value, config)
        runner = run_heat if mode == "heat" else run_simulate
        outcome = runner(config, settings=settings, threads=threads)
        if outcome.failure is not None:
            return [_error_row(axis, value, RuntimeError(f"blow-up at t={outcome.failure['last_finite_time']}"))]
        return [_verdict_row(axis, value, v) for v in outcome.verdicts]
    except Exception as e:
        logger.warning("Sweep %s=%g failed: %s", axis, value, e)
        return [_error_row(axis, value, e)]


def run_sweep(
    template: RunConfig,
    axis: SweepAxis,
    mode: SweepMode = "heat",
    settings: Settings | None = None,
    max_workers: int = 1,
    threads: int = 1,
    on_complete: Callable[[float], None] | None = None,
) -> list[SweepRow]:
    """Run one configuration per axis value and collect the verdict rows in axis order."""
    if not axis.values:
        return []
    logger.info(
        "Sweep %s over %d values (mode=%s, workers=%d)", axis.name, len(axis.values), mode, max_workers
    )

    def task(value: float) -> list[SweepRow]:
        rows = run_one(template, axis.name, value, mode, settings, threads)
        if on_complete:
            on_complete(value)
        return rows

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        results = list(pool.map(task, axis.values))
    return [row for rows in results for row in rows]
