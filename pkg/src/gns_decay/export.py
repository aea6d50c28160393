"""Export norm series, verification records and sweep tables.

Floats are written as the shortest decimal that round-trips (``repr``), so
identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import sys
from collections.abc import Iterable, Sequence
from io import StringIO
from pathlib import Path
from typing import Any

from pydantic import BaseModel

from gns_decay.decay import NormSeries
from gns_decay.models import SweepRow

SERIES_BASE_COLUMNS = ["t", "l2_sq", "diss_integral", "shell_energy", "g_t"]

SWEEP_COLUMNS = [
    "axis",
    "value",
    "p",
    "alpha",
    "m",
    "predicted",
    "fitted",
    "deviation",
    "window_valid",
    "claim",
    "applicable",
    "regime",
    "status",
    "error",
]


def series_columns(m_list: Sequence[int], with_hs: bool = False) -> list[str]:
    columns = SERIES_BASE_COLUMNS + [f"deriv{m}_sq" for m in m_list]
    if with_hs:
        columns.append("hs_sq")
    return columns


def _format(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def series_to_csv(series: NormSeries, m_list: Sequence[int]) -> str:
    """CSV with header ``t,l2_sq,diss_integral,shell_energy,g_t,deriv{m}_sq...``."""
    with_hs = series.hs_sq is not None
    columns = series_columns(m_list, with_hs)
    data = [series.times, series.l2_sq, series.diss_integral, series.shell_energy, series.g_t]
    data += [series.deriv_sq[m] for m in m_list]
    if with_hs:
        data.append(series.hs_sq)

    output = StringIO()
    writer = csv.writer(output, lineterminator="\n")
    writer.writerow(columns)
    for row in zip(*data):
        writer.writerow([_format(v) for v in row])
    return output.getvalue()


def export_series(series: NormSeries, m_list: Sequence[int], output_path: str | Path = "-") -> int:
    """Write the series CSV to a file, or stdout for '-'. Returns the row count."""
    content = series_to_csv(series, m_list)
    _write(content, output_path)
    return int(series.times.size)


def sweep_to_csv(rows: Iterable[SweepRow]) -> str:
    output = StringIO()
    writer = csv.DictWriter(output, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _format(v) for k, v in row.model_dump(mode="json").items()})
    return output.getvalue()


def export_sweep(rows: Sequence[SweepRow], output_path: str | Path = "-") -> int:
    _write(sweep_to_csv(rows), output_path)
    return len(rows)


def to_json(payload: BaseModel | Sequence[BaseModel] | dict) -> str:
    """Pretty JSON for a model, a list of models or a plain dict."""
    if isinstance(payload, BaseModel):
        data = payload.model_dump(mode="json")
    elif isinstance(payload, dict):
        data = payload
    else:
        data = [item.model_dump(mode="json") for item in payload]
    return json.dumps(data, indent=2) + "\n"


def write_json(path: Path, payload: BaseModel | Sequence[BaseModel] | dict) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(payload), encoding="utf-8")
    return path


def _write(content: str, output_path: str | Path) -> None:
    if str(output_path) == "-":
        sys.stdout.write(content)
    else:
        with open(output_path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
