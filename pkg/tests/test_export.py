"""Tests for the export functionality."""

import csv
import json
from io import StringIO

import numpy as np

from gns_decay.decay import NormSeries
from gns_decay.export import (
    SWEEP_COLUMNS,
    _format,
    export_series,
    export_sweep,
    series_columns,
    series_to_csv,
    sweep_to_csv,
    to_json,
    write_json,
)
from gns_decay.models import SweepRow, Tolerances


def _make_series(with_hs: bool = False) -> NormSeries:
    times = np.array([0.0, 0.5, 1.0])
    return NormSeries(
        times=times,
        l2_sq=np.array([1.0, 0.1, 1e-05]),
        diss_integral=np.array([0.0, 0.9, 0.99999]),
        shell_energy=np.array([1.0, 0.05, 2.5e-06]),
        g_t=np.array([1.7320508075688772, 1.5, 1.25]),
        deriv_sq={1: np.array([3.0, 0.2, 1e-04]), 2: np.array([9.0, 0.4, 1e-03])},
        hs_sq=np.array([4.0, 0.3, 1.1e-04]) if with_hs else None,
    )


def _make_rows() -> list[SweepRow]:
    return [
        SweepRow(
            axis="alpha", value=1.0, p=1.0, alpha=1.0, m=0, predicted=1.5, fitted=1.48,
            deviation=0.0133, window_valid=True, claim="weak-l2", regime="supercritical",
            status="pass",
        ),
        SweepRow(
            axis="alpha", value=1.2, p=None, alpha=None, m=0, predicted=None, fitted=None,
            deviation=None, window_valid=False, claim=None, applicable=False,
            regime="supercritical", status="error", error="boom",
        ),
    ]


class TestFormat:
    def test_values(self):
        assert _format(None) == ""
        assert _format(True) == "true"
        assert _format(False) == "false"
        assert _format(3) == "3"
        assert _format(0.1) == "0.1"
        assert _format(np.float64(1e-05)) == "1e-05"
        assert _format("x") == "x"


class TestSeriesCsv:
    def test_header(self):
        text = series_to_csv(_make_series(), [1, 2])
        assert text.splitlines()[0] == "t,l2_sq,diss_integral,shell_energy,g_t,deriv1_sq,deriv2_sq"

    def test_header_with_sobolev_column(self):
        assert series_columns([1], with_hs=True)[-1] == "hs_sq"
        text = series_to_csv(_make_series(with_hs=True), [1])
        assert text.splitlines()[0].endswith(",deriv1_sq,hs_sq")

    def test_rows_use_shortest_round_trip_floats(self):
        lines = series_to_csv(_make_series(), [1]).splitlines()
        assert lines[1] == "0.0,1.0,0.0,1.0,1.7320508075688772,3.0"
        assert lines[3] == "1.0,1e-05,0.99999,2.5e-06,1.25,0.0001"

    def test_round_trips_exactly(self):
        series = _make_series()
        reader = csv.DictReader(StringIO(series_to_csv(series, [1, 2])))
        rows = list(reader)
        assert len(rows) == 3
        assert [float(r["g_t"]) for r in rows] == series.g_t.tolist()

    def test_deterministic(self):
        assert series_to_csv(_make_series(), [1, 2]) == series_to_csv(_make_series(), [1, 2])

    def test_unix_line_endings(self):
        assert "\r" not in series_to_csv(_make_series(), [1])

    def test_export_to_file(self, tmp_path):
        path = tmp_path / "series.csv"
        count = export_series(_make_series(), [1], path)
        assert count == 3
        assert path.read_bytes() == series_to_csv(_make_series(), [1]).encode("utf-8")

    def test_export_to_stdout(self, capsys):
        export_series(_make_series(), [1], "-")
        assert capsys.readouterr().out.startswith("t,l2_sq")


class TestSweepCsv:
    def test_header_and_rows(self):
        reader = csv.DictReader(StringIO(sweep_to_csv(_make_rows())))
        assert reader.fieldnames == SWEEP_COLUMNS
        rows = list(reader)
        assert rows[0]["status"] == "pass"
        assert rows[0]["window_valid"] == "true"
        assert rows[0]["applicable"] == "true"
        assert rows[1]["alpha"] == ""
        assert rows[1]["error"] == "boom"
        assert rows[1]["applicable"] == "false"

    def test_export_to_file(self, tmp_path):
        path = tmp_path / "sweep.csv"
        assert export_sweep(_make_rows(), path) == 2
        assert path.read_text().count("\n") == 3


class TestJson:
    def test_model(self):
        assert json.loads(to_json(Tolerances())) == {"l2": 0.1, "derivative_gap": 0.15}

    def test_list_of_models(self):
        parsed = json.loads(to_json(_make_rows()))
        assert [r["status"] for r in parsed] == ["pass", "error"]

    def test_dict(self, tmp_path):
        path = write_json(tmp_path / "sub" / "failure.json", {"error": "blow-up", "step": 4})
        assert json.loads(path.read_text()) == {"error": "blow-up", "step": 4}
        assert path.read_text().endswith("\n")
