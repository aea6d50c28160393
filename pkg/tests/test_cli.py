"""Tests for the command-line surface."""

import json

from typer.testing import CliRunner

from gns_decay.cli import app
from gns_decay.config import save_run_config
from gns_decay.initial_data import taylor_green_field
from gns_decay.snapshot import write_snapshot
from gns_decay.spectral import make_grid
from tests.conftest import TWO_PI, make_run_config

runner = CliRunner()


class TestPredict:
    def test_prints_prediction(self):
        result = runner.invoke(app, ["predict", "--p", "1", "--alpha", "1"])
        assert result.exit_code == 0

    def test_out_of_range_p(self):
        result = runner.invoke(app, ["predict", "--p", "3", "--alpha", "1"])
        assert result.exit_code == 2


class TestCheck:
    def test_clean_snapshot(self, tmp_path):
        path = write_snapshot(tmp_path / "s.fns", taylor_green_field(make_grid(8, TWO_PI)), 1.0, 0.0)
        result = runner.invoke(app, ["check", str(path)])
        assert result.exit_code == 0

    def test_corrupt_field(self, tmp_path):
        u = taylor_green_field(make_grid(8, TWO_PI))
        coeffs = u.coeffs.copy()
        coeffs[0, 0, 0, 0] = 1.0
        path = write_snapshot(tmp_path / "s.fns", u.with_coeffs(coeffs), 1.0, 0.0)
        assert runner.invoke(app, ["check", str(path)]).exit_code == 1

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "junk.fns"
        path.write_bytes(b"not a snapshot")
        assert runner.invoke(app, ["check", str(path)]).exit_code == 2


class TestRunCommands:
    def test_heat_from_config(self, tmp_path):
        config_path = save_run_config(make_run_config(tmp_path), tmp_path / "heat.json")
        out = tmp_path / "out"
        result = runner.invoke(app, ["--config", str(config_path), "--out", str(out), "heat"])
        assert result.exit_code in (0, 1)
        assert (out / "series.csv").exists()
        assert (out / "verdicts.json").exists()

    def test_seed_override_recorded(self, tmp_path):
        config_path = save_run_config(make_run_config(tmp_path), tmp_path / "heat.json")
        out = tmp_path / "seeded"
        runner.invoke(app, ["--config", str(config_path), "--out", str(out), "--seed", "11", "heat"])
        saved = json.loads((out / "config.json").read_text())
        assert saved["initial_data"]["seed"] == 11
        assert saved["output_dir"] == str(out)

    def test_missing_config(self, tmp_path):
        result = runner.invoke(app, ["--config", str(tmp_path / "absent.json"), "heat"])
        assert result.exit_code == 2

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"grid": {"n": 4}}')
        assert runner.invoke(app, ["--config", str(path), "simulate"]).exit_code == 2


class TestSweepCommand:
    def test_predict_sweep(self, tmp_path):
        config_path = save_run_config(make_run_config(tmp_path), tmp_path / "heat.json")
        result = runner.invoke(
            app, ["--config", str(config_path), "sweep", "--axis", "p=1,1.5", "--mode", "predict"]
        )
        assert result.exit_code == 0

    def test_bad_axis(self):
        result = runner.invoke(app, ["sweep", "--axis", "speed=1", "--mode", "predict"])
        assert result.exit_code == 2

    def test_bad_mode(self):
        result = runner.invoke(app, ["sweep", "--axis", "alpha=1", "--mode", "fast"])
        assert result.exit_code == 2
