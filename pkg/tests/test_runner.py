"""Tests for heat and simulate runs, their artifacts and exit codes."""

import json
from pathlib import Path

import numpy as np
import pytest

import gns_decay.galerkin as galerkin
from gns_decay.config import Settings, flagship_config
from gns_decay.export import series_to_csv
from gns_decay.galerkin import BlowUpError, energy_budget, integrate
from gns_decay.heat import DecayClaim
from gns_decay.models import VerdictStatus
from gns_decay.runner import (
    EXIT_BLOWUP,
    EXIT_OK,
    EXIT_VERDICT_FAILED,
    RunProgress,
    initial_state,
    resolve_run_dir,
    run_heat,
    run_simulate,
    run_window,
)
from tests.conftest import make_run_config

ARTIFACTS = ["config.json", "series.csv", "fits.json", "verdicts.json", "summary.json"]


class TestResolveRunDir:
    def test_explicit_output_dir(self, tmp_path):
        config = make_run_config(tmp_path)
        assert resolve_run_dir(config) == tmp_path / "test-heat"

    def test_settings_root(self, tmp_path):
        config = make_run_config(tmp_path, output_dir=None)
        assert resolve_run_dir(config, Settings(out_dir=tmp_path / "runs")) == tmp_path / "runs" / "test-heat"

    def test_default_root(self, tmp_path):
        assert resolve_run_dir(make_run_config(tmp_path, output_dir=None)) == Path("runs") / "test-heat"


class TestInitialState:
    def test_galerkin_state_is_projected_and_cut(self, tmp_path):
        config = make_run_config(tmp_path)
        u0 = initial_state(config).u
        cut = config.resolved_cutoff()
        assert np.all(u0.coeffs[:, u0.grid.k_magnitude > cut * (1 + 1e-12)] == 0)
        assert u0.max_divergence() <= 1e-12 * np.abs(u0.coeffs).max() * u0.grid.max_wavenumber

    def test_heat_state_keeps_full_spectrum(self, tmp_path):
        config = make_run_config(tmp_path)
        full = initial_state(config, galerkin=False).u
        cut = initial_state(config).u
        assert full.energy() > cut.energy()

    def test_amplitude_scales_data(self, tmp_path):
        config = make_run_config(tmp_path, mode="sim")
        u0 = initial_state(config).u
        assert u0.energy() == pytest.approx(0.1**2 / 4 * (2 * np.pi) ** 3)


class TestRunHeat:
    def test_artifacts(self, tmp_path):
        outcome = run_heat(make_run_config(tmp_path))
        for name in ARTIFACTS:
            assert (outcome.run_dir / name).exists()
        header = (outcome.run_dir / "series.csv").read_text().splitlines()[0]
        assert header == "t,l2_sq,diss_integral,shell_energy,g_t,deriv1_sq"
        summary = json.loads((outcome.run_dir / "summary.json").read_text())
        assert summary["mode"] == "heat"
        assert summary["samples"] == 65
        assert summary["verdicts_total"] == 2

    def test_first_sample_is_initial_energy(self, tmp_path):
        config = make_run_config(tmp_path)
        outcome = run_heat(config)
        assert outcome.series.times[0] == 0.0
        assert outcome.series.l2_sq[0] == pytest.approx(initial_state(config, galerkin=False).u.energy())

    def test_window_and_fits(self, tmp_path):
        config = make_run_config(tmp_path)
        outcome = run_heat(config)
        assert outcome.series.valid_window == run_window(config, galerkin=False)
        assert [f.which for f in outcome.fits] == ["l2_sq", "deriv1_sq"]
        assert all(f.valid for f in outcome.fits)

    def test_sobolev_column(self, tmp_path):
        outcome = run_heat(make_run_config(tmp_path, sobolev_s=0.5))
        assert outcome.series.hs_sq is not None
        assert "hs_sq" in [v.which for v in outcome.verdicts]

    def test_sobolev_index_below_threshold_is_not_applicable(self, tmp_path):
        outcome = run_heat(make_run_config(tmp_path, sobolev_s=0.1))
        hs = next(v for v in outcome.verdicts if v.which == "hs_sq")
        assert hs.claim is None
        assert not hs.applicable
        assert hs.deviation is not None
        assert "below 5/2 - 2 alpha" in hs.note
        assert not hs.failed

    def test_sobolev_index_at_threshold_is_judged(self, tmp_path):
        outcome = run_heat(make_run_config(tmp_path, sobolev_s=0.5))
        hs = next(v for v in outcome.verdicts if v.which == "hs_sq")
        assert hs.claim == DecayClaim.SOBOLEV_SMALL_DATA.value
        assert hs.applicable

    def test_series_csv_matches_export(self, tmp_path):
        config = make_run_config(tmp_path)
        outcome = run_heat(config)
        written = (outcome.run_dir / "series.csv").read_text()
        assert written == series_to_csv(outcome.series, config.m_list)

    def test_byte_identical_csv(self, tmp_path):
        a = run_heat(make_run_config(tmp_path / "a"))
        b = run_heat(make_run_config(tmp_path / "b"))
        assert (a.run_dir / "series.csv").read_bytes() == (b.run_dir / "series.csv").read_bytes()

    def test_progress_callbacks(self, tmp_path):
        progress = RunProgress()
        seen = []
        progress.on_start = seen.append
        run_heat(make_run_config(tmp_path), progress=progress)
        assert seen == [65]
        assert progress.completed_steps == 65


class TestRunSimulate:
    def test_artifacts_and_summary(self, tmp_path):
        config = make_run_config(tmp_path, mode="sim", snapshot_every=5)
        outcome = run_simulate(config)
        for name in ARTIFACTS:
            assert (outcome.run_dir / name).exists()
        assert outcome.series.times.size == 11
        assert outcome.summary.steps == 20
        assert outcome.summary.c_star_initial <= 1.0 + 1e-12
        assert outcome.summary.max_relative_defect < 1e-3
        assert np.isfinite(outcome.summary.add6_constant)
        snapshots = sorted(p.name for p in (outcome.run_dir / "snapshots").iterdir())
        assert snapshots == ["00000000.fns", "00000010.fns", "00000020.fns"]

    def test_empty_window_marks_fits_invalid(self, tmp_path):
        outcome = run_simulate(make_run_config(tmp_path, mode="sim"))
        assert outcome.summary.valid_window is None
        statuses = [v.status for v in outcome.verdicts]
        # Taylor-Green data carries no Lebesgue exponent
        assert statuses[0] == VerdictStatus.INAPPLICABLE
        assert VerdictStatus.INVALID_WINDOW in statuses
        assert outcome.exit_code == EXIT_VERDICT_FAILED

    def test_byte_identical_csv(self, tmp_path):
        a = run_simulate(make_run_config(tmp_path / "a", mode="sim"))
        b = run_simulate(make_run_config(tmp_path / "b", mode="sim"))
        assert (a.run_dir / "series.csv").read_bytes() == (b.run_dir / "series.csv").read_bytes()

    def test_blowup_writes_failure(self, tmp_path, monkeypatch):
        original = galerkin.step

        def failing_step(state, params, rhs=galerkin.nonlinear_rhs):
            if state.step >= 3:
                raise BlowUpError(last_time=state.t, step=state.step)
            return original(state, params, rhs)

        monkeypatch.setattr(galerkin, "step", failing_step)
        outcome = run_simulate(make_run_config(tmp_path, mode="sim"))
        assert outcome.exit_code == EXIT_BLOWUP
        failure = json.loads((outcome.run_dir / "failure.json").read_text())
        assert failure["error"] == "blow-up"
        assert failure["step"] == 3
        assert failure["last_finite_time"] == pytest.approx(0.15)
        rows = (outcome.run_dir / "series.csv").read_text().splitlines()
        assert len(rows) == 3
        assert not (outcome.run_dir / "verdicts.json").exists()


@pytest.mark.slow
class TestFlagship:
    def test_small_data_tracks_heat_oracle(self, tmp_path):
        config = flagship_config().model_copy(update={"output_dir": tmp_path / "flagship"})
        outcome = run_simulate(config)
        summary = outcome.summary
        assert outcome.exit_code == EXIT_OK
        assert summary.transfer_ratio <= 0.05
        assert summary.oracle_deviation <= 0.05
        assert summary.c_star_initial <= 1.0 + 1e-12
        assert summary.c_star_trend <= 1.2
        l2 = next(v for v in outcome.verdicts if v.which == "l2_sq")
        assert l2.status == VerdictStatus.PASS

    def test_energy_defect_over_unit_time(self):
        config = flagship_config()
        params = config.params.model_copy(update={"dt": 1e-3, "t_end": 1.0})
        states = list(integrate(initial_state(config), params, sample_every=10))
        assert energy_budget(states, params).max_relative_defect() < 1e-5

    def test_energy_defect_improves_at_quarter_step(self):
        config = flagship_config()

        def defect(dt: float) -> float:
            params = config.params.model_copy(update={"dt": dt, "t_end": 1.0})
            states = list(integrate(initial_state(config), params, sample_every=100))
            return energy_budget(states, params).max_relative_defect()

        coarse, fine = defect(1e-3), defect(2.5e-4)
        assert coarse < 1e-5
        assert coarse / fine >= 10.0

    def test_byte_identical_csv(self, tmp_path):
        paths = []
        for name in ("a", "b"):
            config = flagship_config().model_copy(update={"output_dir": tmp_path / name})
            paths.append(run_simulate(config).run_dir / "series.csv")
        assert paths[0].read_bytes() == paths[1].read_bytes()
