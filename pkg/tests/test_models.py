"""Tests for run config models and verification records."""

import math

import pytest
from pydantic import ValidationError

from gns_decay.initial_data import p_for_sigma
from gns_decay.models import (
    RunConfig,
    SimParams,
    SpectrumSpec,
    TaylorGreenSpec,
    Verdict,
    VerdictStatus,
    WindowSettings,
)
from gns_decay.spectral import Grid
from tests.conftest import TWO_PI, make_run_config


def _verdict(status: VerdictStatus) -> Verdict:
    return Verdict(
        which="l2_sq", p=1.0, alpha=1.0, m=0, predicted=1.5, fitted=1.5,
        tolerance=0.1, status=status, claim=None, regime="supercritical", window_valid=True,
    )


class TestSimParams:
    def test_defaults(self):
        params = SimParams(alpha=1.0, dt=0.1, t_end=1.0)
        assert params.nu == 1.0
        assert params.gamma == 3.0
        assert params.cutoff_N is None
        assert params.dealias

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 1.3])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValidationError):
            SimParams(alpha=alpha, dt=0.1, t_end=1.0)

    def test_critical_alpha_allowed(self):
        assert SimParams(alpha=1.25, dt=0.1, t_end=1.0).alpha == 1.25

    def test_horizon_shorter_than_step(self):
        with pytest.raises(ValidationError, match="at least dt"):
            SimParams(alpha=1.0, dt=1.0, t_end=0.5)

    def test_frozen(self):
        params = SimParams(alpha=1.0, dt=0.1, t_end=1.0)
        with pytest.raises(ValidationError):
            params.alpha = 0.5


class TestRunConfig:
    def test_discriminated_initial_data(self):
        config = RunConfig.model_validate(
            {
                "grid": {"n": 8, "box_length": TWO_PI},
                "params": {"alpha": 1.0, "dt": 0.1, "t_end": 1.0},
                "initial_data": {"kind": "taylor_green"},
            }
        )
        assert isinstance(config.initial_data, TaylorGreenSpec)
        assert config.schema_version == 1
        assert config.m_list == [1, 2]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValidationError):
            RunConfig.model_validate(
                {
                    "grid": {"n": 8, "box_length": TWO_PI},
                    "params": {"alpha": 1.0, "dt": 0.1, "t_end": 1.0},
                    "initial_data": {"kind": "vortex_ring"},
                }
            )

    def test_schema_version_checked(self, tmp_path):
        data = make_run_config(tmp_path).model_dump(mode="json")
        data["schema_version"] = 2
        with pytest.raises(ValidationError):
            RunConfig.model_validate(data)

    def test_m_list_sorted_and_deduplicated(self, tmp_path):
        assert make_run_config(tmp_path, m_list=[2, 1, 2]).m_list == [1, 2]

    def test_m_list_rejects_zero(self, tmp_path):
        with pytest.raises(ValidationError):
            make_run_config(tmp_path, m_list=[0, 1])

    def test_cutoff_beyond_dealias_radius(self):
        with pytest.raises(ValidationError, match="dealias radius"):
            RunConfig(
                grid=Grid(n=8, box_length=TWO_PI),
                params=SimParams(alpha=1.0, dt=0.1, t_end=1.0, cutoff_N=3.0),
                initial_data=TaylorGreenSpec(),
            )

    def test_taylor_green_needs_3d(self):
        with pytest.raises(ValidationError, match="3D"):
            RunConfig(
                grid=Grid(n=8, box_length=TWO_PI, dim=2),
                params=SimParams(alpha=1.0, dt=0.1, t_end=1.0),
                initial_data=TaylorGreenSpec(),
            )

    def test_fit_window_order(self):
        with pytest.raises(ValidationError):
            WindowSettings(fit_window=(5.0, 1.0))

    def test_json_round_trip(self, tmp_path):
        config = make_run_config(tmp_path, sobolev_s=0.5)
        assert RunConfig.model_validate_json(config.model_dump_json()) == config


class TestResolvedValues:
    @pytest.mark.parametrize("sigma, p", [(0.0, 1.0), (-1.0, 1.5), (-1.5 + 1e-9, 2.0)])
    def test_p_from_sigma(self, tmp_path, sigma, p):
        config = make_run_config(tmp_path, initial_data=SpectrumSpec(sigma=sigma, xi_knee=0.07))
        assert config.resolved_p() == pytest.approx(p, rel=1e-6)

    @pytest.mark.parametrize("sigma", [-1.25, -0.75, -0.3])
    def test_p_agrees_with_sigma_inverse(self, tmp_path, sigma):
        config = make_run_config(tmp_path, initial_data=SpectrumSpec(sigma=sigma, xi_knee=0.07))
        assert config.resolved_p() == p_for_sigma(sigma)

    def test_explicit_p_wins(self, tmp_path):
        assert make_run_config(tmp_path, lebesgue_p=1.2).resolved_p() == 1.2

    def test_rough_sigma_has_no_p(self, tmp_path):
        config = make_run_config(tmp_path, initial_data=SpectrumSpec(sigma=0.5, xi_knee=0.07))
        assert config.resolved_p() is None

    def test_taylor_green_has_no_p(self, tmp_path):
        assert make_run_config(tmp_path, mode="sim").resolved_p() is None

    def test_resolved_cutoff(self, tmp_path):
        config = make_run_config(tmp_path, mode="sim")
        assert config.resolved_cutoff() == pytest.approx(2.0)
        params = config.params.model_copy(update={"cutoff_N": 1.5})
        assert config.model_copy(update={"params": params}).resolved_cutoff() == 1.5

    def test_heat_grid(self, tmp_path):
        config = make_run_config(tmp_path)
        assert config.grid.k_min == pytest.approx(2 * math.pi / (200 * math.pi))


class TestVerdict:
    @pytest.mark.parametrize(
        "status, failed",
        [
            (VerdictStatus.PASS, False),
            (VerdictStatus.FAIL, True),
            (VerdictStatus.NO_CLAIM, False),
            (VerdictStatus.INAPPLICABLE, False),
            (VerdictStatus.INVALID_WINDOW, True),
        ],
    )
    def test_failed(self, status, failed):
        assert _verdict(status).failed is failed

    @pytest.mark.parametrize("status", [VerdictStatus.FAIL, VerdictStatus.INVALID_WINDOW])
    def test_uncovered_verdict_never_fails(self, status):
        verdict = _verdict(status).model_copy(update={"applicable": False})
        assert not verdict.failed

    def test_applicable_serialized(self):
        data = _verdict(VerdictStatus.PASS).model_dump(mode="json")
        assert data["applicable"] is True

    def test_status_serializes_as_value(self):
        data = _verdict(VerdictStatus.INVALID_WINDOW).model_dump(mode="json")
        assert data["status"] == "invalid-window"
