"""Tests for verification campaigns."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from koszul_truncation.campaign import (
    CHECKS,
    CampaignReport,
    CheckResult,
    complex_invariants,
    run_campaign,
    run_check,
    write_report,
)
from koszul_truncation.errors import InstanceError
from koszul_truncation.instance import InstanceFile

LINE = {
    "ring": {"variables": ["x", "y"]},
    "module": {"relations": ["x^2", "x*y"]},
    "q": ["x", "y"],
    "a": [{"monomial": "y", "c": 1}],
    "params": {"n": 4},
}

NOT_SOP = {
    "ring": {"nvars": 2},
    "q": ["x", "y"],
    "a": [{"monomial": "x^2", "c": 1}],
}


@pytest.fixture
def campaign_file(tmp_path: Path) -> Path:
    (tmp_path / "line.yaml").write_text(yaml.dump(LINE, sort_keys=False))
    campaign = {
        "entries": [
            {"name": "line", "instance": "line.yaml", "checks": ["mult1", "bogus"]},
            {"name": "line-n2", "instance": "line.yaml", "checks": ["sat"], "params": {"n": 2}},
            {"name": "inline", "instance": NOT_SOP, "checks": ["mult1"]},
            {"name": "missing", "instance": "absent.yaml", "checks": ["mult1"]},
        ]
    }
    path = tmp_path / "campaign.yaml"
    path.write_text(yaml.dump(campaign, sort_keys=False))
    return path


class TestRunCheck:
    def test_known_checks(self) -> None:
        assert set(CHECKS) >= {"mult1", "mult2", "cech-H", "cech-L", "les", "complex-coL"}

    def test_pass(self) -> None:
        result = run_check("mult1", InstanceFile.from_dict(LINE), "line")
        assert result.success
        assert result.verdict == "PASS"
        assert result.numbers == {"chi": 1, "e0_a": 1}
        assert str(result).startswith("✓ line:mult1 PASS")

    def test_unknown_check(self) -> None:
        result = run_check("bogus", InstanceFile.from_dict(LINE))
        assert result.verdict == "ERROR"
        assert result.exit_code == 2

    def test_engine_error_becomes_invalid(self) -> None:
        result = run_check("mult1", InstanceFile.from_dict(NOT_SOP))
        assert result.verdict == "INVALID"
        assert result.exit_code == 2

    def test_complex_invariants(self) -> None:
        checks = complex_invariants("K", InstanceFile.from_dict(LINE))
        assert checks == {
            "d_squared": True,
            "annihilation": True,
            "permutation": True,
            "cone": True,
        }


class TestRunCampaign:
    def test_results_and_exit_code(self, campaign_file: Path) -> None:
        report = run_campaign(campaign_file)
        outcome = [(r.entry, r.check, r.verdict) for r in report.results]
        assert outcome == [
            ("line", "mult1", "PASS"),
            ("line", "bogus", "ERROR"),
            ("line-n2", "sat", "PASS"),
            ("inline", "mult1", "INVALID"),
            ("missing", "load", "INVALID"),
        ]
        assert report.exit_code == 2

    def test_entry_params_override_file(self, campaign_file: Path) -> None:
        report = run_campaign(campaign_file)
        sat = next(r for r in report.results if r.check == "sat")
        assert sat.numbers == {"ideal": "[x, y^2]", "stage": 1, "full": False}

    def test_not_a_mapping(self, tmp_path: Path) -> None:
        path = tmp_path / "list.yaml"
        path.write_text("- a\n- b\n")
        with pytest.raises(InstanceError, match="mapping"):
            run_campaign(path)

    def test_empty_campaign_passes(self, tmp_path: Path) -> None:
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert run_campaign(path).exit_code == 0


class TestWriteReport:
    def test_flat_yaml(self, tmp_path: Path) -> None:
        report = CampaignReport(
            [
                CheckResult("mult1", "PASS", 0, {"chi": 1}, entry="a"),
                CheckResult("les", "FAIL", 1, entry="a"),
            ]
        )
        out = tmp_path / "reports" / "run.yaml"
        write_report(report, out)
        data = yaml.safe_load(out.read_text())
        assert data["passed"] == 1
        assert data["failed"] == 1
        assert data["results"][0] == {
            "entry": "a",
            "check": "mult1",
            "verdict": "PASS",
            "exit_code": 0,
            "message": "",
            "numbers": {"chi": 1},
        }
