"""Tests for capparelli_check.cli: Click CLI commands."""

from __future__ import annotations

import json
import shlex
from pathlib import Path

import pytest
from click.testing import CliRunner

from capparelli_check.cli import cli
from capparelli_check.models import Report, Verdict

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_CASES = sorted(GOLDEN.glob("*.in"))


# ---------------------------------------------------------------------------
# golden outputs
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("case", GOLDEN_CASES, ids=[p.stem for p in GOLDEN_CASES])
def test_golden(runner: CliRunner, case: Path) -> None:
    args = shlex.split(case.read_text(encoding="utf-8"))
    expected = case.with_suffix(".out").read_text(encoding="utf-8")
    result = runner.invoke(cli, args)
    assert result.exit_code == 0, result.output
    assert result.output == expected


# ---------------------------------------------------------------------------
# version and config
# ---------------------------------------------------------------------------


class TestGroup:
    def test_version_flag(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert "capparelli-check" in result.output

    def test_missing_config_file(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(cli, ["--config", str(tmp_path / "nope.yaml"), "verify", "--list"])
        assert result.exit_code == 64
        assert "Config file not found" in result.output

    def test_invalid_config(self, runner: CliRunner, tmp_path: Path) -> None:
        cfg = tmp_path / "bad.yaml"
        cfg.write_text("workers: 0\n", encoding="utf-8")
        result = runner.invoke(cli, ["--config", str(cfg), "verify", "--list"])
        assert result.exit_code == 64
        assert "Invalid config" in result.output

    def test_unknown_command_is_a_usage_error(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["frobnicate"])
        assert result.exit_code == 64


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


class TestVerify:
    def test_single_case_passes(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify", "--case", "ct", "--max-q", "10"])
        assert result.exit_code == 0, result.output
        assert "ct" in result.output
        assert "1/1 passed" in result.output

    def test_json_with_timings(self, runner: CliRunner) -> None:
        result = runner.invoke(
            cli, ["verify", "--case", "ct", "--case", "aag", "--max-q", "6", "--format", "json", "--timings"]
        )
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert [r["case"] for r in data] == ["aag", "ct"]
        assert all(r["verdict"] == "pass" and "wall_time" in r for r in data)

    def test_profile_from_config(self, runner: CliRunner, config_file: Path) -> None:
        result = runner.invoke(cli, ["--config", str(config_file), "verify", "--case", "ct", "--format", "json"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)[0]["bounds"] == {"q": 4}

    def test_list(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify", "--list"])
        assert result.exit_code == 0
        assert "worked-examples" in result.output

    def test_unknown_case(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify", "--case", "nosuch"])
        assert result.exit_code == 64
        assert "unknown case" in result.output

    def test_unknown_profile(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify", "--case", "ct", "--profile", "huge"])
        assert result.exit_code == 64

    def test_needs_a_selection(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify"])
        assert result.exit_code == 64
        assert "--case ID or --all" in result.output

    def test_case_and_all_conflict(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["verify", "--case", "ct", "--all"])
        assert result.exit_code == 64

    @pytest.mark.parametrize(("verdict", "code"), [(Verdict.FAIL, 1), (Verdict.BLOCKED, 2)])
    def test_exit_codes(self, runner: CliRunner, monkeypatch, verdict: Verdict, code: int) -> None:
        report = Report("ct", {"q": 3}, verdict, {"error": "x"})
        monkeypatch.setattr("capparelli_check.cli.verify_all", lambda *args: [report])
        result = runner.invoke(cli, ["verify", "--case", "ct"])
        assert result.exit_code == code
        assert 'ct: {"error": "x"}' in result.output
        assert "0/1 passed" in result.output


# ---------------------------------------------------------------------------
# enumerate
# ---------------------------------------------------------------------------


class TestEnumerate:
    def test_json_listing(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["enumerate", "--family", "cor1", "--n", "13", "--format", "json"])
        assert result.exit_code == 0, result.output
        lines = [json.loads(line) for line in result.output.splitlines()]
        assert len(lines) == 14
        assert lines[0] == {"parts": [{"value": 13, "overlined": True}], "n": 13, "stats": {"k": 0, "i": 1, "j": 0}}
        summary = lines[-1]
        assert summary["total"] == 13
        assert {"i": 1, "j": 0, "k": 1, "count": 4} in summary["gen_poly"]

    def test_coloured_family(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["enumerate", "--family", "c1", "--n", "2"])
        assert result.exit_code == 0, result.output
        assert "(2~a)" in result.output.splitlines()

    def test_infinite_family_needs_max_d(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["enumerate", "--family", "cbar", "--n", "3"])
        assert result.exit_code == 64
        assert "--max-d" in result.output

    def test_infinite_family_with_max_d(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["enumerate", "--family", "cbar", "--n", "2", "--max-d", "1"])
        assert result.exit_code == 0, result.output
        assert "# total:" in result.output

    def test_unknown_family(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["enumerate", "--family", "nosuch", "--n", "3"])
        assert result.exit_code == 64
        assert "unknown family" in result.output


# ---------------------------------------------------------------------------
# bijection, table, lemmas, series
# ---------------------------------------------------------------------------


class TestBijection:
    def test_full_weight_zero(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["bijection", "--variant", "full", "--n", "0"])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["status"] == "pass"
        assert data["images"] == 1

    def test_c2_with_d(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["bijection", "--variant", "c2", "--n", "4", "--max-d", "2"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["k_max"] == 2

    def test_unknown_variant(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["bijection", "--variant", "c4", "--n", "3"])
        assert result.exit_code == 64


class TestTable:
    def test_worked_cell(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["table", "--family", "dbar", "--max-n", "13"])
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0] == "n,k,i,j,count"
        assert "13,1,1,0,4" in lines

    def test_infinite_family_needs_max_d(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["table", "--family", "cbar", "--max-n", "3"])
        assert result.exit_code == 64


class TestLemmas:
    def test_small_suite(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["lemmas", "--max-q", "8", "--series-bound", "5", "--format", "json"])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert all(item["passed"] for item in data)
        assert {item["name"] for item in data} >= {"jtp", "qchu"}


class TestSeries:
    def test_product(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["series", "--builder", "product:aag", "--max-q", "4"])
        assert result.exit_code == 0, result.output
        data = json.loads(result.output)
        assert data["q_bound"] == 4
        assert data["d_bound"] is None
        assert data["terms"][0] == {"q": 0, "a": 0, "b": 0, "d": 0, "z": 0, "c": "1"}

    def test_quad_case(self, runner: CliRunner) -> None:
        result = runner.invoke(cli, ["series", "--builder", "quad:c1:2", "--max-q", "4", "--max-d", "1"])
        assert result.exit_code == 0, result.output
        assert json.loads(result.output)["d_bound"] == 1

    @pytest.mark.parametrize("builder", ["nosuch:x", "product:zzz", "quad:c2:1", "family:nosuch"])
    def test_bad_builder(self, runner: CliRunner, builder: str) -> None:
        result = runner.invoke(cli, ["series", "--builder", builder])
        assert result.exit_code == 64
