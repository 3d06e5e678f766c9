"""Shared test fixtures for capparelli-check tests."""

from __future__ import annotations

from pathlib import Path

import pytest
from click.testing import CliRunner

from capparelli_check.config import Profile


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()


@pytest.fixture(autouse=True)
def no_project_config(tmp_path: Path, monkeypatch) -> Path:
    """Point the default config location at a file that does not exist."""
    missing = tmp_path / "no-config" / "capparelli.yaml"
    monkeypatch.setattr("capparelli_check.config.CONFIG_FILE", missing)
    return missing


@pytest.fixture
def tiny_profile() -> Profile:
    """Bounds small enough to run every registry case in a few seconds."""
    return Profile(
        name="tiny",
        q_bound=6,
        d_bound=2,
        family_q_bound=6,
        d1_q_bound=5,
        count_bound=8,
        capparelli_bound=12,
        audit_bound=5,
        audit_full_bound=6,
        audit_k=2,
        lemma_q_bound=10,
        lemma_series_bound=6,
    )


@pytest.fixture
def config_file(tmp_path: Path) -> Path:
    """A config file with an overridden quick profile and a custom one."""
    cfg = tmp_path / "cfg" / "capparelli.yaml"
    cfg.parent.mkdir()
    cfg.write_text(
        """\
default_profile: smoke
workers: 1
log_level: info
profiles:
  quick:
    q_bound: 10
  smoke:
    base: quick
    q_bound: 4
    d_bound: 1
""",
        encoding="utf-8",
    )
    return cfg
