"""Tests for capparelli_check.config."""

from __future__ import annotations

from pathlib import Path

import pytest

from capparelli_check.config import BUILTIN_PROFILES, Config, Profile


class TestProfile:
    def test_builtins(self) -> None:
        assert set(BUILTIN_PROFILES) == {"quick", "standard", "deep"}
        assert BUILTIN_PROFILES["quick"].q_bound == 12

    def test_with_bounds_caps_every_weight(self) -> None:
        p = BUILTIN_PROFILES["standard"].with_bounds(q_bound=5)
        assert p.name == "standard*"
        assert (p.q_bound, p.family_q_bound, p.count_bound, p.audit_full_bound) == (5, 5, 5, 5)
        assert p.d_bound == BUILTIN_PROFILES["standard"].d_bound

    def test_with_bounds_d(self) -> None:
        p = BUILTIN_PROFILES["quick"].with_bounds(d_bound=1)
        assert (p.d_bound, p.audit_k) == (1, 1)
        assert p.q_bound == 12

    def test_without_overrides_is_unchanged(self) -> None:
        assert BUILTIN_PROFILES["quick"].with_bounds() is BUILTIN_PROFILES["quick"]

    def test_negative_bound_rejected(self, tiny_profile: Profile) -> None:
        with pytest.raises(ValueError, match="q_bound"):
            Profile(**{**tiny_profile.to_dict(), "name": "bad", "q_bound": -1})

    def test_to_dict_drops_name(self, tiny_profile: Profile) -> None:
        data = tiny_profile.to_dict()
        assert "name" not in data
        assert data["lemma_series_bound"] == 6


class TestConfig:
    def test_defaults(self) -> None:
        config = Config()
        assert config.default_profile == "quick"
        assert config.workers == 1
        assert config.log_level == "WARNING"
        assert config.profile() == BUILTIN_PROFILES["quick"]

    def test_load(self, config_file: Path) -> None:
        config = Config.load(config_file)
        assert config.log_level == "INFO"
        assert config.profile("quick").q_bound == 10
        assert config.profile("quick").d_bound == 4
        smoke = config.profile()
        assert smoke.name == "smoke"
        assert (smoke.q_bound, smoke.d_bound, smoke.family_q_bound) == (4, 1, 10)

    def test_save_and_load(self, tmp_path: Path, tiny_profile: Profile) -> None:
        config_file = tmp_path / "nested" / "capparelli.yaml"
        original = Config(default_profile="tiny", workers=3, log_level="DEBUG")
        original.profiles["tiny"] = tiny_profile
        original.save(config_file)

        loaded = Config.load(config_file)
        assert loaded.default_profile == "tiny"
        assert loaded.workers == 3
        assert loaded.profile() == tiny_profile
        assert loaded.profile("deep") == BUILTIN_PROFILES["deep"]

    def test_empty_file(self, tmp_path: Path) -> None:
        cfg = tmp_path / "empty.yaml"
        cfg.write_text("", encoding="utf-8")
        assert Config.load(cfg) == Config()

    def test_load_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError):
            Config.load(tmp_path / "nope.yaml")

    @pytest.mark.parametrize(
        ("text", "match"),
        [
            ("workers: [1, 2\n", "Invalid config YAML"),
            ("- quick\n", "mapping"),
            ("vault_path: x\n", "Unknown config keys: vault_path"),
            ("default_profile: huge\n", "not a known profile"),
            ("workers: 0\n", "workers"),
            ("profiles:\n  quick:\n    depth: 3\n", "unknown bounds depth"),
            ("profiles:\n  mine:\n    q_bound: 3\n", "missing bounds"),
            ("profiles:\n  mine:\n    base: nope\n    q_bound: 3\n", "missing bounds"),
        ],
    )
    def test_invalid(self, tmp_path: Path, text: str, match: str) -> None:
        cfg = tmp_path / "bad.yaml"
        cfg.write_text(text, encoding="utf-8")
        with pytest.raises(ValueError, match=match):
            Config.load(cfg)

    def test_unknown_profile(self) -> None:
        with pytest.raises(ValueError, match="unknown profile 'huge'"):
            Config().profile("huge")


class TestLoadOrDefault:
    def test_falls_back_to_builtins(self) -> None:
        assert Config.load_or_default() == Config()

    def test_uses_project_file(self, no_project_config: Path, config_file: Path) -> None:
        no_project_config.parent.mkdir(parents=True)
        no_project_config.write_text(config_file.read_text(encoding="utf-8"), encoding="utf-8")
        assert Config.load_or_default().default_profile == "smoke"

    def test_explicit_file_must_exist(self, tmp_path: Path) -> None:
        with pytest.raises(FileNotFoundError):
            Config.load_or_default(tmp_path / "nope.yaml")
