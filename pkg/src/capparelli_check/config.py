"""Configuration management for capparelli-check."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

# Config lives in the project root (next to pyproject.toml).
# _find_project_root() walks up from this file to find it.

def _find_project_root() -> Path:
    """Find project root by looking for pyproject.toml."""
    current = Path(__file__).resolve().parent
    for parent in [current, *current.parents]:
        if (parent / "pyproject.toml").exists():
            return parent
    return current  # fallback


PROJECT_ROOT = _find_project_root()
CONFIG_FILE = PROJECT_ROOT / "capparelli.yaml"


@dataclass(frozen=True)
class Profile:
    """Verification bounds for one run.

    ``q_bound``/``d_bound`` govern the series-versus-series cases; the other
    bounds cap the enumerations, which grow much faster.
    """

    name: str
    q_bound: int
    d_bound: int
    family_q_bound: int
    d1_q_bound: int
    count_bound: int
    capparelli_bound: int
    audit_bound: int
    audit_full_bound: int
    audit_k: int
    lemma_q_bound: int
    lemma_series_bound: int

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name != "name" and (not isinstance(value, int) or value < 0):
                raise ValueError(f"profile {self.name}: {f.name} must be a non-negative integer, got {value!r}")

    def with_bounds(self, q_bound: int | None = None, d_bound: int | None = None) -> Profile:
        """Apply --max-q / --max-d: the q-bound caps every weight bound, the d-bound every d-bound."""
        updates: dict[str, int] = {}
        if q_bound is not None:
            updates.update(
                q_bound=q_bound,
                family_q_bound=q_bound,
                d1_q_bound=q_bound,
                count_bound=q_bound,
                capparelli_bound=q_bound,
                audit_bound=q_bound,
                audit_full_bound=q_bound,
                lemma_q_bound=q_bound,
                lemma_series_bound=q_bound,
            )
        if d_bound is not None:
            updates.update(d_bound=d_bound, audit_k=d_bound)
        if not updates:
            return self
        return replace(self, name=f"{self.name}*", **updates)

    def to_dict(self) -> dict[str, int]:
        data = asdict(self)
        data.pop("name")
        return data


BUILTIN_PROFILES: dict[str, Profile] = {
    p.name: p
    for p in (
        Profile(
            name="quick",
            q_bound=12,
            d_bound=4,
            family_q_bound=10,
            d1_q_bound=8,
            count_bound=16,
            capparelli_bound=24,
            audit_bound=8,
            audit_full_bound=10,
            audit_k=3,
            lemma_q_bound=20,
            lemma_series_bound=12,
        ),
        Profile(
            name="standard",
            q_bound=20,
            d_bound=6,
            family_q_bound=18,
            d1_q_bound=12,
            count_bound=30,
            capparelli_bound=40,
            audit_bound=14,
            audit_full_bound=18,
            audit_k=4,
            lemma_q_bound=40,
            lemma_series_bound=30,
        ),
        Profile(
            name="deep",
            q_bound=30,
            d_bound=8,
            family_q_bound=20,
            d1_q_bound=20,
            count_bound=40,
            capparelli_bound=50,
            audit_bound=16,
            audit_full_bound=20,
            audit_k=4,
            lemma_q_bound=40,
            lemma_series_bound=30,
        ),
    )
}

_CONFIG_KEYS = {"default_profile", "workers", "log_level", "profiles"}


@dataclass
class Config:
    """Application configuration."""

    default_profile: str = "quick"
    workers: int = 1
    log_level: str = "WARNING"
    profiles: dict[str, Profile] = field(default_factory=lambda: dict(BUILTIN_PROFILES))

    @classmethod
    def load(cls, config_file: Path = CONFIG_FILE) -> Config:
        """Load config from a YAML file.

        Profiles in the file override built-in profiles field by field; a
        profile with a new name must give every bound or ``base`` one to start from.

        Raises FileNotFoundError if file doesn't exist.
        Raises ValueError if file contains invalid YAML or unknown keys.
        """
        if not config_file.exists():
            raise FileNotFoundError(f"Config file not found: {config_file}")

        text = config_file.read_text(encoding="utf-8")
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ValueError(f"Invalid config YAML: {e}") from e
        if not isinstance(data, dict):
            raise ValueError("Config must be a YAML mapping")

        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ValueError(f"Unknown config keys: {', '.join(sorted(unknown))}")

        profiles = dict(BUILTIN_PROFILES)
        for name, overrides in (data.get("profiles") or {}).items():
            profiles[name] = _merge_profile(name, overrides or {}, profiles)

        config = cls(
            default_profile=data.get("default_profile", "quick"),
            workers=int(data.get("workers", 1)),
            log_level=str(data.get("log_level", "WARNING")).upper(),
            profiles=profiles,
        )
        if config.default_profile not in profiles:
            raise ValueError(f"default_profile {config.default_profile!r} is not a known profile")
        if config.workers < 1:
            raise ValueError("workers must be >= 1")
        return config

    @classmethod
    def load_or_default(cls, config_file: Path | None = None) -> Config:
        """An explicit file must exist; the default location falls back to built-ins."""
        if config_file is not None:
            return cls.load(config_file)
        if CONFIG_FILE.exists():
            return cls.load(CONFIG_FILE)
        return cls()

    def save(self, config_file: Path = CONFIG_FILE) -> None:
        """Persist config to a YAML file. Creates parent directories if needed."""
        config_file.parent.mkdir(parents=True, exist_ok=True)
        data = {
            "default_profile": self.default_profile,
            "workers": self.workers,
            "log_level": self.log_level,
            "profiles": {name: p.to_dict() for name, p in self.profiles.items()},
        }
        config_file.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")

    def profile(self, name: str | None = None) -> Profile:
        name = name or self.default_profile
        try:
            return self.profiles[name]
        except KeyError:
            raise ValueError(f"unknown profile {name!r} (known: {', '.join(self.profiles)})") from None


def _merge_profile(name: str, overrides: dict, known: dict[str, Profile]) -> Profile:
    overrides = dict(overrides)
    base_name = overrides.pop("base", name)
    profile_fields = {f.name for f in fields(Profile)} - {"name"}
    unknown = set(overrides) - profile_fields
    if unknown:
        raise ValueError(f"profile {name}: unknown bounds {', '.join(sorted(unknown))}")
    base = known.get(base_name)
    if base is None:
        missing = profile_fields - set(overrides)
        if missing:
            raise ValueError(f"profile {name}: missing bounds {', '.join(sorted(missing))}")
        return Profile(name=name, **overrides)
    return replace(base, name=name, **overrides)
