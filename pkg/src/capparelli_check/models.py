"""Core data models: coloured parts, jagged overpartitions, component
quadruples, staircase selections and verification reports."""

from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple


class Color(str, Enum):
    """Part colours; ``u`` is the uncoloured class."""

    A = "a"
    B = "b"
    U = "u"


COLORS: tuple[Color, ...] = (Color.A, Color.B, Color.U)


class Verdict(str, Enum):
    """Outcome of verifying one identity case."""

    PASS = "pass"
    FAIL = "fail"
    BLOCKED = "blocked"


class CaseKind(str, Enum):
    SERIES_EQ = "series-eq"
    COUNT_TABLE_EQ = "count-table-eq"
    BIJECTION_AUDIT = "bijection-audit"
    LEMMA = "lemma"


class Stats(NamedTuple):
    """The refined statistics (k, i, j) of a counted object."""

    k: int
    i: int
    j: int


# ---------------------------------------------------------------------------
# Parts and partitions
# ---------------------------------------------------------------------------


_PART_RE = re.compile(r"^(?P<value>\d+)(?P<over>~?)(?P<color>[abu]?)$")


@dataclass(frozen=True, order=True)
class ColoredPart:
    """A non-negative part with a colour and an overline flag."""

    value: int
    color: Color = Color.U
    overlined: bool = False

    def __post_init__(self) -> None:
        if self.value < 0:
            raise ValueError(f"part value must be >= 0, got {self.value}")
        if self.overlined and self.value < 1:
            raise ValueError("zero parts cannot be overlined")
        if not isinstance(self.color, Color):
            object.__setattr__(self, "color", Color(self.color))

    def render(self, colored: bool = True) -> str:
        """Text form: value, ``~`` when overlined, then the colour letter."""
        tilde = "~" if self.overlined else ""
        suffix = self.color.value if colored else ""
        return f"{self.value}{tilde}{suffix}"

    def to_json(self, colored: bool = True) -> dict:
        data: dict = {"value": self.value}
        if colored:
            data["color"] = self.color.value
        data["overlined"] = self.overlined
        return data


def parse_part(text: str, default_color: Color = Color.U) -> ColoredPart:
    """Parse the text form of a part.

    >>> parse_part("5~b")
    ColoredPart(value=5, color=<Color.B: 'b'>, overlined=True)
    >>> parse_part("13").value
    13
    """
    match = _PART_RE.match(text.strip())
    if match is None:
        raise ValueError(f"not a part: {text!r}")
    color = Color(match["color"]) if match["color"] else default_color
    return ColoredPart(int(match["value"]), color, bool(match["over"]))


@dataclass(frozen=True)
class JaggedOverpartition:
    """Parts left to right as written; successive differences may be negative."""

    parts: tuple[ColoredPart, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.parts, tuple):
            object.__setattr__(self, "parts", tuple(self.parts))

    def __len__(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(p.value for p in self.parts)

    def count(self, color: Color) -> int:
        return sum(1 for p in self.parts if p.color is color)

    @property
    def non_overlined(self) -> int:
        return sum(1 for p in self.parts if not p.overlined)

    def stats(self) -> Stats:
        return Stats(self.non_overlined, self.count(Color.A), self.count(Color.B))

    def without_overlines(self) -> JaggedOverpartition:
        return JaggedOverpartition(tuple(ColoredPart(p.value, p.color) for p in self.parts))

    def render(self, colored: bool = True) -> str:
        return "(" + ", ".join(p.render(colored) for p in self.parts) + ")"

    def key(self) -> str:
        """Canonical serialization used for multiset comparisons."""
        return self.render(colored=True)


def parse_partition(text: str | Iterable[str], default_color: Color = Color.U) -> JaggedOverpartition:
    """Parse ``"(4a, 5~b, 2u)"`` or a list of part strings.

    >>> parse_partition("(10~, 1, 2~)").weight
    13
    >>> parse_partition("()")
    JaggedOverpartition(parts=())
    """
    if isinstance(text, str):
        body = text.strip().removeprefix("(").removesuffix(")")
        items = [item for item in body.split(",") if item.strip()]
    else:
        items = list(text)
    return JaggedOverpartition(tuple(parse_part(item, default_color) for item in items))


class Part(NamedTuple):
    """An uncoloured part of a product-side overpartition."""

    value: int
    overlined: bool = False


@dataclass(frozen=True)
class UncoloredOverpartition:
    """Weakly decreasing parts; only the final occurrence of a value may be overlined."""

    parts: tuple[Part, ...] = ()

    @property
    def weight(self) -> int:
        return sum(p.value for p in self.parts)

    def render(self) -> str:
        return "(" + ", ".join(f"{p.value}{'~' if p.overlined else ''}" for p in self.parts) + ")"

    def key(self) -> str:
        return self.render()


# ---------------------------------------------------------------------------
# Bijection inputs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComponentQuadruple:
    """The four source partitions of the level construction.

    ``lam_a``/``lam_b`` are distinct positive parts, ``lam_ab`` positive odd
    parts and ``lam_u`` non-negative parts, all stored in decreasing order.
    """

    lam_a: tuple[int, ...] = ()
    lam_b: tuple[int, ...] = ()
    lam_ab: tuple[int, ...] = ()
    lam_u: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for name in ("lam_a", "lam_b", "lam_ab", "lam_u"):
            value = tuple(getattr(self, name))
            object.__setattr__(self, name, value)
            if any(x < y for x, y in zip(value, value[1:])):
                raise ValueError(f"{name} must be in decreasing order: {value}")
        for name in ("lam_a", "lam_b"):
            value = getattr(self, name)
            if len(set(value)) != len(value) or any(x < 1 for x in value):
                raise ValueError(f"{name} must have distinct positive parts: {value}")
        if any(x < 1 or x % 2 == 0 for x in self.lam_ab):
            raise ValueError(f"lam_ab must have positive odd parts: {self.lam_ab}")
        if any(x < 0 for x in self.lam_u):
            raise ValueError(f"lam_u must have non-negative parts: {self.lam_u}")

    @property
    def r(self) -> int:
        return len(self.lam_a)

    @property
    def s(self) -> int:
        return len(self.lam_b)

    @property
    def v(self) -> int:
        return len(self.lam_ab)

    @property
    def t(self) -> int:
        return len(self.lam_u)

    @property
    def size(self) -> int:
        """Number of parts of the composed jagged partition."""
        return self.r + self.s + self.t + 2 * self.v

    @property
    def weight(self) -> int:
        return sum(self.lam_a) + sum(self.lam_b) + sum(self.lam_ab) + sum(self.lam_u)

    def to_json(self) -> dict:
        return {
            "lam_a": list(self.lam_a),
            "lam_b": list(self.lam_b),
            "lam_ab": list(self.lam_ab),
            "lam_u": list(self.lam_u),
        }


@dataclass(frozen=True)
class StaircaseSelection:
    """Indices 1..window are optional (kept iff in ``chosen``); window+1..m are forced."""

    m: int
    window: int
    chosen: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "chosen", frozenset(self.chosen))
        if not 0 <= self.window <= self.m:
            raise ValueError(f"window {self.window} outside 0..{self.m}")
        stray = sorted(k for k in self.chosen if not 1 <= k <= self.window)
        if stray:
            raise ValueError(f"chosen indices {stray} outside the window 1..{self.window}")

    @classmethod
    def full(cls, m: int) -> StaircaseSelection:
        """The classical staircase: every index forced."""
        return cls(m=m, window=0)

    @property
    def forced(self) -> range:
        return range(self.window + 1, self.m + 1)

    @property
    def indices(self) -> list[int]:
        return sorted(self.chosen) + list(self.forced)

    @property
    def lift(self) -> int:
        """q-exponent added by the selection."""
        return sum(self.indices)

    @property
    def d_exponent(self) -> int:
        return self.window - len(self.chosen)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class LemmaResult:
    """One check of the lemma suite."""

    name: str
    params: str
    passed: bool
    detail: dict | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "params": self.params, "passed": self.passed, "detail": self.detail}


@dataclass
class AuditReport:
    """Outcome of a bijection audit."""

    variant: str
    n: int
    k_max: int
    passed: bool
    images: int = 0
    witness: dict | None = None
    reason: str | None = None

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"

    def to_json(self) -> dict:
        data = {
            "variant": self.variant,
            "n": self.n,
            "k_max": self.k_max,
            "status": self.status,
            "witness": self.witness,
            "images": self.images,
        }
        if self.reason:
            data["reason"] = self.reason
        return data


@dataclass
class Report:
    """Result of verifying a single identity case."""

    case_id: str
    bounds: dict[str, int | None]
    verdict: Verdict
    discrepancy: dict | None = None
    wall_time: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    def to_json(self, timings: bool = False) -> dict:
        data: dict = {
            "case": self.case_id,
            "bounds": self.bounds,
            "verdict": self.verdict.value,
            "discrepancy": self.discrepancy,
        }
        if self.notes:
            data["notes"] = list(self.notes)
        if timings:
            data["wall_time"] = round(self.wall_time, 3)
        return data
