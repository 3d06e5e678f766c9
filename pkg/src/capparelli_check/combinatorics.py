"""Counted families of coloured jagged overpartitions and the product-side
counters they are compared against.

A family is a ``FamilySpec``: a gap rule (a difference matrix, a dilated
matrix, or a prose rule on residues), a part domain, the forbidden final
parts and any non-local side conditions. Side conditions are checked on the
finished object; the enumerator only prunes on weight, the non-overline
budget, the part domain and the local gaps.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

from .models import (
    COLORS,
    Color,
    ColoredPart,
    JaggedOverpartition,
    Part,
    Stats,
    UncoloredOverpartition,
    parse_partition,
)
from .series import MOD3, MOD4, Bounds, DilationRule, Monomial, TruncatedSeries

logger = logging.getLogger(__name__)

A, B, U = Color.A, Color.B, Color.U


class DilationDomainError(ValueError):
    """A part dilates to a non-positive value."""

    def __init__(self, part: ColoredPart, rule: DilationRule, image: int) -> None:
        self.part = part
        self.rule = rule
        self.image = image
        super().__init__(f"{part.render()} dilates under {rule.name} to {image}, which is not positive")


class UnboundedFamilyError(ValueError):
    """An infinite family was enumerated without a non-overline budget."""


class UnknownFamilyError(ValueError):
    """No family or product side is registered under the given id."""


# ---------------------------------------------------------------------------
# Gap rules
# ---------------------------------------------------------------------------


class GapRule(Protocol):
    def gap(self, left: ColoredPart, right: ColoredPart) -> int: ...


Cell = tuple[bool, Color]


@dataclass(frozen=True)
class DifferenceMatrix:
    """Minimal difference table indexed by (overlined, colour) of both parts.

    Overline-free matrices have only non-overlined rows and columns.
    """

    name: str
    gaps: dict[Cell, dict[Cell, int]]

    @classmethod
    def plain(cls, name: str, rows: dict[Color, tuple[int, int, int]]) -> DifferenceMatrix:
        """A 3x3 matrix over colours a, b, u."""
        return cls(
            name,
            {(False, x): {(False, y): g for y, g in zip(COLORS, row)} for x, row in rows.items()},
        )

    @classmethod
    def barred(cls, name: str, rows: dict[Cell, tuple[int, ...]]) -> DifferenceMatrix:
        """A 6x6 matrix; columns in the order a~, b~, u~, a, b, u."""
        columns = [(True, c) for c in COLORS] + [(False, c) for c in COLORS]
        return cls(name, {cell: dict(zip(columns, row)) for cell, row in rows.items()})

    @property
    def has_overlines(self) -> bool:
        return any(over for over, _ in self.gaps)

    def gap(self, left: ColoredPart, right: ColoredPart) -> int:
        try:
            return self.gaps[(left.overlined, left.color)][(right.overlined, right.color)]
        except KeyError:
            raise ValueError(
                f"matrix {self.name} has no entry for {left.render()} -> {right.render()}"
            ) from None


C_MATRIX = DifferenceMatrix.plain(
    "C",
    {
        A: (2, 0, 2),
        B: (2, 2, 3),
        U: (1, 0, 1),
    },
)

C_BAR = DifferenceMatrix.barred(
    "Cbar",
    {
        (True, A): (2, 0, 2, 2, 0, 2),
        (True, B): (2, 2, 3, 2, 2, 3),
        (True, U): (1, 0, 1, 1, 0, 1),
        (False, A): (1, -1, 1, 1, -1, 1),
        (False, B): (1, 1, 2, 1, 1, 2),
        (False, U): (0, -1, 0, 0, -1, 0),
    },
)

C_STAR = DifferenceMatrix.plain(
    "Cstar",
    {
        A: (2, 0, 3),
        B: (2, 2, 3),
        U: (0, 0, 1),
    },
)

MATRICES: dict[str, DifferenceMatrix] = {m.name: m for m in (C_MATRIX, C_BAR, C_STAR)}


def min_gap(matrix: GapRule, left: ColoredPart, right: ColoredPart) -> int:
    """Minimal allowed ``left.value - right.value``."""
    return matrix.gap(left, right)


@dataclass(frozen=True)
class DilatedMatrix:
    """A difference matrix read on dilated part values.

    Undilated gap g between colours X and Y becomes ``scale*g + shift_X - shift_Y``.
    """

    matrix: DifferenceMatrix
    rule: DilationRule

    def gap(self, left: ColoredPart, right: ColoredPart) -> int:
        g = self.matrix.gap(left, right)
        return self.rule.scale * g + self.rule.part(0, left.color.value) - self.rule.part(0, right.color.value)


@dataclass(frozen=True)
class ResidueGap:
    """Prose difference conditions on residues, as stated for the dilated corollaries.

    ``lo`` applies when the left part is in ``lo_left`` or the pair sum is in
    ``lo_sum`` (both modulo ``modulus``), ``hi`` otherwise; an overlined left
    part adds ``overline``.
    """

    modulus: int
    lo: int
    hi: int
    lo_sum: frozenset[int]
    lo_left: frozenset[int] = frozenset()
    overline: int = 0

    def gap(self, left: ColoredPart, right: ColoredPart) -> int:
        low = left.value % self.modulus in self.lo_left or (left.value + right.value) % self.modulus in self.lo_sum
        base = self.lo if low else self.hi
        return base + (self.overline if left.overlined else 0)


@dataclass(frozen=True)
class DistinctResidueGap:
    """Gap 2, raised to ``wide`` unless the pair sum (or, with ``larger_counts``, the larger part) is 0 mod 3.

    Covers the ordinary Capparelli rule (wide 4 unless the sum is 0 mod 3) and
    its companion (wide 5 unless the larger part or the sum is 0 mod 3).
    """

    wide: int
    larger_counts: bool

    def gap(self, left: ColoredPart, right: ColoredPart) -> int:
        narrow = (left.value + right.value) % 3 == 0 or (self.larger_counts and left.value % 3 == 0)
        return 2 if narrow else self.wide


# ---------------------------------------------------------------------------
# Side conditions
# ---------------------------------------------------------------------------


def _c1_rule(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """If the smallest u-part equals unit * (overlined parts from it on), the final part is overlined.

    The rightmost occurrence of the smallest u-value is used.
    """
    u_positions = [p for p, part in enumerate(parts) if part.color is U]
    if not u_positions:
        return True
    x_u = min(parts[p].value for p in u_positions)
    pos = max(p for p in u_positions if parts[p].value == x_u)
    overlined_after = sum(1 for part in parts[pos:] if part.overlined)
    if x_u == unit * overlined_after:
        return parts[-1].overlined
    return True


def _final_overlined(parts: tuple[ColoredPart, ...], count: int) -> bool:
    return all(part.overlined for part in parts[len(parts) - count :]) if count else True


def _c2_rule(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """The final l parts are overlined, l = number of b- and u-parts."""
    return _final_overlined(parts, sum(1 for p in parts if p.color is not A))


def _c3_rule(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """The final t parts are overlined, t = number of u-parts."""
    return _final_overlined(parts, sum(1 for p in parts if p.color is U))


def _c4_rule(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """No u-parts; with a phantom 0 appended, neighbours differ in parity iff the left one is non-overlined."""
    if any(p.color is U for p in parts):
        return False
    padded = parts + (ColoredPart(0, A),)
    for left, right in zip(padded, padded[1:]):
        if ((left.value - right.value) % 2 == 1) != (not left.overlined):
            return False
    return True


def _triple_rule(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """No consecutive (u, a, b) at the minimal gaps: equal values, or steps of 2 once dilated by 3."""
    step = 0 if unit == 1 else 2
    for x, y, z in zip(parts, parts[1:], parts[2:]):
        if (x.color, y.color, z.color) == (U, A, B) and x.value - y.value == step and y.value - z.value == step:
            return False
    return True


def _no_close_triple(parts: tuple[ColoredPart, ...], unit: int) -> bool:
    """No three successive parts differing by 2 each."""
    return not any(x.value - y.value == 2 and y.value - z.value == 2 for x, y, z in zip(parts, parts[1:], parts[2:]))


class Extra(str, Enum):
    C1 = "c1_rule"
    C2 = "c2_rule"
    C3 = "c3_rule"
    C4 = "c4_rule"
    TRIPLE = "cstar_triple_rule"
    CLOSE_TRIPLE = "no_close_triple"


EXTRA_RULES: dict[Extra, Callable[[tuple[ColoredPart, ...], int], bool]] = {
    Extra.C1: _c1_rule,
    Extra.C2: _c2_rule,
    Extra.C3: _c3_rule,
    Extra.C4: _c4_rule,
    Extra.TRIPLE: _triple_rule,
    Extra.CLOSE_TRIPLE: _no_close_triple,
}


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


def _weighted_domain(part: ColoredPart) -> bool:
    return True


def _no_zero_u(part: ColoredPart) -> bool:
    return not (part.color is U and part.value == 0)


def _aag_domain(part: ColoredPart) -> bool:
    """Positive parts with no 1_a or 1_b."""
    return part.value >= (1 if part.color is U else 2)


def _positive(part: ColoredPart) -> bool:
    return part.value >= 1


@dataclass(frozen=True)
class FamilySpec:
    """Definition of one counted family.

    ``colorer`` is set for uncoloured families: it assigns the colour class
    of a value from its residue, or None when the value is not allowed.
    ``unit`` is the scale of the side conditions (1 undilated, or the
    dilation factor).
    """

    id: str
    matrix: GapRule
    description: str
    exclusions: frozenset[tuple[int, Color | None, bool]] = frozenset()
    extras: tuple[Extra, ...] = ()
    domain: Callable[[ColoredPart], bool] = _weighted_domain
    colorer: Callable[[int], Color | None] | None = None
    overlines: bool = True
    tracks_k: bool = True
    finite: bool = True
    unit: int = 1
    dilation: DilationRule | None = None
    source: str | None = None

    @property
    def colored(self) -> bool:
        return self.colorer is None

    def stats(self, lam: JaggedOverpartition) -> Stats:
        k, i, j = lam.stats()
        return Stats(k if self.tracks_k else 0, i, j)

    def excluded_final(self, part: ColoredPart) -> bool:
        key_color = part.color if self.colored else None
        return (part.value, key_color, part.overlined) in self.exclusions

    def candidates(self, value: int) -> Iterator[ColoredPart]:
        """Parts of the given value in enumeration order: overlined first, colours a, b, u."""
        over_flags = (True, False) if self.overlines and value >= 1 else (False,)
        if self.colorer is not None:
            color = self.colorer(value)
            if color is None:
                return
            colors: tuple[Color, ...] = (color,)
        else:
            colors = COLORS
        for over in over_flags:
            for color in colors:
                part = ColoredPart(value, color, over)
                if self.domain(part):
                    yield part


def _residue_colorer(rule: DilationRule) -> Callable[[int], Color | None]:
    classes = {rule.part(0, c.value) % rule.scale: c for c in COLORS}

    def colorer(value: int) -> Color | None:
        return classes.get(value % rule.scale)

    return colorer


mod3_color = _residue_colorer(MOD3)
mod4_color = _residue_colorer(MOD4)

_BAR_EXCLUSIONS = frozenset({(0, A, False), (0, B, False), (1, A, True), (1, B, True)})

_COR1_GAP = ResidueGap(modulus=3, lo=-1, hi=1, lo_sum=frozenset({0}), overline=3)
_COR23_GAP = ResidueGap(modulus=4, lo=-2, hi=4, lo_sum=frozenset({3}), lo_left=frozenset({0}), overline=4)
_COR23_EXCLUSIONS = frozenset({(1, None, True), (1, None, False), (2, None, True), (5, None, True)})

FAMILIES: dict[str, FamilySpec] = {
    spec.id: spec
    for spec in (
        FamilySpec(
            "aag",
            C_MATRIX,
            "coloured partitions under C, no part 1_a or 1_b",
            domain=_aag_domain,
            overlines=False,
            tracks_k=False,
        ),
        FamilySpec(
            "cbar",
            C_BAR,
            "jagged overpartitions under Cbar",
            exclusions=_BAR_EXCLUSIONS,
            finite=False,
        ),
        FamilySpec(
            "c1",
            C_BAR,
            "Cbar with the smallest-u-part condition",
            exclusions=_BAR_EXCLUSIONS,
            extras=(Extra.C1,),
            domain=_no_zero_u,
        ),
        FamilySpec(
            "c2",
            C_BAR,
            "Cbar with the final (#b + #u) parts overlined",
            exclusions=_BAR_EXCLUSIONS,
            extras=(Extra.C2,),
            domain=_no_zero_u,
        ),
        FamilySpec(
            "c3",
            C_BAR,
            "Cbar with the final #u parts overlined",
            exclusions=_BAR_EXCLUSIONS,
            extras=(Extra.C3,),
            domain=_no_zero_u,
        ),
        FamilySpec(
            "c4",
            C_BAR,
            "Cbar without u-parts, parity changes exactly after non-overlined parts",
            exclusions=_BAR_EXCLUSIONS,
            extras=(Extra.C4,),
            domain=lambda part: part.color is not U,
        ),
        FamilySpec(
            "cstar_weighted",
            C_STAR,
            "coloured partitions under Cstar without the (u,a,b) triple at gaps (0,0)",
            extras=(Extra.TRIPLE,),
            domain=_aag_domain,
            overlines=False,
            tracks_k=False,
        ),
        FamilySpec(
            "cor1",
            _COR1_GAP,
            "positive jagged overpartitions, mod 3 gaps, final (#0 + #2 mod 3) parts overlined",
            exclusions=frozenset({(1, None, True)}),
            extras=(Extra.C2,),
            domain=_positive,
            colorer=mod3_color,
            unit=3,
            dilation=MOD3,
            source="c2",
        ),
        FamilySpec(
            "cor2",
            _COR23_GAP,
            "positive jagged overpartitions, no part 3 mod 4, smallest-0-mod-4 condition",
            exclusions=_COR23_EXCLUSIONS,
            extras=(Extra.C1,),
            domain=_positive,
            colorer=mod4_color,
            tracks_k=False,
            unit=4,
            dilation=MOD4,
            source="c1",
        ),
        FamilySpec(
            "cor3",
            _COR23_GAP,
            "positive jagged overpartitions, no part 3 mod 4, final #(0 mod 4) parts overlined",
            exclusions=_COR23_EXCLUSIONS,
            extras=(Extra.C3,),
            domain=_positive,
            colorer=mod4_color,
            tracks_k=False,
            unit=4,
            dilation=MOD4,
            source="c3",
        ),
        FamilySpec(
            "capparelli",
            DistinctResidueGap(wide=4, larger_counts=False),
            "parts > 1 differing by >= 2, and >= 4 unless the sum is 0 mod 3",
            domain=lambda part: part.value >= 2,
            colorer=mod3_color,
            overlines=False,
            tracks_k=False,
            unit=3,
        ),
        FamilySpec(
            "capparelli_dilated",
            DilatedMatrix(C_MATRIX, MOD3),
            "matrix C under q -> q^3, a -> aq^-2, b -> bq^-4",
            domain=lambda part: part.value >= 2,
            colorer=mod3_color,
            overlines=False,
            tracks_k=False,
            unit=3,
            dilation=MOD3,
            source="aag",
        ),
        FamilySpec(
            "cstar",
            DistinctResidueGap(wide=5, larger_counts=True),
            "parts > 1 differing by >= 2, >= 5 unless the larger part or the sum is 0 mod 3, no run x, x-2, x-4",
            extras=(Extra.CLOSE_TRIPLE,),
            domain=lambda part: part.value >= 2,
            colorer=mod3_color,
            overlines=False,
            tracks_k=False,
            unit=3,
        ),
        FamilySpec(
            "cstar_dilated",
            DilatedMatrix(C_STAR, MOD3),
            "matrix Cstar under q -> q^3 with the (u,a,b) triple rule",
            extras=(Extra.TRIPLE,),
            domain=lambda part: part.value >= 2,
            colorer=mod3_color,
            overlines=False,
            tracks_k=False,
            unit=3,
            dilation=MOD3,
            source="cstar_weighted",
        ),
    )
}


def get_family(family_id: str) -> FamilySpec:
    try:
        return FAMILIES[family_id]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise UnknownFamilyError(f"unknown family {family_id!r} (known: {known})") from None


# ---------------------------------------------------------------------------
# Validity and enumeration
# ---------------------------------------------------------------------------


def _part_allowed(spec: FamilySpec, part: ColoredPart) -> bool:
    if part.overlined and not spec.overlines:
        return False
    if spec.colorer is not None and spec.colorer(part.value) is not part.color:
        return False
    return spec.domain(part)


def _extras_hold(spec: FamilySpec, parts: tuple[ColoredPart, ...]) -> bool:
    return all(EXTRA_RULES[extra](parts, spec.unit) for extra in spec.extras)


def is_valid(spec: FamilySpec, lam: JaggedOverpartition) -> bool:
    """Check every adjacent gap, the final part, the part domain and the side conditions."""
    parts = lam.parts
    if not parts:
        return True
    if not all(_part_allowed(spec, p) for p in parts):
        return False
    for left, right in zip(parts, parts[1:]):
        if left.value - right.value < spec.matrix.gap(left, right):
            return False
    if spec.excluded_final(parts[-1]):
        return False
    return _extras_hold(spec, parts)


def parse_member(spec: FamilySpec | str, text: str | Iterable[str]) -> JaggedOverpartition:
    """Parse an object of ``spec``; uncoloured families take colours from residues."""
    if isinstance(spec, str):
        spec = get_family(spec)
    lam = parse_partition(text)
    if spec.colorer is None:
        return lam
    parts = []
    for part in lam.parts:
        color = spec.colorer(part.value)
        if color is None:
            raise ValueError(f"part {part.value} is outside family {spec.id}")
        parts.append(ColoredPart(part.value, color, part.overlined))
    return JaggedOverpartition(tuple(parts))


def _budget(spec: FamilySpec, n: int, k_max: int | None) -> int:
    if not spec.tracks_k:
        # k is not a statistic here; parts are positive, so weight bounds the length.
        return n + 1
    if k_max is not None:
        return k_max
    if not spec.finite:
        raise UnboundedFamilyError(
            f"family {spec.id!r} is infinite for fixed weight (0_u may repeat); give a d-bound"
        )
    # Every non-overlined part is either positive or a 0_a followed by a positive part.
    return 2 * n + 1


def _walk(spec: FamilySpec, max_weight: int, budget: int, exact: bool) -> Iterator[tuple[ColoredPart, ...]]:
    """Depth-first search over valid sequences; candidates by descending value."""
    stack: list[ColoredPart] = []

    def emit_ok(weight: int) -> bool:
        if exact and weight != max_weight:
            return False
        if not stack:
            return True
        return not spec.excluded_final(stack[-1]) and _extras_hold(spec, tuple(stack))

    def extend(weight: int, used: int) -> Iterator[tuple[ColoredPart, ...]]:
        if emit_ok(weight):
            yield tuple(stack)
        room = max_weight - weight
        prev = stack[-1] if stack else None
        for value in range(room, -1, -1):
            for part in spec.candidates(value):
                if not part.overlined and used >= budget:
                    continue
                if prev is not None and prev.value - value < spec.matrix.gap(prev, part):
                    continue
                stack.append(part)
                yield from extend(weight + value, used + (0 if part.overlined else 1))
                stack.pop()

    yield from extend(0, 0)


def enumerate_family(spec: FamilySpec | str, n: int, k_max: int | None = None) -> list[JaggedOverpartition]:
    """All valid objects of weight n with at most k_max non-overlined parts."""
    if isinstance(spec, str):
        spec = get_family(spec)
    if n < 0:
        return []
    budget = _budget(spec, n, k_max)
    found = [JaggedOverpartition(parts) for parts in _walk(spec, n, budget, exact=True)]
    if k_max is None:
        return found
    return [lam for lam in found if spec.stats(lam).k <= k_max]


def gen_poly(spec: FamilySpec | str, n: int, k_max: int | None = None) -> dict[tuple[int, int, int], int]:
    """Sum of a^i b^j d^k over the family at weight n, keyed (i, j, k)."""
    if isinstance(spec, str):
        spec = get_family(spec)
    poly: Counter[tuple[int, int, int]] = Counter()
    for lam in enumerate_family(spec, n, k_max):
        k, i, j = spec.stats(lam)
        poly[(i, j, k)] += 1
    return dict(sorted(poly.items()))


def series_of_family(spec: FamilySpec | str, q_bound: int, d_bound: int | None = None) -> TruncatedSeries:
    """sum_n gen_poly(n) q^n up to q_bound; d_bound None means every k."""
    if isinstance(spec, str):
        spec = get_family(spec)
    budget = _budget(spec, q_bound, d_bound)
    acc: Counter[Monomial] = Counter()
    objects = 0
    for parts in _walk(spec, q_bound, budget, exact=False):
        lam = JaggedOverpartition(parts)
        k, i, j = spec.stats(lam)
        acc[Monomial(lam.weight, a=i, b=j, d=k)] += 1
        objects += 1
    logger.debug("family %s: %d objects up to q^%d (d-bound %s)", spec.id, objects, q_bound, d_bound)
    return TruncatedSeries(acc, Bounds(q=q_bound, d=d_bound))


# ---------------------------------------------------------------------------
# Dilation of parts
# ---------------------------------------------------------------------------


def dilate_part(part: ColoredPart, rule: DilationRule | str) -> ColoredPart:
    """Map a weighted-word part to its dilated value; the overline is kept."""
    if isinstance(rule, str):
        rule = {"mod3": MOD3, "mod4": MOD4}[rule]
    image = rule.part(part.value, part.color.value)
    if image < 1:
        raise DilationDomainError(part, rule, image)
    return ColoredPart(image, part.color, part.overlined)


def dilate_partition(lam: JaggedOverpartition, rule: DilationRule | str) -> JaggedOverpartition:
    return JaggedOverpartition(tuple(dilate_part(p, rule) for p in lam.parts))


# ---------------------------------------------------------------------------
# Product sides
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProductSpec:
    """Overpartitions with residue restrictions, refined by ``stats``."""

    id: str
    description: str
    plain: Callable[[int], bool]
    over: Callable[[int], bool] = field(default=lambda value: False)
    distinct: bool = True
    stats: Callable[[tuple[Part, ...]], Stats] = field(default=lambda parts: Stats(0, 0, 0))


def _mod3_stats(parts: tuple[Part, ...]) -> Stats:
    return Stats(
        0,
        sum(1 for p in parts if p.value % 3 == 1),
        sum(1 for p in parts if p.value % 3 == 2),
    )


def _dbar_stats(parts: tuple[Part, ...]) -> Stats:
    """k counts differences = 3 mod 6 in the parts = 1 mod 3, with a trailing -2."""
    ones = [p.value for p in parts if p.value % 3 == 1] + [-2]
    k = sum(1 for x, y in zip(ones, ones[1:]) if (x - y) % 6 == 3)
    _, i, j = _mod3_stats(parts)
    return Stats(k, i, j)


def _mod4_stats(parts: tuple[Part, ...]) -> Stats:
    """A part = 3 mod 8 counts towards both i and j."""
    i = sum(1 for p in parts if p.value % 4 == 1 or p.value % 8 == 3)
    j = sum(1 for p in parts if p.value % 4 == 2 or p.value % 8 == 3)
    return Stats(0, i, j)


def _parity_stats(parts: tuple[Part, ...]) -> Stats:
    """i = number of parts, k = parity changes counting a phantom 0."""
    values = [p.value for p in parts] + [0]
    k = sum(1 for x, y in zip(values, values[1:]) if (x - y) % 2)
    return Stats(k, len(parts), 0)


def _over_mod4(value: int) -> bool:
    return value % 4 != 3 and value != 1


PRODUCT_SIDES: dict[str, ProductSpec] = {
    spec.id: spec
    for spec in (
        ProductSpec("d", "distinct parts not = +-1 mod 6", plain=lambda v: v % 6 not in (1, 5), stats=_mod3_stats),
        ProductSpec("dbar", "distinct parts not = 5 mod 6", plain=lambda v: v % 6 != 5, stats=_dbar_stats),
        ProductSpec(
            "dprime",
            "overpartitions, overlined parts not 3 mod 4 and not 1, plain parts = 0, 3, 4 mod 8",
            plain=lambda v: v % 8 in (0, 3, 4),
            over=_over_mod4,
            distinct=False,
            stats=_mod4_stats,
        ),
        ProductSpec(
            "ddprime",
            "overpartitions, overlined parts not 3 mod 4 and not 1, plain parts = 3 mod 8",
            plain=lambda v: v % 8 == 3,
            over=_over_mod4,
            distinct=False,
            stats=_mod4_stats,
        ),
        ProductSpec("a", "distinct parts, k = parity changes", plain=lambda v: True, stats=_parity_stats),
    )
}


def get_product_side(product_id: str) -> ProductSpec:
    try:
        return PRODUCT_SIDES[product_id]
    except KeyError:
        known = ", ".join(sorted(PRODUCT_SIDES))
        raise UnknownFamilyError(f"unknown product side {product_id!r} (known: {known})") from None


def _overpartitions(spec: ProductSpec, n: int) -> Iterator[tuple[Part, ...]]:
    """Weakly decreasing parts, by descending value, overlined first.

    An overlined value ends its run; distinct sides allow each value once.
    """
    stack: list[Part] = []

    def extend(remaining: int) -> Iterator[tuple[Part, ...]]:
        if remaining == 0:
            yield tuple(stack)
            return
        prev = stack[-1] if stack else None
        top = remaining if prev is None else min(remaining, prev.value)
        for value in range(top, 0, -1):
            repeat = prev is not None and value == prev.value
            if repeat and (prev.overlined or spec.distinct):
                continue
            for over in (True, False):
                allowed = spec.over(value) if over else spec.plain(value)
                if not allowed:
                    continue
                stack.append(Part(value, over))
                yield from extend(remaining - value)
                stack.pop()

    yield from extend(n)


def enumerate_product_side(product_id: str, n: int) -> list[UncoloredOverpartition]:
    spec = get_product_side(product_id)
    if n < 0:
        return []
    return [UncoloredOverpartition(parts) for parts in _overpartitions(spec, n)]


def count_product_side(product_id: str, n: int) -> Counter[Stats]:
    """Refined counts at weight n, keyed by (k, i, j)."""
    spec = get_product_side(product_id)
    return Counter(spec.stats(lam.parts) for lam in enumerate_product_side(product_id, n))


def product_side_stats(product_id: str, lam: UncoloredOverpartition) -> Stats:
    return get_product_side(product_id).stats(lam.parts)


# ---------------------------------------------------------------------------
# Count tables
# ---------------------------------------------------------------------------


def count_table(source: str, max_n: int, k_max: int | None = None) -> Counter[tuple[int, int, int, int]]:
    """Refined counts keyed (n, k, i, j) for a family or a product side."""
    table: Counter[tuple[int, int, int, int]] = Counter()
    if source in PRODUCT_SIDES:
        for n in range(max_n + 1):
            for (k, i, j), count in count_product_side(source, n).items():
                table[(n, k, i, j)] += count
        return table
    spec = get_family(source)
    budget = _budget(spec, max_n, k_max)
    for parts in _walk(spec, max_n, budget, exact=False):
        lam = JaggedOverpartition(parts)
        k, i, j = spec.stats(lam)
        table[(lam.weight, k, i, j)] += 1
    return table


def table_sources() -> list[str]:
    return sorted(FAMILIES) + sorted(PRODUCT_SIDES)
