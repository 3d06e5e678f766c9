"""Executable bijections: the level construction and staircase selections.

A staircase selection over m parts adds, for each chosen or forced index k,
one to each of the first k parts and overlines the k-th. The classical
staircase forces every index, the generalized staircase forces none, and a
partial staircase forces the tail window+1..m.
"""

from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Iterator
from dataclasses import replace
from enum import Enum
from functools import lru_cache

from .combinatorics import FAMILIES, enumerate_family, is_valid
from .models import (
    AuditReport,
    Color,
    ColoredPart,
    ComponentQuadruple,
    JaggedOverpartition,
    StaircaseSelection,
)
from .series import triangular

logger = logging.getLogger(__name__)

A, B, U = Color.A, Color.B, Color.U


class DecompositionError(ValueError):
    """A sequence does not have the level structure of the construction."""

    def __init__(self, position: int, reason: str) -> None:
        self.position = position
        super().__init__(f"position {position + 1}: {reason}")


class InvalidSelectionError(ValueError):
    """A staircase selection does not fit the partition it is applied to."""


class Variant(str, Enum):
    FULL = "full"
    C1_CASE1 = "c1_case1"
    C1_CASE2 = "c1_case2"
    C2 = "c2"
    C3 = "c3"


AUDIT_VARIANTS: dict[str, tuple[Variant, ...]] = {
    "full": (Variant.FULL,),
    "c1": (Variant.C1_CASE1, Variant.C1_CASE2),
    "c2": (Variant.C2,),
    "c3": (Variant.C3,),
}

AUDIT_FAMILY = {"full": "aag", "c1": "c1", "c2": "c2", "c3": "c3"}


# ---------------------------------------------------------------------------
# Levels
# ---------------------------------------------------------------------------


def compose_levels(c: ComponentQuadruple) -> JaggedOverpartition:
    """Arrange the quadruple into levels, largest level first.

    Level k reads k_a, then every (k-1)_u, then an unpaired k_b, then one pair
    (k-1)_a k_b for each part 2k-1 of lam_ab.
    """
    top = max(
        [*c.lam_a, *c.lam_b, *((x + 1) // 2 for x in c.lam_ab), *(x + 1 for x in c.lam_u)],
        default=0,
    )
    a_heads = Counter(c.lam_a)
    b_heads = Counter(c.lam_b)
    pairs = Counter((x + 1) // 2 for x in c.lam_ab)
    u_parts = Counter(c.lam_u)

    parts: list[ColoredPart] = []
    for k in range(top, 0, -1):
        if a_heads[k]:
            parts.append(ColoredPart(k, A))
        parts.extend(ColoredPart(k - 1, U) for _ in range(u_parts[k - 1]))
        if b_heads[k]:
            parts.append(ColoredPart(k, B))
        for _ in range(pairs[k]):
            parts.extend((ColoredPart(k - 1, A), ColoredPart(k, B)))
    return JaggedOverpartition(tuple(parts))


# role ranks inside one level
_HEAD, _U, _LONE_B, _PAIR = range(4)


def decompose_levels(lam: JaggedOverpartition) -> ComponentQuadruple:
    """Inverse of ``compose_levels``.

    An a-part x followed by (x+1)_b is a pair; any other a-part is the head
    of level x. Remaining b-parts are unpaired, and a u-part x sits in level x+1.
    """
    parts = lam.parts
    lam_a: list[int] = []
    lam_b: list[int] = []
    lam_ab: list[int] = []
    lam_u: list[int] = []
    previous: tuple[int, int] | None = None
    seen_heads: set[int] = set()
    seen_lone_b: set[int] = set()

    pos = 0
    while pos < len(parts):
        part = parts[pos]
        if part.overlined:
            raise DecompositionError(pos, "overlined parts have no level structure")
        nxt = parts[pos + 1] if pos + 1 < len(parts) else None
        width = 1
        if part.color is A and nxt is not None and nxt.color is B and nxt.value == part.value + 1 and not nxt.overlined:
            level, rank = part.value + 1, _PAIR
            lam_ab.append(2 * part.value + 1)
            width = 2
        elif part.color is A:
            level, rank = part.value, _HEAD
            if level < 1:
                raise DecompositionError(pos, "0_a must be followed by 1_b")
            if level in seen_heads:
                raise DecompositionError(pos, f"second head {level}_a in one level")
            seen_heads.add(level)
            lam_a.append(level)
        elif part.color is B:
            level, rank = part.value, _LONE_B
            if level < 1:
                raise DecompositionError(pos, "0_b has no level")
            if level in seen_lone_b:
                raise DecompositionError(pos, f"second unpaired {level}_b in one level")
            seen_lone_b.add(level)
            lam_b.append(level)
        else:
            level, rank = part.value + 1, _U
            lam_u.append(part.value)

        if previous is not None:
            prev_level, prev_rank = previous
            if level > prev_level or (level == prev_level and rank < prev_rank):
                raise DecompositionError(pos, "parts out of level order")
        previous = (level, rank)
        pos += width

    quad = ComponentQuadruple(tuple(lam_a), tuple(lam_b), tuple(lam_ab), tuple(lam_u))
    if compose_levels(quad) != lam:
        raise DecompositionError(len(parts) - 1, "sequence does not recompose")
    return quad


# ---------------------------------------------------------------------------
# Staircase selections
# ---------------------------------------------------------------------------


def apply_selection(lam: JaggedOverpartition, sel: StaircaseSelection) -> JaggedOverpartition:
    """Add the selected staircase: index k lifts the first k parts and overlines the k-th."""
    if sel.m != len(lam):
        raise InvalidSelectionError(f"selection over {sel.m} parts applied to {len(lam)} parts")
    if any(p.overlined for p in lam.parts):
        raise InvalidSelectionError("selection applied to a partition that already has overlines")

    lifts = [0] * sel.m
    overlined = [False] * sel.m
    for k in sel.indices:
        for p in range(k):
            lifts[p] += 1
        overlined[k - 1] = True

    out: list[ColoredPart] = []
    for p, part in enumerate(lam.parts):
        value = part.value + lifts[p]
        if overlined[p] and value < 1:
            raise InvalidSelectionError(f"index {p + 1} would overline a zero part")
        out.append(ColoredPart(value, part.color, overlined[p]))
    return JaggedOverpartition(tuple(out))


def variant_window(c: ComponentQuadruple, variant: Variant) -> tuple[int, int]:
    """(m, window) of the selection each variant uses."""
    m = c.size
    match variant:
        case Variant.FULL:
            return m, 0
        case Variant.C1_CASE1:
            return m, m
        case Variant.C1_CASE2:
            return m + 1, m
        case Variant.C2:
            return m, c.r + c.v
        case Variant.C3:
            return m, c.r + c.s + 2 * c.v


def _prepared(c: ComponentQuadruple, variant: Variant) -> ComponentQuadruple:
    if variant is Variant.C1_CASE1:
        return replace(c, lam_u=tuple(x + 1 for x in c.lam_u))
    if variant is Variant.C1_CASE2:
        return replace(c, lam_u=(*c.lam_u, 0))
    return c


def forward_map(c: ComponentQuadruple, sel: StaircaseSelection, variant: Variant | str) -> JaggedOverpartition:
    """Compose the levels (after the variant's u-part adjustment) and add the staircase."""
    variant = Variant(variant)
    m, window = variant_window(c, variant)
    if (sel.m, sel.window) != (m, window):
        raise InvalidSelectionError(
            f"{variant.value} needs a selection with m={m}, window={window}; got m={sel.m}, window={sel.window}"
        )
    return apply_selection(compose_levels(_prepared(c, variant)), sel)


def image_weight(c: ComponentQuadruple, sel: StaircaseSelection, variant: Variant) -> int:
    extra = c.t if variant is Variant.C1_CASE1 else 0
    return c.weight + extra + sel.lift


def _min_lift(c: ComponentQuadruple, variant: Variant) -> int:
    """Smallest weight the variant adds on top of the quadruple."""
    m, window = variant_window(c, variant)
    forced = triangular(m) - triangular(window)
    return forced + (c.t if variant is Variant.C1_CASE1 else 0)


# ---------------------------------------------------------------------------
# Input enumeration
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _partitions(weight: int, max_part: int, distinct: bool, odd: bool) -> tuple[tuple[int, ...], ...]:
    """Partitions of ``weight`` into positive parts <= max_part, decreasing."""
    if weight == 0:
        return ((),)
    out: list[tuple[int, ...]] = []
    for part in range(min(weight, max_part), 0, -1):
        if odd and part % 2 == 0:
            continue
        cap = part - 1 if distinct else part
        for rest in _partitions(weight - part, cap, distinct, odd):
            out.append((part, *rest))
    return tuple(out)


def _by_weight(max_weight: int, distinct: bool, odd: bool) -> Iterator[tuple[int, ...]]:
    for w in range(max_weight + 1):
        yield from _partitions(w, w, distinct, odd)


def quadruples(n: int, variant: Variant) -> Iterator[ComponentQuadruple]:
    """Every quadruple whose cheapest image under ``variant`` weighs at most n."""
    for lam_a in _by_weight(n, distinct=True, odd=False):
        rest_a = n - sum(lam_a)
        for lam_b in _by_weight(rest_a, distinct=True, odd=False):
            rest_b = rest_a - sum(lam_b)
            for lam_ab in _by_weight(rest_b, distinct=False, odd=True):
                rest_ab = rest_b - sum(lam_ab)
                for positive in _by_weight(rest_ab, distinct=False, odd=False):
                    zeros = 0
                    while True:
                        c = ComponentQuadruple(lam_a, lam_b, lam_ab, (*positive, *([0] * zeros)))
                        if c.weight + _min_lift(c, variant) > n:
                            break
                        yield c
                        zeros += 1


def _subsets_with_sum(target: int, largest: int) -> Iterator[frozenset[int]]:
    if target < 0:
        return
    for parts in _partitions(target, largest, True, False):
        yield frozenset(parts)


def selections(c: ComponentQuadruple, variant: Variant, n: int, k_max: int) -> Iterator[StaircaseSelection]:
    """Selections whose image weighs exactly n with d-exponent <= k_max."""
    m, window = variant_window(c, variant)
    target = n - c.weight - _min_lift(c, variant)
    for chosen in _subsets_with_sum(target, window):
        if window - len(chosen) <= k_max:
            yield StaircaseSelection(m=m, window=window, chosen=chosen)


# ---------------------------------------------------------------------------
# Audit
# ---------------------------------------------------------------------------


def _detects_inserted_zero(lam: JaggedOverpartition) -> bool:
    """The smallest u-part equals the number of overlined parts from its position on."""
    u_positions = [p for p, part in enumerate(lam.parts) if part.color is U]
    if not u_positions:
        return False
    x_u = min(lam.parts[p].value for p in u_positions)
    pos = max(p for p in u_positions if lam.parts[p].value == x_u)
    return x_u == sum(1 for part in lam.parts[pos:] if part.overlined)


def bijection_audit(variant: str, n: int, k_max: int = 0) -> AuditReport:
    """Check that the forward maps of ``variant`` biject onto the family at weight n.

    Failures are returned in the report with a witness, never raised.
    """
    if variant not in AUDIT_VARIANTS:
        raise ValueError(f"unknown audit variant {variant!r} (known: {', '.join(AUDIT_VARIANTS)})")
    family = FAMILIES[AUDIT_FAMILY[variant]]
    full = variant == "full"
    k_budget = 0 if full else k_max

    def fail(reason: str, witness: JaggedOverpartition | None, images: int) -> AuditReport:
        logger.warning("audit %s n=%d: %s", variant, n, reason)
        data = None if witness is None else {"parts": [p.to_json() for p in witness.parts], "n": witness.weight}
        return AuditReport(variant, n, k_max, passed=False, images=images, witness=data, reason=reason)

    images: dict[str, JaggedOverpartition] = {}
    for part_variant in AUDIT_VARIANTS[variant]:
        for c in quadruples(n, part_variant):
            for sel in selections(c, part_variant, n, k_budget):
                image = forward_map(c, sel, part_variant)
                target = image.without_overlines() if full else image
                if full and image.non_overlined:
                    return fail("full staircase left a part non-overlined", image, len(images))
                if not is_valid(family, target):
                    return fail(f"image of {c.to_json()} is not in family {family.id}", image, len(images))
                if family.stats(target) != (sel.d_exponent if not full else 0, c.r + c.v, c.s + c.v):
                    return fail("statistics (k, i, j) not preserved", image, len(images))
                if part_variant is Variant.C1_CASE2 and not _detects_inserted_zero(image):
                    return fail("inserted 0_u is not detectable in the image", image, len(images))
                key = target.key()
                if key in images:
                    return fail("two inputs share an image", image, len(images))
                images[key] = target

    expected = {lam.key(): lam for lam in enumerate_family(family, n, k_budget)}
    missing = sorted(set(expected) - set(images))
    if missing:
        return fail("family member with no preimage", expected[missing[0]], len(images))
    stray = sorted(set(images) - set(expected))
    if stray:
        return fail("image outside the enumerated family", images[stray[0]], len(images))
    logger.debug("audit %s n=%d k<=%d: %d images", variant, n, k_max, len(images))
    return AuditReport(variant, n, k_max, passed=True, images=len(images))


def audit_up_to(variant: str, max_n: int, k_max: int = 0) -> AuditReport:
    """Run ``bijection_audit`` for every weight 0..max_n; stops at the first failure."""
    total = 0
    for n in range(max_n + 1):
        report = bijection_audit(variant, n, k_max)
        if not report.passed:
            return report
        total += report.images
    return AuditReport(variant, max_n, k_max, passed=True, images=total)
