"""Tests for capparelli_check.staircase."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capparelli_check.models import ComponentQuadruple, JaggedOverpartition, StaircaseSelection, parse_partition
from capparelli_check.staircase import (
    AUDIT_VARIANTS,
    DecompositionError,
    InvalidSelectionError,
    Variant,
    apply_selection,
    audit_up_to,
    bijection_audit,
    compose_levels,
    decompose_levels,
    forward_map,
    quadruples,
    selections,
    variant_window,
)

LEVELS_QUAD = ComponentQuadruple((4, 2, 1), (4, 3, 1), (7, 7, 7, 5, 1, 1, 1), (1, 1, 0, 0, 0))
LEVELS_JAGGED = (
    "(4a, 4b, 3a, 4b, 3a, 4b, 3a, 4b, 3b, 2a, 3b, 2a, 1u, 1u,"
    " 1a, 0u, 0u, 0u, 1b, 0a, 1b, 0a, 1b, 0a, 1b)"
)


# ---------------------------------------------------------------------------
# Levels
# ---------------------------------------------------------------------------


class TestLevels:
    def test_compose(self) -> None:
        assert compose_levels(LEVELS_QUAD) == parse_partition(LEVELS_JAGGED)

    def test_decompose(self) -> None:
        assert decompose_levels(parse_partition(LEVELS_JAGGED)) == LEVELS_QUAD

    def test_empty(self) -> None:
        assert compose_levels(ComponentQuadruple()) == JaggedOverpartition()
        assert decompose_levels(JaggedOverpartition()) == ComponentQuadruple()

    def test_u_part_alone(self) -> None:
        assert compose_levels(ComponentQuadruple(lam_u=(5,))).render() == "(5u)"

    @pytest.mark.parametrize(
        ("text", "match"),
        [
            ("(2~a)", "overlined"),
            ("(0a)", "followed by 1_b"),
            ("(0b)", "no level"),
            ("(2a, 2a)", "second head"),
            ("(2b, 2b)", "second unpaired"),
            ("(1a, 2a)", "level order"),
            ("(1u, 2a)", "level order"),
        ],
    )
    def test_decompose_rejects(self, text: str, match: str) -> None:
        with pytest.raises(DecompositionError, match=match):
            decompose_levels(parse_partition(text))

    def test_error_position_is_recorded(self) -> None:
        with pytest.raises(DecompositionError) as info:
            decompose_levels(parse_partition("(3a, 1u, 2a)"))
        assert info.value.position == 2
        assert str(info.value).startswith("position 3:")


def _decreasing(values) -> tuple[int, ...]:
    return tuple(sorted(values, reverse=True))


quads = st.builds(
    ComponentQuadruple,
    st.sets(st.integers(1, 6), max_size=3).map(_decreasing),
    st.sets(st.integers(1, 6), max_size=3).map(_decreasing),
    st.lists(st.integers(0, 4).map(lambda x: 2 * x + 1), max_size=3).map(_decreasing),
    st.lists(st.integers(0, 4), max_size=3).map(_decreasing),
)


class TestLevelRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(quads)
    def test_decompose_inverts_compose(self, quad: ComponentQuadruple) -> None:
        lam = compose_levels(quad)
        assert len(lam) == quad.size
        assert lam.weight == quad.weight
        assert decompose_levels(lam) == quad


# ---------------------------------------------------------------------------
# Staircase selections
# ---------------------------------------------------------------------------


class TestApplySelection:
    def test_full_staircase(self) -> None:
        lam = parse_partition("(1u, 0u)")
        assert apply_selection(lam, StaircaseSelection.full(2)).render() == "(3~u, 1~u)"

    def test_partial_window(self) -> None:
        lam = parse_partition("(2a, 1u, 0u)")
        sel = StaircaseSelection(m=3, window=2, chosen={1})
        assert apply_selection(lam, sel).render() == "(4~a, 2u, 1~u)"

    def test_worked_staircase(self) -> None:
        removed = parse_partition("(7b, 6b, 5a, 6b, 5a, 4a, 3b, 0a, 1b, 0a, 1b)")
        lifted = apply_selection(removed, StaircaseSelection.full(len(removed)))
        assert lifted.non_overlined == 0
        assert lifted.without_overlines() == parse_partition(
            "(18b, 16b, 14a, 14b, 12a, 10a, 8b, 4a, 4b, 2a, 2b)"
        )
        assert decompose_levels(removed) == ComponentQuadruple((5, 4), (7, 6, 3), (11, 1, 1), ())

    def test_length_mismatch(self) -> None:
        with pytest.raises(InvalidSelectionError, match="selection over 3 parts"):
            apply_selection(parse_partition("(1u)"), StaircaseSelection.full(3))

    def test_already_overlined(self) -> None:
        with pytest.raises(InvalidSelectionError, match="already has overlines"):
            apply_selection(parse_partition("(1~u)"), StaircaseSelection.full(1))


class TestVariants:
    quad = ComponentQuadruple((2,), (1,), (1,), (0,))

    @pytest.mark.parametrize(
        ("variant", "expected"),
        [
            (Variant.FULL, (5, 0)),
            (Variant.C1_CASE1, (5, 5)),
            (Variant.C1_CASE2, (6, 5)),
            (Variant.C2, (5, 2)),
            (Variant.C3, (5, 4)),
        ],
    )
    def test_windows(self, variant: Variant, expected: tuple[int, int]) -> None:
        assert variant_window(self.quad, variant) == expected

    def test_forward_map_checks_the_window(self) -> None:
        with pytest.raises(InvalidSelectionError, match="needs a selection"):
            forward_map(self.quad, StaircaseSelection.full(5), "c2")

    def test_case2_inserts_a_zero_u_part(self) -> None:
        sel = StaircaseSelection(m=2, window=1)
        image = forward_map(ComponentQuadruple(lam_u=(0,)), sel, Variant.C1_CASE2)
        assert image.render() == "(1u, 1~u)"

    def test_variant_table(self) -> None:
        assert set(AUDIT_VARIANTS) == {"full", "c1", "c2", "c3"}


class TestInputs:
    def test_weight_zero_has_only_the_empty_quadruple(self) -> None:
        assert list(quadruples(0, Variant.FULL)) == [ComponentQuadruple()]

    def test_full_has_one_selection(self) -> None:
        found = list(selections(ComponentQuadruple(), Variant.FULL, 0, 0))
        assert found == [StaircaseSelection.full(0)]

    def test_selections_hit_the_weight(self) -> None:
        quad = ComponentQuadruple(lam_u=(1, 0))
        for sel in selections(quad, Variant.C1_CASE1, 6, 2):
            assert forward_map(quad, sel, Variant.C1_CASE1).weight == 6
            assert sel.d_exponent <= 2


# ---------------------------------------------------------------------------
# Audits
# ---------------------------------------------------------------------------


class TestAudit:
    def test_weight_zero(self) -> None:
        report = bijection_audit("full", 0)
        assert report.passed
        assert report.images == 1

    @pytest.mark.parametrize("variant", ["full", "c1", "c2", "c3"])
    def test_small_weights(self, variant: str) -> None:
        report = audit_up_to(variant, 5, 2)
        assert report.passed, report.to_json()
        assert report.images > 0

    def test_unknown_variant(self) -> None:
        with pytest.raises(ValueError, match="unknown audit variant"):
            bijection_audit("c4", 3)

    @pytest.mark.slow
    @pytest.mark.parametrize("variant", ["c1", "c2", "c3"])
    def test_larger_weights(self, variant: str) -> None:
        assert audit_up_to(variant, 10, 3).passed
