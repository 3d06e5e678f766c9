"""Tests for capparelli_check.combinatorics."""

from __future__ import annotations

from functools import cache

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capparelli_check.combinatorics import (
    C_BAR,
    C_MATRIX,
    FAMILIES,
    DilationDomainError,
    UnboundedFamilyError,
    UnknownFamilyError,
    count_product_side,
    count_table,
    dilate_part,
    dilate_partition,
    enumerate_family,
    enumerate_product_side,
    gen_poly,
    get_family,
    get_product_side,
    is_valid,
    min_gap,
    parse_member,
    series_of_family,
    table_sources,
)
from capparelli_check.models import COLORS, Color, ColoredPart, JaggedOverpartition, parse_partition
from capparelli_check.qfactory import ProductId, SumId, product_rhs, sum_rhs
from capparelli_check.series import MOD3, MOD4, Bounds, equal_up_to

CBAR_EXAMPLE = "(4a, 5~b, 2u, 2u, 2~u, 1u, 2b, 1a)"


# ---------------------------------------------------------------------------
# Gap rules and validity
# ---------------------------------------------------------------------------


class TestMatrices:
    def test_cbar_entries(self) -> None:
        assert min_gap(C_BAR, ColoredPart(4, Color.A), ColoredPart(5, Color.B, True)) == -1
        assert min_gap(C_BAR, ColoredPart(5, Color.B, True), ColoredPart(2, Color.U)) == 3
        assert min_gap(C_BAR, ColoredPart(1, Color.U), ColoredPart(2, Color.B)) == -1

    def test_plain_matrix_has_no_overlined_cells(self) -> None:
        assert not C_MATRIX.has_overlines
        assert C_BAR.has_overlines
        with pytest.raises(ValueError, match="no entry"):
            C_MATRIX.gap(ColoredPart(2, Color.A, True), ColoredPart(1, Color.U))


class TestIsValid:
    def test_cbar_example(self) -> None:
        assert is_valid(FAMILIES["cbar"], parse_partition(CBAR_EXAMPLE))

    def test_empty_is_valid(self) -> None:
        assert is_valid(FAMILIES["c1"], JaggedOverpartition())

    def test_gap_violation(self) -> None:
        assert not is_valid(FAMILIES["cbar"], parse_partition("(2u, 3u)"))

    @pytest.mark.parametrize("final", ["0a", "0b", "1~a", "1~b"])
    def test_forbidden_final_parts(self, final: str) -> None:
        assert not is_valid(FAMILIES["cbar"], parse_partition(f"(4u, {final})"))

    def test_c1_smallest_u_condition(self) -> None:
        lam = parse_partition("(1u, 2~b, 0a, 1b)")
        assert is_valid(FAMILIES["cbar"], lam)
        assert not is_valid(FAMILIES["c1"], lam)

    def test_c2_final_parts_overlined(self) -> None:
        assert not is_valid(FAMILIES["c2"], parse_partition("(2b)"))
        assert is_valid(FAMILIES["c2"], parse_partition("(2~b)"))

    def test_c4_parity_rule(self) -> None:
        c4 = FAMILIES["c4"]
        assert is_valid(c4, parse_partition("(1a)"))
        assert is_valid(c4, parse_partition("(2~a)"))
        assert not is_valid(c4, parse_partition("(2a)"))
        assert not is_valid(c4, parse_partition("(3u)"))

    def test_c4_parity_follows_the_left_part(self) -> None:
        c4 = FAMILIES["c4"]
        lam = parse_partition("(1a, 2~b)")
        assert is_valid(FAMILIES["cbar"], lam)
        assert is_valid(c4, lam)
        assert not is_valid(c4, parse_partition("(1~a, 2~b)"))

    def test_residue_family_rejects_wrong_colour(self) -> None:
        assert not is_valid(FAMILIES["cor1"], parse_partition("(10~b)"))


class TestParseMember:
    def test_colours_from_residues(self) -> None:
        lam = parse_member("cor1", "(10~, 1, 2~)")
        assert lam.render() == "(10~a, 1a, 2~b)"
        assert is_valid(FAMILIES["cor1"], lam)

    def test_mod4_residues(self) -> None:
        assert parse_member("cor2", "(8, 5, 2~)").render() == "(8u, 5a, 2~b)"

    def test_value_outside_family(self) -> None:
        with pytest.raises(ValueError, match="outside family cor2"):
            parse_member("cor2", "(3)")

    def test_coloured_family_kept(self) -> None:
        assert parse_member("cbar", CBAR_EXAMPLE) == parse_partition(CBAR_EXAMPLE)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------


@cache
def members(family_id: str, n: int, k_max: int | None) -> frozenset[JaggedOverpartition]:
    return frozenset(enumerate_family(family_id, n, k_max))


class TestEnumeration:
    def test_cor1_weight_13(self) -> None:
        assert gen_poly("cor1", 13) == {
            (0, 2, 0): 1,
            (1, 0, 0): 3,
            (1, 0, 1): 4,
            (2, 1, 1): 2,
            (2, 1, 2): 3,
        }

    def test_first_objects_in_search_order(self) -> None:
        first = enumerate_family("cor1", 13)[:3]
        assert [lam.render(colored=False) for lam in first] == ["(13~)", "(13)", "(11~, 2~)"]

    def test_weight_zero(self) -> None:
        assert enumerate_family("c1", 0) == [JaggedOverpartition()]

    def test_negative_weight(self) -> None:
        assert enumerate_family("c1", -1) == []

    def test_infinite_family_needs_budget(self) -> None:
        with pytest.raises(UnboundedFamilyError):
            enumerate_family("cbar", 3)
        with pytest.raises(UnboundedFamilyError):
            count_table("cbar", 3)

    def test_budget_limits_non_overlined_parts(self) -> None:
        found = enumerate_family("cbar", 4, k_max=1)
        assert found
        assert all(lam.non_overlined <= 1 for lam in found)

    def test_unknown_family(self) -> None:
        with pytest.raises(UnknownFamilyError, match="known"):
            get_family("nosuch")

    @pytest.mark.parametrize("family_id", ["aag", "c1", "c2", "c3", "c4", "cor1", "capparelli", "cstar"])
    @pytest.mark.parametrize("n", [1, 4, 7])
    def test_members_are_valid_and_distinct(self, family_id: str, n: int) -> None:
        spec = FAMILIES[family_id]
        found = enumerate_family(spec, n)
        assert len(found) == len(set(found))
        assert all(lam.weight == n and is_valid(spec, lam) for lam in found)

    def test_family_series_collects_every_weight(self) -> None:
        s = series_of_family("c2", 6, 2)
        for n in range(7):
            assert s.coefficient(n) == gen_poly("c2", n, 2)


part_lists = st.lists(
    st.tuples(st.integers(0, 3), st.sampled_from(COLORS), st.booleans()).filter(lambda t: t[0] > 0 or not t[2]),
    max_size=4,
).map(lambda items: JaggedOverpartition(tuple(ColoredPart(v, c, o) for v, c, o in items)))


class TestEnumerationIsComplete:
    @settings(max_examples=200, deadline=None)
    @given(part_lists, st.sampled_from(["c1", "c2", "c3", "c4"]))
    def test_valid_objects_are_enumerated(self, lam: JaggedOverpartition, family_id: str) -> None:
        if is_valid(FAMILIES[family_id], lam):
            assert lam in members(family_id, lam.weight, None)

    @settings(max_examples=200, deadline=None)
    @given(part_lists)
    def test_valid_cbar_objects_are_enumerated(self, lam: JaggedOverpartition) -> None:
        if is_valid(FAMILIES["cbar"], lam):
            assert lam in members("cbar", lam.weight, lam.non_overlined)


# ---------------------------------------------------------------------------
# Series and tables
# ---------------------------------------------------------------------------


class TestFamilySeries:
    def test_aag_family_matches_product(self) -> None:
        left = series_of_family("aag", 8, 0)
        assert equal_up_to(left, product_rhs(ProductId.AAG, Bounds(q=8, d=0)), 8, 0).equal

    def test_c4_family_matches_its_sum(self) -> None:
        left = series_of_family("c4", 9, 3)
        verdict = equal_up_to(left, sum_rhs(SumId.EQ52, Bounds(q=9, d=3)), 9, 3)
        assert verdict.equal, verdict.to_json()

    def test_d_bound_is_recorded(self) -> None:
        assert series_of_family("c3", 4, 1).d_bound == 1


class TestProductSides:
    def test_d_listing(self) -> None:
        assert [lam.render() for lam in enumerate_product_side("d", 6)] == ["(6)", "(4, 2)"]

    def test_parity_statistics(self) -> None:
        assert count_product_side("a", 3) == {(1, 1, 0): 1, (2, 2, 0): 1}

    def test_dprime_allows_repeated_plain_parts(self) -> None:
        listing = [lam.render() for lam in enumerate_product_side("dprime", 8)]
        assert "(4, 4)" in listing
        assert "(4~, 4)" not in listing
        assert "(4, 4~)" in listing

    def test_unknown_side(self) -> None:
        with pytest.raises(UnknownFamilyError):
            get_product_side("e")


class TestCountTable:
    def test_worked_cell(self) -> None:
        assert count_table("cor1", 13)[(13, 1, 1, 0)] == 4
        assert count_table("dbar", 13)[(13, 1, 1, 0)] == 4

    def test_weight_zero_row(self) -> None:
        assert count_table("d", 0) == {(0, 0, 0, 0): 1}

    def test_sources(self) -> None:
        sources = table_sources()
        assert "cor1" in sources
        assert "dbar" in sources


# ---------------------------------------------------------------------------
# Dilation of parts
# ---------------------------------------------------------------------------


class TestDilatePart:
    def test_mod3(self) -> None:
        assert dilate_part(ColoredPart(1, Color.A), MOD3) == ColoredPart(1, Color.A)
        assert dilate_part(ColoredPart(2, Color.B, True), "mod3") == ColoredPart(2, Color.B, True)

    def test_mod4(self) -> None:
        assert dilate_part(ColoredPart(0, Color.A), MOD4) == ColoredPart(1, Color.A)
        assert dilate_part(ColoredPart(2, Color.U, True), "mod4") == ColoredPart(8, Color.U, True)

    def test_non_positive_image(self) -> None:
        with pytest.raises(DilationDomainError, match="not positive") as info:
            dilate_part(ColoredPart(1, Color.B), MOD3)
        assert info.value.image == -1

    def test_partition(self) -> None:
        lam = parse_partition("(3~a, 2u, 2b)")
        assert dilate_partition(lam, MOD3).render() == "(7~a, 6u, 2b)"
