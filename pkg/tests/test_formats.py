"""Tests for capparelli_check.formats."""

from __future__ import annotations

import json

from capparelli_check.formats import (
    listing_json,
    listing_text,
    render_poly,
    reports_json,
    reports_text,
    series_json,
    table_csv,
)
from capparelli_check.models import Part, Report, UncoloredOverpartition, Verdict, parse_partition
from capparelli_check.series import Bounds, Monomial, TruncatedSeries, from_json


class TestRenderPoly:
    def test_sorted_terms(self) -> None:
        assert render_poly({(1, 0, 1): 4, (0, 2, 0): 1}) == "b^2 + 4*a*d"

    def test_signs(self) -> None:
        assert render_poly({(0, 0, 0): -2, (1, 0, 0): 1}) == "-2 + a"
        assert render_poly({(0, 1, 0): -1}) == "-b"
        assert render_poly({(0, 0, 0): 1, (2, 1, 0): -3}) == "1 - 3*a^2*b"

    def test_zero(self) -> None:
        assert render_poly({}) == "0"
        assert render_poly({(1, 0, 0): 0}) == "0"


class TestListings:
    def test_text(self) -> None:
        objects = [parse_partition("(2~a)"), parse_partition("(1u, 1a)")]
        text = listing_text(objects, {(1, 0, 0): 1, (1, 0, 2): 1})
        assert text == "(2~a)\n(1u, 1a)\n# total: 2\n# gen_poly: a + a*d^2\n"

    def test_text_uncoloured(self) -> None:
        text = listing_text([parse_partition("(10~a, 1a, 2~b)")], {(1, 0, 1): 1}, colored=False)
        assert text.splitlines()[0] == "(10~, 1, 2~)"

    def test_empty(self) -> None:
        assert listing_text([], {(0, 0, 0): 1}) == "# total: 0\n# gen_poly: 1\n"

    def test_json_lines(self) -> None:
        lam = UncoloredOverpartition((Part(9, True), Part(4)))
        out = listing_json("dbar", 13, [lam], [(0, 1, 0)], {(1, 0, 0): 1})
        first, summary = (json.loads(line) for line in out.splitlines())
        assert first == {
            "parts": [{"value": 9, "overlined": True}, {"value": 4, "overlined": False}],
            "n": 13,
            "stats": {"k": 0, "i": 1, "j": 0},
        }
        assert summary == {
            "source": "dbar",
            "n": 13,
            "total": 1,
            "gen_poly": [{"i": 1, "j": 0, "k": 0, "count": 1}],
        }


class TestReports:
    def test_text_table(self) -> None:
        text = reports_text([Report("aag", {"q": 10}, Verdict.PASS)])
        assert text == "case  verdict  bounds\naag   pass     q=10\n1/1 passed\n"

    def test_text_lists_discrepancies(self) -> None:
        report = Report("ct", {"q": 4}, Verdict.FAIL, {"left": "1", "right": "2"}, wall_time=0.5)
        lines = reports_text([report], timings=True).splitlines()
        assert lines[0].split() == ["case", "verdict", "bounds", "seconds"]
        assert lines[1].split() == ["ct", "fail", "q=4", "0.50"]
        assert lines[2] == 'ct: {"left": "1", "right": "2"}'
        assert lines[3] == "0/1 passed"

    def test_json(self) -> None:
        data = json.loads(reports_json([Report("aag", {}, Verdict.BLOCKED, {"error": "e"})]))
        assert data == [{"case": "aag", "bounds": {}, "verdict": "blocked", "discrepancy": {"error": "e"}}]


class TestTablesAndSeries:
    def test_csv_sorted_without_zero_rows(self) -> None:
        table = {(1, 0, 0, 0): 2, (0, 0, 0, 0): 1, (2, 0, 0, 0): 0}
        assert table_csv(table) == "n,k,i,j,count\n0,0,0,0,1\n1,0,0,0,2\n"

    def test_series_json(self) -> None:
        s = TruncatedSeries({Monomial(0): 1, Monomial(2, b=1, d=1): -7}, Bounds(q=3, d=1))
        assert from_json(json.loads(series_json(s))) == s
