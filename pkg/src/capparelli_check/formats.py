"""Text, JSON and CSV renderings shared by the CLI. FORMATS.md is the contract."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable, Mapping, Sequence

from .models import AuditReport, JaggedOverpartition, Report, UncoloredOverpartition
from .series import TruncatedSeries, to_json


def _factor(name: str, power: int) -> str | None:
    if power == 0:
        return None
    return name if power == 1 else f"{name}^{power}"


def render_poly(poly: Mapping[tuple[int, int, int], int]) -> str:
    """Render sum c a^i b^j d^k (keys (i, j, k)) in sorted key order.

    >>> render_poly({(1, 0, 1): 4, (0, 2, 0): 1})
    'b^2 + 4*a*d'
    >>> render_poly({})
    '0'
    """
    out = ""
    for (i, j, k), c in sorted(poly.items()):
        if c == 0:
            continue
        factors = [f for f in (_factor("a", i), _factor("b", j), _factor("d", k)) if f]
        magnitude = abs(c)
        if not factors:
            term = str(magnitude)
        elif magnitude == 1:
            term = "*".join(factors)
        else:
            term = "*".join([str(magnitude), *factors])
        if not out:
            out = term if c > 0 else f"-{term}"
        else:
            out += f" + {term}" if c > 0 else f" - {term}"
    return out or "0"


# ---------------------------------------------------------------------------
# Listings
# ---------------------------------------------------------------------------


Listed = JaggedOverpartition | UncoloredOverpartition


def _render_object(lam: Listed, colored: bool) -> str:
    if isinstance(lam, UncoloredOverpartition):
        return lam.render()
    return lam.render(colored)


def _object_json(lam: Listed, colored: bool) -> list[dict]:
    if isinstance(lam, UncoloredOverpartition):
        return [{"value": p.value, "overlined": p.overlined} for p in lam.parts]
    return [p.to_json(colored) for p in lam.parts]


def listing_text(
    objects: Sequence[Listed], poly: Mapping[tuple[int, int, int], int], colored: bool = True
) -> str:
    """One object per line, then ``# total`` and ``# gen_poly`` summary lines."""
    lines = [_render_object(lam, colored) for lam in objects]
    lines.append(f"# total: {len(objects)}")
    lines.append(f"# gen_poly: {render_poly(poly)}")
    return "\n".join(lines) + "\n"


def listing_json(
    source: str,
    n: int,
    objects: Sequence[Listed],
    stats: Sequence[tuple[int, int, int]],
    poly: Mapping[tuple[int, int, int], int],
    colored: bool = True,
) -> str:
    """Newline-delimited JSON: one partition per line, then a summary line."""
    lines = [
        json.dumps({"parts": _object_json(lam, colored), "n": lam.weight, "stats": {"k": k, "i": i, "j": j}})
        for lam, (k, i, j) in zip(objects, stats)
    ]
    summary = {
        "source": source,
        "n": n,
        "total": len(objects),
        "gen_poly": [{"i": i, "j": j, "k": k, "count": c} for (i, j, k), c in sorted(poly.items())],
    }
    lines.append(json.dumps(summary))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def _bounds_text(bounds: Mapping[str, int | None]) -> str:
    return " ".join(f"{key}={value}" for key, value in bounds.items()) or "-"


def reports_text(reports: Iterable[Report], timings: bool = False) -> str:
    """Aligned table: case, verdict, bounds (and seconds with ``timings``)."""
    reports = list(reports)
    rows = [("case", "verdict", "bounds", *(("seconds",) if timings else ()))]
    for r in reports:
        row = (r.case_id, r.verdict.value, _bounds_text(r.bounds))
        rows.append((*row, f"{r.wall_time:.2f}") if timings else row)
    widths = [max(len(row[col]) for row in rows) for col in range(len(rows[0]))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows]
    for r in reports:
        if r.discrepancy is not None:
            lines.append(f"{r.case_id}: {json.dumps(r.discrepancy, sort_keys=True)}")
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed}/{len(reports)} passed")
    return "\n".join(lines) + "\n"


def reports_json(reports: Iterable[Report], timings: bool = False) -> str:
    return json.dumps([r.to_json(timings) for r in reports], indent=2)


def audit_json(report: AuditReport) -> str:
    return json.dumps(report.to_json(), indent=2)


# ---------------------------------------------------------------------------
# Tables and series
# ---------------------------------------------------------------------------


def table_csv(table: Mapping[tuple[int, int, int, int], int]) -> str:
    """CSV with header ``n,k,i,j,count``; rows sorted by (n, k, i, j)."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "k", "i", "j", "count"])
    for cell, count in sorted(table.items()):
        if count:
            writer.writerow([*cell, count])
    return buffer.getvalue()


def series_json(s: TruncatedSeries) -> str:
    return json.dumps(to_json(s), indent=2)
