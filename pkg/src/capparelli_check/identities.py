"""Identity registry and verification engine.

Design rule: verify() NEVER raises. Bounds and dilation problems become a
"blocked" report; any other exception is logged and becomes a "fail" report
carrying the error text.

Every case computes its two sides by separate routes. The ``independence``
field of each case names them.
"""

from __future__ import annotations

import logging
import time
from collections import Counter
from collections.abc import Callable, Mapping
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import cache
from importlib import resources

import yaml

from .combinatorics import (
    PRODUCT_SIDES,
    DilationDomainError,
    UnboundedFamilyError,
    count_table,
    enumerate_family,
    enumerate_product_side,
    get_family,
    is_valid,
    parse_member,
    product_side_stats,
    series_of_family,
)
from .config import BUILTIN_PROFILES, Profile
from .models import (
    CaseKind,
    ComponentQuadruple,
    Report,
    StaircaseSelection,
    Verdict,
    parse_partition,
)
from .qfactory import (
    ProductId,
    QuadId,
    SumId,
    constant_term_lhs,
    lemma_suite,
    product_rhs,
    quad_sum,
    sum_rhs,
)
from .series import (
    MOD3,
    MOD4,
    Bounds,
    DilationError,
    DilationRule,
    Monomial,
    SeriesBoundsError,
    TruncatedSeries,
    dilate,
    equal_up_to,
    specialize_d,
)
from .staircase import apply_selection, audit_up_to, compose_levels, decompose_levels

logger = logging.getLogger(__name__)

BLOCKING_ERRORS: tuple[type[Exception], ...] = (
    SeriesBoundsError,
    DilationError,
    DilationDomainError,
    UnboundedFamilyError,
)

CaseBounds = dict[str, int | None]


class UnknownCaseError(ValueError):
    """No registry case has the requested id."""


@dataclass(frozen=True)
class IdentityCase:
    """One checkable claim: two sides, how to size them, and how to compare them."""

    id: str
    kind: CaseKind
    description: str
    lhs: str
    rhs: str
    independence: str
    bounds: Callable[[Profile], CaseBounds]
    check: Callable[[Mapping[str, int | None]], dict | None]

    def default_bounds(self, profile: Profile | None = None) -> CaseBounds:
        return self.bounds(profile or BUILTIN_PROFILES["quick"])


# ---------------------------------------------------------------------------
# Comparison helpers
# ---------------------------------------------------------------------------


def _compare(left: TruncatedSeries, right: TruncatedSeries, n: int, k: int | None = None) -> dict | None:
    return equal_up_to(left, right, n, k).to_json()


def compare_tables(
    left: Mapping[tuple[int, int, int, int], int], right: Mapping[tuple[int, int, int, int], int]
) -> dict | None:
    """First (n, k, i, j) cell where the two refined tables differ, or None."""
    for cell in sorted(set(left) | set(right)):
        lv, rv = left.get(cell, 0), right.get(cell, 0)
        if lv != rv:
            n, k, i, j = cell
            return {"cell": {"n": n, "k": k, "i": i, "j": j}, "left": lv, "right": rv}
    return None


def table_series(
    table: Mapping[tuple[int, int, int, int], int], q_bound: int, d_bound: int | None = None
) -> TruncatedSeries:
    """Read a refined count table as sum C(n;k;i,j) a^i b^j d^k q^n."""
    terms = ((Monomial(n, a=i, b=j, d=k), c) for (n, k, i, j), c in table.items())
    return TruncatedSeries(terms, Bounds(q=q_bound, d=d_bound))


# ---------------------------------------------------------------------------
# Case bodies
# ---------------------------------------------------------------------------


def _family_vs_product(family: str, pid: ProductId) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        q = b["q"]
        return _compare(series_of_family(family, q, 0), product_rhs(pid, Bounds(q=q, d=0)), q, 0)

    return check


def _contributions(b: Mapping) -> dict | None:
    q = b["q"]
    return _compare(quad_sum(QuadId.CONTRIBUTIONS, Bounds(q=q)), product_rhs(ProductId.AAG, Bounds(q=q)), q)


def _constant_term(b: Mapping) -> dict | None:
    q = b["q"]
    return _compare(constant_term_lhs(q, "taylor"), product_rhs(ProductId.AAG, Bounds(q=q)), q)


def _constant_term_routes(b: Mapping) -> dict | None:
    q = b["q"]
    return _compare(constant_term_lhs(q, "taylor"), constant_term_lhs(q, "laurent"), q)


def _family_vs_sum(family: str, sid: SumId) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        q, d = b["q"], b["d"]
        return _compare(series_of_family(family, q, d), sum_rhs(sid, Bounds(q=q, d=d)), q, d)

    return check


def _family_at_d1(family: str, pid: ProductId) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        q = b["q"]
        left = specialize_d(series_of_family(family, q, None), 1)
        return _compare(left, product_rhs(pid, Bounds(q=q)), q, 0)

    return check


def _sum_at_d1(sid: SumId, pid: ProductId) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        q = b["q"]
        left = specialize_d(sum_rhs(sid, Bounds(q=q)), 1)
        return _compare(left, product_rhs(pid, Bounds(q=q)), q, 0)

    return check


def _quad_vs_sum(qid: QuadId, sid: SumId) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        bounds = Bounds(q=b["q"], d=b["d"])
        return _compare(quad_sum(qid, bounds), sum_rhs(sid, bounds), b["q"], b["d"])

    return check


def _parity_sum(b: Mapping) -> dict | None:
    q, d = b["q"], b["d"]
    left = table_series(count_table("a", q), q, d)
    return _compare(left, sum_rhs(SumId.EQ51, Bounds(q=q, d=d)), q, d)


def _tables(left: str, right: str) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        return compare_tables(count_table(left, b["n"]), count_table(right, b["n"]))

    return check


def _dilation_bounds(rule: DilationRule) -> Callable[[Profile], CaseBounds]:
    def bounds(p: Profile) -> CaseBounds:
        return {"q": p.d1_q_bound, "horizon": rule.horizon(p.d1_q_bound)}

    return bounds


def _dilated_family(source: str, target: str, rule: DilationRule, at_d1: bool) -> Callable[[Mapping], dict | None]:
    """The source family series, dilated, against the dilated family enumerated directly."""

    def check(b: Mapping) -> dict | None:
        series = series_of_family(source, b["q"], None)
        if at_d1:
            series = specialize_d(series, 1)
        left = dilate(series, rule)
        horizon = left.q_bound
        right = series_of_family(target, horizon, None)
        return _compare(left, right, horizon, 0 if at_d1 else None)

    return check


def _refined_capparelli(b: Mapping) -> dict | None:
    q = b["q"]
    left = dilate(product_rhs(ProductId.AAG, Bounds(q=q)), MOD3)
    horizon = left.q_bound
    return _compare(left, table_series(count_table("d", horizon), horizon), horizon)


def _audit(variant: str) -> Callable[[Mapping], dict | None]:
    def check(b: Mapping) -> dict | None:
        report = audit_up_to(variant, b["n"], b["k"])
        return None if report.passed else report.to_json()

    return check


def _lemmas(b: Mapping) -> dict | None:
    results = lemma_suite(q_bound=b["q"], series_bound=b["series"])
    failed = [r for r in results if not r.passed]
    if not failed:
        return None
    return {"failed": len(failed), "first": failed[0].to_json()}


# ---------------------------------------------------------------------------
# Worked examples
# ---------------------------------------------------------------------------


@cache
def worked_examples() -> dict:
    """The packaged worked examples (``data/worked_examples.yaml``)."""
    text = resources.files("capparelli_check").joinpath("data/worked_examples.yaml").read_text(encoding="utf-8")
    return yaml.safe_load(text)


def _listing(source: str, n: int) -> list[tuple[str, tuple[int, int, int]]]:
    """(key, (k, i, j)) for every object of weight n."""
    if source in PRODUCT_SIDES:
        return [(lam.key(), tuple(product_side_stats(source, lam))) for lam in enumerate_product_side(source, n)]
    spec = get_family(source)
    return [(lam.key(), tuple(spec.stats(lam))) for lam in enumerate_family(spec, n)]


def _normalized(source: str, texts: list[str]) -> list[str]:
    if source in PRODUCT_SIDES:
        return [parse_partition(t).render(colored=False) for t in texts]
    return [parse_member(source, t).key() for t in texts]


def _multiset_diff(label: str, expected: list[str], got: list[str]) -> dict | None:
    missing = sorted((Counter(expected) - Counter(got)).elements())
    unexpected = sorted((Counter(got) - Counter(expected)).elements())
    if not missing and not unexpected:
        return None
    return {"example": label, "missing": missing, "unexpected": unexpected}


def check_worked_examples(data: Mapping | None = None) -> dict | None:
    """Recompute every worked example; the first mismatch, or None."""
    data = data or worked_examples()
    for item in data.get("listings", []):
        source, n = item["source"], item["n"]
        got = [key for key, _ in _listing(source, n)]
        diff = _multiset_diff(f"{source} n={n}", _normalized(source, item["objects"]), got)
        if diff:
            return diff
    for item in data.get("cells", []):
        n, k, i, j = item["cell"]
        for source, texts in item["objects"].items():
            got = [key for key, stats in _listing(source, n) if stats == (k, i, j)]
            diff = _multiset_diff(f"{source} cell ({n};{k};{i},{j})", _normalized(source, texts), got)
            if diff:
                return diff
            if len(got) != item["count"]:
                return {"example": f"{source} cell ({n};{k};{i},{j})", "left": len(got), "right": item["count"]}
    for item in data.get("valid", []):
        if not is_valid(get_family(item["family"]), parse_partition(item["object"])):
            return {"example": f"{item['family']} member", "object": item["object"]}
    for item in data.get("levels", []):
        quad = ComponentQuadruple(**item["components"])
        jagged = parse_partition(item["jagged"])
        if compose_levels(quad) != jagged or decompose_levels(jagged) != quad:
            return {"example": "level composition", "object": item["jagged"]}
    for item in data.get("staircase", []):
        lam = parse_partition(item["partition"])
        removed = parse_partition(item["removed"])
        lifted = apply_selection(removed, StaircaseSelection.full(len(removed)))
        if lifted.without_overlines() != lam:
            return {"example": "staircase removal", "object": item["partition"]}
        if decompose_levels(removed) != ComponentQuadruple(**item["components"]):
            return {"example": "staircase levels", "object": item["removed"]}
    return None


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


def _q(p: Profile) -> CaseBounds:
    return {"q": p.q_bound}


def _qd(p: Profile) -> CaseBounds:
    return {"q": p.q_bound, "d": p.d_bound}


def _family_qd(p: Profile) -> CaseBounds:
    return {"q": p.family_q_bound, "d": p.d_bound}


def _d1(p: Profile) -> CaseBounds:
    return {"q": p.d1_q_bound}


def _counts(p: Profile) -> CaseBounds:
    return {"n": p.count_bound}


def _capparelli(p: Profile) -> CaseBounds:
    return {"n": p.capparelli_bound}


def _build_registry() -> tuple[IdentityCase, ...]:
    series, table, audit, lemma = (
        CaseKind.SERIES_EQ,
        CaseKind.COUNT_TABLE_EQ,
        CaseKind.BIJECTION_AUDIT,
        CaseKind.LEMMA,
    )
    enum_vs_algebra = "enumeration against series algebra"
    cases = [
        IdentityCase(
            "aag", series, "weighted-word Alladi-Andrews-Gordon identity",
            "family aag at d=0", "(-q)(-aq^2;q^2)(-bq^2;q^2)", enum_vs_algebra,
            _q, _family_vs_product("aag", ProductId.AAG),
        ),
        IdentityCase(
            "contributions", series, "quadruple sum with a full staircase",
            "quad_sum contributions", "product aag", "two series builders with no shared factor",
            _q, _contributions,
        ),
        IdentityCase(
            "ct", series, "constant term of the triple product against F(z)",
            "constant term (taylor route)", "product aag", "Laurent coefficients against Pochhammer products",
            _q, _constant_term,
        ),
        IdentityCase(
            "ct-laurent", series, "the two constant-term routes agree",
            "constant term (taylor route)", "constant term (laurent route)",
            "z-expansion of F alone against the full Laurent product",
            lambda p: {"q": min(p.q_bound, 15)}, _constant_term_routes,
        ),
        IdentityCase(
            "thm15", series, "d-refined identity for the c1 family",
            "family c1", "(-q)/(dq) x double sum", enum_vs_algebra,
            _family_qd, _family_vs_sum("c1", SumId.THM15),
        ),
        IdentityCase(
            "thm16", series, "d-refined identity for the c2 family",
            "family c2", "(-q)(-bq^2;q^2) x single sum", enum_vs_algebra,
            _family_qd, _family_vs_sum("c2", SumId.THM16),
        ),
        IdentityCase(
            "thm17", series, "d-refined identity for the c3 family",
            "family c3", "(-q) x double sum", enum_vs_algebra,
            _family_qd, _family_vs_sum("c3", SumId.THM17),
        ),
        IdentityCase(
            "c1-chain", series, "both cases of the c1 quadruple sum give the thm15 sum side",
            "quad_sum c1", "sum thm15", "quadruple sum against the double sum",
            _family_qd, _quad_vs_sum(QuadId.C1, SumId.THM15),
        ),
        IdentityCase(
            "c2-chain", series, "the c2 quadruple sum gives the thm16 sum side",
            "quad_sum c2", "sum thm16", "quadruple sum against the single sum",
            _family_qd, _quad_vs_sum(QuadId.C2, SumId.THM16),
        ),
        IdentityCase(
            "c3-chain", series, "the c3 quadruple sum gives the thm17 sum side",
            "quad_sum c3", "sum thm17", "quadruple sum against the double sum",
            _family_qd, _quad_vs_sum(QuadId.C3, SumId.THM17),
        ),
        IdentityCase(
            "thm18", series, "the c1 family at d=1 is an infinite product",
            "family c1 at d=1", "(-q)(-aq)(-bq)/((q)(abq;q^2))", enum_vs_algebra,
            _d1, _family_at_d1("c1", ProductId.THM18),
        ),
        IdentityCase(
            "thm19", series, "the c2 family at d=1 is an infinite product",
            "family c2 at d=1", "(-q)(-aq)(-bq^2;q^2)", enum_vs_algebra,
            _d1, _family_at_d1("c2", ProductId.THM19),
        ),
        IdentityCase(
            "thm110", series, "the c3 family at d=1 is an infinite product",
            "family c3 at d=1", "(-q)(-aq)(-bq)/(abq;q^2)", enum_vs_algebra,
            _d1, _family_at_d1("c3", ProductId.THM110),
        ),
        IdentityCase(
            "thm18-sum", series, "the thm15 sum side at d=1",
            "sum thm15 at d=1", "product thm18", "sum algebra against product algebra",
            _q, _sum_at_d1(SumId.THM15, ProductId.THM18),
        ),
        IdentityCase(
            "thm19-sum", series, "the thm16 sum side at d=1",
            "sum thm16 at d=1", "product thm19", "sum algebra against product algebra",
            _q, _sum_at_d1(SumId.THM16, ProductId.THM19),
        ),
        IdentityCase(
            "thm110-sum", series, "the thm17 sum side at d=1",
            "sum thm17 at d=1", "product thm110", "sum algebra against product algebra",
            _q, _sum_at_d1(SumId.THM17, ProductId.THM110),
        ),
        IdentityCase(
            "eq51", series, "distinct parts refined by parity changes",
            "product side a (count table)", "single sum", enum_vs_algebra,
            _qd, _parity_sum,
        ),
        IdentityCase(
            "eq52", series, "the parity-alternating c4 family",
            "family c4", "double sum", enum_vs_algebra,
            _family_qd, _family_vs_sum("c4", SumId.EQ52),
        ),
        IdentityCase(
            "cor1", table, "mod 3 dilation of the c2 family against distinct parts not 5 mod 6",
            "family cor1", "product side dbar", "residue-rule enumeration against product-side enumeration",
            _counts, _tables("cor1", "dbar"),
        ),
        IdentityCase(
            "cor2", table, "mod 4 dilation of the c1 family against overpartitions",
            "family cor2", "product side dprime", "residue-rule enumeration against product-side enumeration",
            _counts, _tables("cor2", "dprime"),
        ),
        IdentityCase(
            "cor3", table, "mod 4 dilation of the c3 family against overpartitions",
            "family cor3", "product side ddprime", "residue-rule enumeration against product-side enumeration",
            _counts, _tables("cor3", "ddprime"),
        ),
        IdentityCase(
            "cor1-dilation", series, "the c2 series dilated by mod3 is the cor1 series",
            "dilate(family c2, mod3)", "family cor1", "matrix-rule enumeration against residue-rule enumeration",
            _dilation_bounds(MOD3), _dilated_family("c2", "cor1", MOD3, at_d1=False),
        ),
        IdentityCase(
            "cor2-dilation", series, "the c1 series at d=1 dilated by mod4 is the cor2 series",
            "dilate(family c1 at d=1, mod4)", "family cor2",
            "matrix-rule enumeration against residue-rule enumeration",
            _dilation_bounds(MOD4), _dilated_family("c1", "cor2", MOD4, at_d1=True),
        ),
        IdentityCase(
            "cor3-dilation", series, "the c3 series at d=1 dilated by mod4 is the cor3 series",
            "dilate(family c3 at d=1, mod4)", "family cor3",
            "matrix-rule enumeration against residue-rule enumeration",
            _dilation_bounds(MOD4), _dilated_family("c3", "cor3", MOD4, at_d1=True),
        ),
        IdentityCase(
            "capparelli", table, "Capparelli's identity, refined by residues",
            "family capparelli", "product side d", "prose difference rule against product-side enumeration",
            _capparelli, _tables("capparelli", "d"),
        ),
        IdentityCase(
            "capparelli-matrix", table, "the prose Capparelli rule is the dilated C matrix",
            "family capparelli", "family capparelli_dilated", "prose rule against matrix rule",
            _capparelli, _tables("capparelli", "capparelli_dilated"),
        ),
        IdentityCase(
            "cor14-refined", series, "Capparelli's identity with i and j kept, via the dilated product",
            "dilate(product aag, mod3)", "product side d (count table)", "series algebra against enumeration",
            lambda p: {"q": p.capparelli_bound}, _refined_capparelli,
        ),
        IdentityCase(
            "cstar", table, "the companion identity with the C* matrix",
            "family cstar", "product side d", "prose difference rule against product-side enumeration",
            _capparelli, _tables("cstar", "d"),
        ),
        IdentityCase(
            "cstar-forms", table, "the prose companion rule is the dilated C* matrix",
            "family cstar", "family cstar_dilated", "prose rule against matrix rule",
            _capparelli, _tables("cstar", "cstar_dilated"),
        ),
        IdentityCase(
            "cstar-weighted", series, "undilated C* words have the aag product",
            "family cstar_weighted", "product aag", enum_vs_algebra,
            _q, _family_vs_product("cstar_weighted", ProductId.AAG),
        ),
        IdentityCase(
            "bijection-full", audit, "full staircase onto the aag family",
            "forward map (full)", "family aag", "constructive map against enumeration",
            lambda p: {"n": p.audit_full_bound, "k": 0}, _audit("full"),
        ),
        IdentityCase(
            "bijection-c1", audit, "generalized staircase, both c1 cases, onto the c1 family",
            "forward map (c1 cases 1 and 2)", "family c1", "constructive map against enumeration",
            lambda p: {"n": p.audit_bound, "k": p.audit_k}, _audit("c1"),
        ),
        IdentityCase(
            "bijection-c2", audit, "partial staircase onto the c2 family",
            "forward map (c2)", "family c2", "constructive map against enumeration",
            lambda p: {"n": p.audit_bound, "k": p.audit_k}, _audit("c2"),
        ),
        IdentityCase(
            "bijection-c3", audit, "partial staircase onto the c3 family",
            "forward map (c3)", "family c3", "constructive map against enumeration",
            lambda p: {"n": p.audit_bound, "k": p.audit_k}, _audit("c3"),
        ),
        IdentityCase(
            "lemmas", lemma, "q-binomial, q-Chu-Vandermonde, triple product and specialisation checks",
            "lemma left sides", "lemma right sides", "each lemma side built separately",
            lambda p: {"q": p.lemma_q_bound, "series": p.lemma_series_bound}, _lemmas,
        ),
        IdentityCase(
            "worked-examples", table, "the packaged worked examples recomputed",
            "packaged listings", "enumerations", "hand-written data against enumeration",
            lambda p: {}, lambda b: check_worked_examples(),
        ),
    ]
    return tuple(sorted(cases, key=lambda c: c.id))


_REGISTRY = _build_registry()


def registry() -> list[IdentityCase]:
    """Every registered case, sorted by id."""
    return list(_REGISTRY)


def get_case(case_id: str) -> IdentityCase:
    for case in _REGISTRY:
        if case.id == case_id:
            return case
    known = ", ".join(c.id for c in _REGISTRY)
    raise UnknownCaseError(f"unknown case {case_id!r} (known: {known})")


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


def verify(case: IdentityCase | str, profile: Profile | None = None) -> Report:
    """Compute both sides of ``case`` at the profile's bounds and compare exactly.

    Returns:
        A :class:`Report`, always, even when a side cannot be computed.
    """
    if isinstance(case, str):
        case = get_case(case)
    profile = profile or BUILTIN_PROFILES["quick"]
    bounds = case.bounds(profile)
    start = time.monotonic()
    logger.info("Verifying '%s' at %s", case.id, bounds)

    try:
        discrepancy = case.check(bounds)
    except BLOCKING_ERRORS as e:
        elapsed = time.monotonic() - start
        logger.warning("Case '%s' blocked after %.1fs: %s", case.id, elapsed, e)
        return Report(case.id, bounds, Verdict.BLOCKED, {"error": str(e)}, elapsed, [type(e).__name__])
    except Exception as e:
        elapsed = time.monotonic() - start
        logger.exception("Case '%s' raised after %.1fs", case.id, elapsed)
        return Report(case.id, bounds, Verdict.FAIL, {"error": f"{type(e).__name__}: {e}"}, elapsed)

    elapsed = time.monotonic() - start
    if discrepancy is None:
        logger.info("Case '%s' passed in %.1fs", case.id, elapsed)
        return Report(case.id, bounds, Verdict.PASS, None, elapsed)
    logger.warning("Case '%s' failed in %.1fs: %s", case.id, elapsed, discrepancy)
    return Report(case.id, bounds, Verdict.FAIL, discrepancy, elapsed)


def _verify_by_id(case_id: str, profile: Profile) -> Report:
    return verify(get_case(case_id), profile)


def verify_all(
    profile: Profile | None = None, workers: int = 1, case_ids: list[str] | None = None
) -> list[Report]:
    """Verify every case (or the given ones); reports come back sorted by case id."""
    profile = profile or BUILTIN_PROFILES["quick"]
    ids = case_ids if case_ids is not None else [c.id for c in _REGISTRY]
    for case_id in ids:
        get_case(case_id)
    if workers <= 1 or len(ids) <= 1:
        reports = [_verify_by_id(case_id, profile) for case_id in ids]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_verify_by_id, ids, [profile] * len(ids)))
    return sorted(reports, key=lambda r: r.case_id)


def exit_code(reports: list[Report]) -> int:
    """0 when every case passes, 1 on any failure, 2 when something is blocked but nothing failed."""
    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return 1
    if Verdict.BLOCKED in verdicts:
        return 2
    return 0
