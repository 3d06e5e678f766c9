"""Builders for the closed-form series: q-Pochhammer products, the Jacobi
triple product, product and sum sides, the quadruple sums, and the
constant-term side.

Summation cutoffs: every builder bounds its summation indices by an
explicit lower bound on the q-exponent of each summand. The generalized
staircase ``prod_{k=1}^{m} (d + q^k)`` has minimal q-cost 0, or T(m-K) when
only d-degrees <= K are kept; ``_excess_cost`` computes that term.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterator
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .models import LemmaResult
from .series import (
    ONE,
    Bounds,
    Monomial,
    SeriesError,
    TruncatedSeries,
    equal_up_to,
    mul,
    product,
    specialize_d,
    triangular,
    z_constant_term,
    z_reach,
)

logger = logging.getLogger(__name__)

T = triangular


class InversionError(SeriesError):
    """A product cannot be inverted as a formal power series."""


class ProductId(str, Enum):
    AAG = "aag"
    THM18 = "thm18"
    THM19 = "thm19"
    THM110 = "thm110"


class SumId(str, Enum):
    THM15 = "thm15"
    THM16 = "thm16"
    THM17 = "thm17"
    EQ51 = "eq51"
    EQ52 = "eq52"


class QuadId(str, Enum):
    CONTRIBUTIONS = "contributions"
    C1 = "c1"
    C2 = "c2"
    C3 = "c3"


# ---------------------------------------------------------------------------
# Pochhammer symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PochSpec:
    """(c; q^step)_length with c = coeff * mono; length None means infinite.

    Factor k is ``1 - coeff * mono * q^(step*k)``, so (-aq^2;q^2)_oo is
    ``PochSpec(-1, Monomial(2, a=1), step=2)``.
    """

    coeff: int
    mono: Monomial
    step: int = 1
    length: int | None = None

    def __post_init__(self) -> None:
        if self.step < 1:
            raise SeriesError(f"Pochhammer step must be >= 1, got {self.step}")
        if self.length is not None and self.length < 0:
            raise SeriesError(f"Pochhammer length must be >= 0, got {self.length}")

    def factor_monomials(self, q_bound: int) -> Iterator[Monomial]:
        """``mono * q^(step*k)`` for every factor that can matter below q_bound."""
        k = 0
        while self.length is None or k < self.length:
            mono = self.mono._replace(q=self.mono.q + self.step * k)
            if mono.q > q_bound:
                if self.length is None:
                    return
                k += 1
                continue
            yield mono
            k += 1


def poch(spec: PochSpec, bounds: Bounds) -> TruncatedSeries:
    """The truncated product prod_k (1 - c q^(step*k))."""
    result = TruncatedSeries.one(bounds)
    for mono in spec.factor_monomials(bounds.q):
        factor = TruncatedSeries(((ONE, 1), (mono, -spec.coeff)), bounds)
        result = mul(result, factor)
        if result.is_zero():
            break
    return result


def _geometric(coeff: int, mono: Monomial, bounds: Bounds) -> TruncatedSeries:
    """1 / (1 - coeff*mono) expanded until the powers leave the bounds."""
    if mono.q == 0:
        grows_d = mono.d > 0 and bounds.d is not None
        grows_z = mono.z > 0 and bounds.z is not None
        if mono == ONE:
            raise InversionError("factor (1 - c) with constant c has no unit constant term")
        if not (grows_d or grows_z):
            raise InversionError(f"geometric series in {mono} does not terminate under {bounds}")
    terms: dict[Monomial, int] = {ONE: 1}
    power, c = mono, coeff
    while bounds.admits(power):
        terms[power] = c
        power = power.times(mono)
        c *= coeff
    return TruncatedSeries(terms, bounds)


def inv_poch(spec: PochSpec, bounds: Bounds) -> TruncatedSeries:
    """Multiplicative inverse of ``poch(spec)`` to the given bounds."""
    if spec.mono == ONE:
        raise InversionError(f"(1 - {spec.coeff}) has no unit constant term")
    result = TruncatedSeries.one(bounds)
    for mono in spec.factor_monomials(bounds.q):
        result = mul(result, _geometric(spec.coeff, mono, bounds))
    return result


def jtp(bounds: Bounds) -> TruncatedSeries:
    """sum_{n in Z} z^(-n) q^T(n), truncated to the Laurent window."""
    if not bounds.is_laurent:
        raise SeriesError("jtp needs Laurent bounds")
    lo, hi = bounds.z
    terms = ((Monomial(T(n), z=-n), 1) for n in range(-hi - 1, -lo + 2))
    return TruncatedSeries(terms, bounds)


def jtp_product(bounds: Bounds) -> TruncatedSeries:
    """(-q/z)_oo (-z)_oo (q)_oo; the factor with negative z-powers goes first."""
    return product(
        [
            poch(PochSpec(-1, Monomial(1, z=-1)), bounds),
            poch(PochSpec(-1, Monomial(0, z=1)), bounds),
            poch(PochSpec(1, Monomial(1)), bounds),
        ],
        bounds,
    )


# ---------------------------------------------------------------------------
# Shared factors
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _inv_q(n: int, q_bound: int) -> TruncatedSeries:
    """1/(q)_n."""
    return inv_poch(PochSpec(1, Monomial(1), 1, n), Bounds(q=q_bound))


@lru_cache(maxsize=None)
def _inv_q2(n: int, q_bound: int) -> TruncatedSeries:
    """1/(q^2;q^2)_n."""
    return inv_poch(PochSpec(1, Monomial(2), 2, n), Bounds(q=q_bound))


@lru_cache(maxsize=None)
def staircase_factor(m: int, bounds: Bounds) -> TruncatedSeries:
    """d^m (-q/d)_m = prod_{k=1}^{m} (d + q^k)."""
    if m == 0:
        return TruncatedSeries.one(bounds)
    prev = staircase_factor(m - 1, bounds)
    return mul(prev, TruncatedSeries({Monomial(0, d=1): 1, Monomial(m): 1}, bounds))


def _excess_cost(m: int, d_bound: int | None) -> int:
    """Minimal q-cost of prod_{k<=m}(d+q^k) when only d-degrees <= d_bound are kept."""
    if d_bound is None or m <= d_bound:
        return 0
    return T(m - d_bound)


def _r_limit(q_bound: int) -> int:
    """Largest r with T(r) <= q_bound."""
    r = 0
    while T(r + 1) <= q_bound:
        r += 1
    return r


def _lift(s: TruncatedSeries, bounds: Bounds) -> TruncatedSeries:
    """Re-home a d-free series under ``bounds``."""
    return TruncatedSeries(s.terms, bounds)


# ---------------------------------------------------------------------------
# Product sides
# ---------------------------------------------------------------------------


def _minus_q(bounds: Bounds) -> TruncatedSeries:
    return poch(PochSpec(-1, Monomial(1)), bounds)


def product_rhs(pid: ProductId | str, bounds: Bounds) -> TruncatedSeries:
    """The infinite products of the Alladi-Andrews-Gordon theorem and its d=1 companions."""
    pid = ProductId(pid)
    neg_q = _minus_q(bounds)
    neg_aq = poch(PochSpec(-1, Monomial(1, a=1)), bounds)
    neg_bq = poch(PochSpec(-1, Monomial(1, b=1)), bounds)
    neg_aq2 = poch(PochSpec(-1, Monomial(2, a=1), 2), bounds)
    neg_bq2 = poch(PochSpec(-1, Monomial(2, b=1), 2), bounds)
    inv_abq = inv_poch(PochSpec(1, Monomial(1, a=1, b=1), 2), bounds)

    match pid:
        case ProductId.AAG:
            factors = [neg_q, neg_aq2, neg_bq2]
        case ProductId.THM18:
            factors = [neg_q, neg_aq, neg_bq, inv_poch(PochSpec(1, Monomial(1)), bounds), inv_abq]
        case ProductId.THM19:
            factors = [neg_q, neg_aq, neg_bq2]
        case ProductId.THM110:
            factors = [neg_q, neg_aq, neg_bq, inv_abq]
    return product(factors, bounds)


# ---------------------------------------------------------------------------
# Sum sides
# ---------------------------------------------------------------------------


def single_sum(bounds: Bounds) -> TruncatedSeries:
    """sum_r q^T(r) (ad)^r (-q/d)_r / (q^2;q^2)_r.

    Cutoff: T(r) + excess(r) <= q_bound.
    """
    result = TruncatedSeries.zero(bounds)
    for r in range(_r_limit(bounds.q) + 1):
        if T(r) + _excess_cost(r, bounds.d) > bounds.q:
            continue
        core = _lift(_inv_q2(r, bounds.q).shift(Monomial(T(r), a=r)), bounds)
        result = result + mul(core, staircase_factor(r, bounds))
    return result


def double_sum(bounds: Bounds) -> TruncatedSeries:
    """sum_{r,s} q^(r^2+r+s^2+s-T(r+s)) a^r b^s d^(r+s) (-q/d)_(r+s) / ((q^2;q^2)_r (q^2;q^2)_s).

    The exponent equals ((r-s)^2 + r + s)/2, so r + s <= 2*q_bound;
    cutoff: ((r-s)^2 + r + s)/2 + excess(r+s) <= q_bound.
    """
    n_max = bounds.q
    grouped: dict[int, TruncatedSeries] = {}
    base = Bounds(q=n_max)
    for r in range(2 * n_max + 1):
        for s in range(2 * n_max + 1 - r):
            e = ((r - s) ** 2 + r + s) // 2
            if e + _excess_cost(r + s, bounds.d) > n_max:
                continue
            core = mul(_inv_q2(r, n_max), _inv_q2(s, n_max)).shift(Monomial(e, a=r, b=s))
            m = r + s
            grouped[m] = grouped[m] + core if m in grouped else core
    result = TruncatedSeries.zero(bounds)
    for m, core in sorted(grouped.items()):
        result = result + mul(_lift(core, bounds), staircase_factor(m, bounds))
    logger.debug("double sum: %d staircase groups to q^%d", len(grouped), n_max)
    return result


def sum_rhs(sid: SumId | str, bounds: Bounds) -> TruncatedSeries:
    """The sum sides of the three d-refined theorems and the two combinatorial sums."""
    sid = SumId(sid)
    match sid:
        case SumId.THM15:
            prefactor = mul(_minus_q(bounds), inv_poch(PochSpec(1, Monomial(1, d=1)), bounds))
            return mul(prefactor, double_sum(bounds))
        case SumId.THM16:
            prefactor = mul(_minus_q(bounds), poch(PochSpec(-1, Monomial(2, b=1), 2), bounds))
            return mul(prefactor, single_sum(bounds))
        case SumId.THM17:
            return mul(_minus_q(bounds), double_sum(bounds))
        case SumId.EQ51:
            return single_sum(bounds)
        case SumId.EQ52:
            return double_sum(bounds)


# ---------------------------------------------------------------------------
# Quadruple sums
# ---------------------------------------------------------------------------


def _quad_core(r: int, s: int, t: int, v: int, q_bound: int) -> TruncatedSeries:
    """q^(T(r)+T(s)+v) a^(r+v) b^(s+v) / ((q)_r (q)_s (q)_t (q^2;q^2)_v)."""
    denominators = mul(mul(_inv_q(r, q_bound), _inv_q(s, q_bound)), mul(_inv_q(t, q_bound), _inv_q2(v, q_bound)))
    return denominators.shift(Monomial(T(r) + T(s) + v, a=r + v, b=s + v))


def quad_sum(qid: QuadId | str, bounds: Bounds, case: int | None = None) -> TruncatedSeries:
    """The quadruple sum over r, s, t, v with the staircase term replaced per ``qid``.

    With m = r+s+t+2v the staircase term is
      contributions: q^T(m)
      c1:            q^t d^m (-q/d)_m (1 + q^(r+s+2v+1)), split as case 1 + case 2
      c2:            q^(T(m)-T(w)) d^w (-q/d)_w, w = r+v
      c3:            q^(T(m)-T(w)) d^w (-q/d)_w, w = r+s+2v
    Cutoff: T(r)+T(s)+v + (min q-exponent of the staircase term) <= q_bound.
    """
    qid = QuadId(qid)
    if case not in (None, 1, 2):
        raise SeriesError(f"case must be 1 or 2, got {case}")
    if case is not None and qid is not QuadId.C1:
        raise SeriesError("only the c1 sum has two cases")
    n_max = bounds.q
    r_max = _r_limit(n_max)
    cases = (1, 2) if case is None else (case,)

    # staircase key -> accumulated d-free core
    grouped: dict[int, TruncatedSeries] = {}
    plain = TruncatedSeries.zero(Bounds(q=n_max))

    def collect(key: int, core: TruncatedSeries) -> None:
        grouped[key] = grouped[key] + core if key in grouped else core

    for r in range(r_max + 1):
        for s in range(r_max + 1):
            for v in range(n_max + 1):
                base = T(r) + T(s) + v
                if base > n_max:
                    break
                for t in range(n_max + 1):
                    m = r + s + t + 2 * v
                    match qid:
                        case QuadId.CONTRIBUTIONS:
                            lift = T(m)
                            if base + lift > n_max:
                                break
                            plain = plain + _quad_core(r, s, t, v, n_max).shift(Monomial(lift))
                        case QuadId.C1:
                            for c in cases:
                                lift = t if c == 1 else m + 1
                                if base + lift + _excess_cost(m, bounds.d) > n_max:
                                    continue
                                collect(m, _quad_core(r, s, t, v, n_max).shift(Monomial(lift)))
                            if base + t + _excess_cost(m, bounds.d) > n_max:
                                break
                        case QuadId.C2 | QuadId.C3:
                            w = r + v if qid is QuadId.C2 else r + s + 2 * v
                            lift = T(m) - T(w)
                            if base + lift + _excess_cost(w, bounds.d) > n_max:
                                break
                            collect(w, _quad_core(r, s, t, v, n_max).shift(Monomial(lift)))

    result = _lift(plain, bounds)
    for key, core in sorted(grouped.items()):
        result = result + mul(_lift(core, bounds), staircase_factor(key, bounds))
    logger.debug("quad sum %s: %d staircase groups to q^%d", qid.value, len(grouped), n_max)
    return result


# ---------------------------------------------------------------------------
# Constant term
# ---------------------------------------------------------------------------


def constant_term_factor(bounds: Bounds) -> TruncatedSeries:
    """F(z) = (-azq)_oo (-bzq)_oo / ((z)_oo (abz^2q;q^2)_oo), Laurent mode."""
    return product(
        [
            poch(PochSpec(-1, Monomial(1, a=1, z=1)), bounds),
            poch(PochSpec(-1, Monomial(1, b=1, z=1)), bounds),
            inv_poch(PochSpec(1, Monomial(0, z=1)), bounds),
            inv_poch(PochSpec(1, Monomial(1, a=1, b=1, z=2), 2), bounds),
        ],
        bounds,
    )


def constant_term_lhs(q_bound: int, route: str = "taylor", prune: bool = True) -> TruncatedSeries:
    """[z^0] of the Jacobi triple product times F(z).

    ``taylor``: sum_{n>=0} q^T(n) [z^n] F(z), since F has no negative z-powers.
    ``laurent``: the full Laurent product, kept as an independent route.
    """
    laurent = Bounds.laurent(q_bound, prune=prune)
    factor = constant_term_factor(laurent)
    if route == "taylor":
        terms = (
            (m._replace(q=m.q + T(m.z), z=0), c)
            for m, c in factor.terms.items()
            if m.z >= 0
        )
        return TruncatedSeries(terms, Bounds(q=q_bound))
    if route == "laurent":
        return z_constant_term(mul(jtp(laurent), factor))
    raise SeriesError(f"unknown constant-term route {route!r}")


# ---------------------------------------------------------------------------
# Lemma suite
# ---------------------------------------------------------------------------


def _binomial(mono: Monomial, coeff: int, bounds: Bounds, constant: int = 1) -> TruncatedSeries:
    return TruncatedSeries(((ONE, constant), (mono, coeff)), bounds)


def _check(name: str, params: str, left: TruncatedSeries, right: TruncatedSeries, q: int, d: int | None = None) -> LemmaResult:
    verdict = equal_up_to(left, right, q, d)
    detail = None if verdict.equal else verdict.to_json()
    return LemmaResult(name=name, params=params, passed=verdict.equal, detail=detail)


def _lemma_n_minus_k(n_max: int) -> Iterator[LemmaResult]:
    """(q)_(n-k) = (q)_n / (q^-n)_k (-1)^k q^(C(k,2)-nk), denominator cleared.

    (q^-n)_k = q^(C(k,2)-nk) prod_{j<k} (q^(n-j) - 1), so the identity becomes
    (q)_(n-k) prod_{j<k} (q^(n-j) - 1) = (-1)^k (q)_n.
    """
    for n in range(n_max + 1):
        bounds = Bounds(q=T(n))
        q_n = poch(PochSpec(1, Monomial(1), 1, n), bounds)
        for k in range(n + 1):
            left = poch(PochSpec(1, Monomial(1), 1, n - k), bounds)
            for j in range(k):
                left = mul(left, _binomial(Monomial(n - j), 1, bounds, constant=-1))
            yield _check("qnminusk", f"n={n} k={k}", left, q_n.scale((-1) ** k), T(n))


def chu_factor(alpha: int, sign: int, shift: int, bounds: Bounds) -> TruncatedSeries:
    """sign*q^alpha - q^shift, one factor of (c/a)_n a^n; equal exponents cancel."""
    return TruncatedSeries(((Monomial(alpha), sign), (Monomial(shift), -1)), bounds)


def q_chu_case(sign: int, alpha: int, gamma: int, n: int, window: int) -> LemmaResult:
    """sum_k (a)_k (q^-n)_k q^k / ((q)_k (c)_k) = (c/a)_n a^n / (c)_n at a = sign*q^alpha, c = q^gamma.

    With (q^-n)_k q^k = (-1)^k q^e_k (q^(n-k+1))_k, e_k = C(k,2) - nk + k, both
    sides are multiplied by q^S, S = max(-e_k), and (c/a)_n a^n = prod_{j<n} (a - c q^j).
    The comparison runs to q^(S + window) so every n is checked over the same span.
    """
    exps = [k * (k - 1) // 2 - n * k + k for k in range(n + 1)]
    shift = max(0, *(-e for e in exps))
    q_bound = shift + window
    bounds = Bounds(q=q_bound)
    left = TruncatedSeries.zero(bounds)
    for k, e in enumerate(exps):
        term = product(
            [
                poch(PochSpec(sign, Monomial(alpha), 1, k), bounds),
                poch(PochSpec(1, Monomial(n - k + 1), 1, k), bounds),
                _inv_q(k, q_bound),
                inv_poch(PochSpec(1, Monomial(gamma), 1, k), bounds),
            ],
            bounds,
        )
        left = left + term.shift(Monomial(e + shift), (-1) ** k)
    right = inv_poch(PochSpec(1, Monomial(gamma), 1, n), bounds).shift(Monomial(shift))
    for j in range(n):
        right = mul(right, chu_factor(alpha, sign, gamma + j, bounds))
    a = f"{'-' if sign < 0 else ''}q^{alpha}"
    return _check("qchu", f"a={a} c=q^{gamma} n={n}", left, right, q_bound)


def _lemma_q_chu(n_max: int, window: int) -> Iterator[LemmaResult]:
    for sign in (1, -1):
        for alpha in range(1, 5):
            for gamma in range(1, 5):
                for n in range(n_max + 1):
                    yield q_chu_case(sign, alpha, gamma, n, window)


def _lemma_qbin2(q_bound: int) -> Iterator[LemmaResult]:
    """sum_n z^n (-x)_n / (q)_n = (-xz)_oo / (z)_oo with z = d q^beta, x = q^beta."""
    bounds = Bounds(q=q_bound)
    for beta in range(1, 4):
        left = TruncatedSeries.zero(bounds)
        for n in range(q_bound // beta + 1):
            term = mul(poch(PochSpec(-1, Monomial(beta), 1, n), bounds), _lift(_inv_q(n, q_bound), bounds))
            left = left + term.shift(Monomial(beta * n, d=n))
        right = mul(
            poch(PochSpec(-1, Monomial(2 * beta, d=1)), bounds),
            inv_poch(PochSpec(1, Monomial(beta, d=1)), bounds),
        )
        yield _check("qbin2", f"beta={beta}", left, right, q_bound)


def _lemma_qbin1(q_bound: int) -> Iterator[LemmaResult]:
    """sum_n z^n q^T(n) / (q)_n = (-zq)_oo with z = d q^beta."""
    bounds = Bounds(q=q_bound)
    for beta in range(0, 4):
        left = TruncatedSeries.zero(bounds)
        for n in range(_r_limit(q_bound) + 1):
            left = left + _lift(_inv_q(n, q_bound), bounds).shift(Monomial(T(n) + beta * n, d=n))
        right = poch(PochSpec(-1, Monomial(beta + 1, d=1)), bounds)
        yield _check("qbin1", f"beta={beta}", left, right, q_bound)


def jtp_bounds(q_bound: int) -> Bounds:
    """Unpruned window [-M, M+1], M = z_reach(q_bound).

    Every product term up to q^q_bound has its z-exponent in this window, and so
    does every partial product, so both triple-product sides are exact on it.
    """
    m = z_reach(q_bound)
    return Bounds(q=q_bound, z=(-m, m + 1), z_prune=False)


def _lemma_jtp(q_bound: int) -> Iterator[LemmaResult]:
    bounds = jtp_bounds(q_bound)
    left = jtp(bounds)
    right = jtp_product(bounds)
    yield _check("jtp", f"q<={q_bound}", left, right, q_bound)


def _specialisations(q_bound: int) -> Iterator[LemmaResult]:
    """d=0 and d=1 of the sum sides against the products they collapse to."""
    full = Bounds(q=q_bound)
    unbounded = Bounds(q=q_bound, d=None)
    aag = product_rhs(ProductId.AAG, full)
    expected = {
        SumId.THM15: (aag, product_rhs(ProductId.THM18, full)),
        SumId.THM16: (aag, product_rhs(ProductId.THM19, full)),
        SumId.THM17: (aag, product_rhs(ProductId.THM110, full)),
        SumId.EQ51: (
            poch(PochSpec(-1, Monomial(2, a=1), 2), full),
            poch(PochSpec(-1, Monomial(1, a=1)), full),
        ),
        SumId.EQ52: (
            mul(poch(PochSpec(-1, Monomial(2, a=1), 2), full), poch(PochSpec(-1, Monomial(2, b=1), 2), full)),
            product(
                [
                    poch(PochSpec(-1, Monomial(1, a=1)), full),
                    poch(PochSpec(-1, Monomial(1, b=1)), full),
                    inv_poch(PochSpec(1, Monomial(1, a=1, b=1), 2), full),
                ],
                full,
            ),
        ),
    }
    for sid, (at_zero, at_one) in expected.items():
        series = sum_rhs(sid, unbounded)
        yield _check("d=0", sid.value, specialize_d(series, 0), _lift(at_zero, Bounds(q=q_bound, d=0)), q_bound, 0)
        yield _check("d=1", sid.value, specialize_d(series, 1), _lift(at_one, Bounds(q=q_bound, d=0)), q_bound, 0)


def lemma_suite(q_bound: int = 40, series_bound: int = 30, n_max: int = 12, chu_n_max: int = 8) -> list[LemmaResult]:
    """Run every lemma check; failures are entries, never exceptions."""
    results: list[LemmaResult] = []
    results.extend(_lemma_n_minus_k(n_max))
    results.extend(_lemma_q_chu(chu_n_max, min(series_bound, 20)))
    results.extend(_lemma_qbin2(series_bound))
    results.extend(_lemma_qbin1(series_bound))
    results.extend(_lemma_jtp(q_bound))
    results.extend(_specialisations(min(series_bound, 20)))
    failed = sum(not r.passed for r in results)
    logger.info("lemma suite: %d checks, %d failed", len(results), failed)
    return results
