"""Exact truncated power series in q with polynomial coefficients in a, b, d.

Every series carries its own truncation (``Bounds``): terms beyond the
q-bound, the d-bound or the z-window are never stored, so mixing series of
different precision is explicit rather than silent.

In Laurent mode a fifth variable ``z`` is tracked inside a window
``[-M, M]`` where ``M`` is the largest m with T(m) = m(m+1)/2 <= q_bound.
A positive power z^m is dropped as soon as ``n_q + T(m) > q_bound``: such a
term can only reach z^0 through the negative powers of ``(-q/z)_oo``, which
cost at least T(m).
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass
from fractions import Fraction
from math import ceil
from types import MappingProxyType
from typing import NamedTuple

logger = logging.getLogger(__name__)


class SeriesError(ValueError):
    """Base class for series arithmetic errors."""


class SeriesBoundsError(SeriesError):
    """A series is used beyond the precision it carries."""


class DilationError(SeriesError):
    """A dilation produced a negative q-exponent."""

    def __init__(self, monomial: Monomial, image: int) -> None:
        self.monomial = monomial
        self.image = image
        super().__init__(f"dilation maps {monomial} to negative q-exponent {image}")


def triangular(m: int) -> int:
    """T(m) = m(m+1)/2 (also used for negative m, where T(-m) = T(m-1))."""
    return m * (m + 1) // 2


def z_reach(q_bound: int) -> int:
    """Largest m with T(m) <= q_bound."""
    m = 0
    while triangular(m + 1) <= q_bound:
        m += 1
    return m


class Monomial(NamedTuple):
    """Exponents of q, a, b, d, z; tuple order is the canonical monomial order."""

    q: int
    a: int = 0
    b: int = 0
    d: int = 0
    z: int = 0

    def times(self, other: Monomial) -> Monomial:
        return Monomial(
            self.q + other.q,
            self.a + other.a,
            self.b + other.b,
            self.d + other.d,
            self.z + other.z,
        )


ONE = Monomial(0)


@dataclass(frozen=True)
class Bounds:
    """Truncation carried by a series.

    ``d=None`` means the d-degree is untruncated; ``z=None`` means a standard
    (non-Laurent) series in which every z-exponent is 0.
    """

    q: int
    d: int | None = None
    z: tuple[int, int] | None = None
    z_prune: bool = True

    @classmethod
    def laurent(cls, q: int, d: int | None = None, prune: bool = True) -> Bounds:
        m = z_reach(q)
        return cls(q=q, d=d, z=(-m, m), z_prune=prune)

    @property
    def is_laurent(self) -> bool:
        return self.z is not None

    def admits(self, m: Monomial) -> bool:
        if m.q > self.q:
            return False
        if self.d is not None and m.d > self.d:
            return False
        if self.z is None:
            return m.z == 0
        lo, hi = self.z
        if m.z < lo or m.z > hi:
            return False
        if self.z_prune and m.z > 0 and m.q + triangular(m.z) > self.q:
            return False
        return True

    def meet(self, other: Bounds) -> Bounds:
        """Componentwise minimum of two bounds."""
        d: int | None
        if self.d is None:
            d = other.d
        elif other.d is None:
            d = self.d
        else:
            d = min(self.d, other.d)

        if self.z is None:
            z = other.z
        elif other.z is None:
            z = self.z
        else:
            z = (max(self.z[0], other.z[0]), min(self.z[1], other.z[1]))
        return Bounds(q=min(self.q, other.q), d=d, z=z, z_prune=self.z_prune and other.z_prune)

    def covers(self, q: int, d: int | None) -> bool:
        """True when a series with these bounds is exact up to (q, d)."""
        if self.q < q:
            return False
        if self.d is None:
            return True
        return d is not None and self.d >= d

    def with_q(self, q: int) -> Bounds:
        return Bounds(q=q, d=self.d, z=self.z, z_prune=self.z_prune)


class TruncatedSeries:
    """Immutable sparse map Monomial -> int under a fixed ``Bounds``."""

    __slots__ = ("_terms", "_bounds")

    def __init__(
        self,
        terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]] = (),
        bounds: Bounds = Bounds(q=0),
    ) -> None:
        items = terms.items() if isinstance(terms, Mapping) else terms
        canonical: dict[Monomial, int] = {}
        for mono, coeff in items:
            mono = Monomial(*mono)
            if mono.a < 0 or mono.b < 0 or mono.d < 0:
                raise SeriesError(f"negative a/b/d exponent in {mono}")
            if mono.z != 0 and bounds.z is None:
                raise SeriesError(f"z-exponent in a standard series: {mono}")
            if not bounds.admits(mono):
                continue
            canonical[mono] = canonical.get(mono, 0) + coeff
        self._terms = {m: c for m, c in canonical.items() if c != 0}
        self._bounds = bounds

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, bounds: Bounds) -> TruncatedSeries:
        return cls({}, bounds)

    @classmethod
    def one(cls, bounds: Bounds) -> TruncatedSeries:
        return cls({ONE: 1}, bounds)

    @classmethod
    def monomial(cls, mono: Monomial, bounds: Bounds, coeff: int = 1) -> TruncatedSeries:
        return cls({mono: coeff}, bounds)

    @classmethod
    def _trusted(cls, terms: dict[Monomial, int], bounds: Bounds) -> TruncatedSeries:
        """Wrap an already canonical term map without re-checking it."""
        series = cls.__new__(cls)
        series._terms = terms
        series._bounds = bounds
        return series

    # -- accessors ---------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return MappingProxyType(self._terms)

    @property
    def bounds(self) -> Bounds:
        return self._bounds

    @property
    def q_bound(self) -> int:
        return self._bounds.q

    @property
    def d_bound(self) -> int | None:
        return self._bounds.d

    @property
    def z_window(self) -> tuple[int, int] | None:
        return self._bounds.z

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._bounds == other._bounds and self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        shown = ", ".join(f"{m}: {c}" for m, c in sorted(self._terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f", ... ({len(self._terms)} terms)"
        return f"TruncatedSeries({{{shown}{more}}}, {self._bounds})"

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: TruncatedSeries) -> TruncatedSeries:
        return add(self, other)

    def __sub__(self, other: TruncatedSeries) -> TruncatedSeries:
        return add(self, other.scale(-1))

    def __neg__(self) -> TruncatedSeries:
        return self.scale(-1)

    def __mul__(self, other: TruncatedSeries) -> TruncatedSeries:
        return mul(self, other)

    def scale(self, factor: int) -> TruncatedSeries:
        if factor == 0:
            return TruncatedSeries.zero(self._bounds)
        return TruncatedSeries._trusted(
            {m: c * factor for m, c in self._terms.items()}, self._bounds
        )

    def shift(self, mono: Monomial, coeff: int = 1) -> TruncatedSeries:
        """Multiply by ``coeff * mono``."""
        return TruncatedSeries(
            ((m.times(mono), c * coeff) for m, c in self._terms.items()), self._bounds
        )

    def truncate(self, bounds: Bounds) -> TruncatedSeries:
        """Re-truncate to tighter bounds."""
        return TruncatedSeries(self._terms, self._bounds.meet(bounds))

    def coefficient(self, n: int, z: int = 0) -> dict[tuple[int, int, int], int]:
        return coefficient(self, n, z)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self._terms.items())


# ---------------------------------------------------------------------------
# Ring operations
# ---------------------------------------------------------------------------


def add(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    """Coefficientwise sum, truncated to the common bounds."""
    bounds = s1.bounds.meet(s2.bounds)
    acc: dict[Monomial, int] = {}
    for series in (s1, s2):
        for mono, coeff in series.terms.items():
            if bounds.admits(mono):
                acc[mono] = acc.get(mono, 0) + coeff
    return TruncatedSeries._trusted({m: c for m, c in acc.items() if c}, bounds)


def mul(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product; terms outside the common bounds are never formed."""
    bounds = s1.bounds.meet(s2.bounds)
    if s1.is_zero() or s2.is_zero():
        return TruncatedSeries.zero(bounds)
    if len(s1) > len(s2):
        s1, s2 = s2, s1

    q_max = bounds.q
    d_max = bounds.d
    laurent = bounds.z is not None
    right = sorted(s2.terms.items(), key=lambda item: item[0].q)
    admits = bounds.admits
    acc: dict[Monomial, int] = {}

    for m1, c1 in s1.terms.items():
        q1, a1, b1, d1, z1 = m1
        room = q_max - q1
        if room < 0:
            continue
        for m2, c2 in right:
            q2, a2, b2, d2, z2 = m2
            if q2 > room:
                break
            d = d1 + d2
            if d_max is not None and d > d_max:
                continue
            mono = Monomial(q1 + q2, a1 + a2, b1 + b2, d, z1 + z2)
            if laurent and not admits(mono):
                continue
            acc[mono] = acc.get(mono, 0) + c1 * c2

    return TruncatedSeries._trusted({m: c for m, c in acc.items() if c}, bounds)


def product(factors: Iterable[TruncatedSeries], bounds: Bounds) -> TruncatedSeries:
    """Multiply ``factors`` left to right starting from 1."""
    result = TruncatedSeries.one(bounds)
    for factor in factors:
        result = mul(result, factor)
    return result


def coefficient(s: TruncatedSeries, n: int, z: int = 0) -> dict[tuple[int, int, int], int]:
    """The a,b,d-polynomial multiplying q^n (and z^z in Laurent mode)."""
    if n > s.q_bound:
        raise SeriesBoundsError(f"q^{n} is beyond the series bound q^{s.q_bound}")
    return {
        (m.a, m.b, m.d): c
        for m, c in sorted(s.terms.items())
        if m.q == n and m.z == z
    }


def specialize_d(s: TruncatedSeries, value: int) -> TruncatedSeries:
    """Set d=0 (keep d-free terms) or d=1 (sum over all d-powers)."""
    if value == 0:
        terms = ((m, c) for m, c in s.terms.items() if m.d == 0)
    elif value == 1:
        if s.d_bound is not None:
            raise SeriesBoundsError(
                f"d=1 needs every d-power, but the series stops at d^{s.d_bound}"
            )
        terms = ((m._replace(d=0), c) for m, c in s.terms.items())
    else:
        raise SeriesError(f"only d=0 and d=1 are supported, got d={value}")
    return TruncatedSeries(terms, Bounds(q=s.q_bound, d=0, z=s.z_window, z_prune=s.bounds.z_prune))


def z_constant_term(s: TruncatedSeries) -> TruncatedSeries:
    """[z^0] of a Laurent series, as a standard series."""
    return TruncatedSeries(
        ((m, c) for m, c in s.terms.items() if m.z == 0),
        Bounds(q=s.q_bound, d=s.d_bound),
    )


# ---------------------------------------------------------------------------
# Comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Outcome of ``equal_up_to``: equal, or the first differing monomial."""

    equal: bool
    monomial: Monomial | None = None
    left: int = 0
    right: int = 0

    def to_json(self) -> dict | None:
        if self.equal or self.monomial is None:
            return None
        return {
            "monomial": dict(self.monomial._asdict()),
            "left": str(self.left),
            "right": str(self.right),
        }


def equal_up_to(
    s1: TruncatedSeries, s2: TruncatedSeries, n: int, k: int | None = None
) -> Comparison:
    """Compare all terms with q-degree <= n and d-degree <= k (k=None: all)."""
    for side, series in (("left", s1), ("right", s2)):
        if not series.bounds.covers(n, k):
            raise SeriesBoundsError(
                f"{side} series has bounds (q^{series.q_bound}, d^{series.d_bound}),"
                f" comparison needs (q^{n}, d^{k})"
            )

    def visible(m: Monomial) -> bool:
        return m.q <= n and (k is None or m.d <= k)

    keys = {m for m in s1.terms if visible(m)} | {m for m in s2.terms if visible(m)}
    for mono in sorted(keys):
        left = s1.terms.get(mono, 0)
        right = s2.terms.get(mono, 0)
        if left != right:
            return Comparison(False, mono, left, right)
    return Comparison(True)


# ---------------------------------------------------------------------------
# Dilation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DilationRule:
    """q -> q^scale, a -> a q^a_shift, b -> b q^b_shift (u-parts scale only).

    A part of value v and colour c becomes ``scale*v + shift_c``.
    """

    name: str
    scale: int
    a_shift: int
    b_shift: int
    u_shift: int = 0

    def exponent(self, n: int, i: int, j: int) -> int:
        return self.scale * n + self.a_shift * i + self.b_shift * j

    def part(self, value: int, color: str) -> int:
        shift = {"a": self.a_shift, "b": self.b_shift, "u": self.u_shift}[color]
        return self.scale * value + shift

    def ratio(self) -> Fraction:
        """Smallest dilated/original ratio over part values that dilate to >= 1."""
        best: Fraction | None = None
        for shift in (self.a_shift, self.b_shift, self.u_shift):
            if shift >= 0:
                r = Fraction(self.scale)
            else:
                v_min = ceil(Fraction(1 - shift, self.scale))
                r = Fraction(self.scale * v_min + shift, v_min)
            best = r if best is None else min(best, r)
        assert best is not None
        return best

    def horizon(self, q_bound: int) -> int:
        """Largest dilated exponent whose coefficient is complete.

        Every dropped source term has n > q_bound, so its image has exponent
        at least ratio * (q_bound + 1).
        """
        return ceil(self.ratio() * (q_bound + 1)) - 1


MOD3 = DilationRule("mod3", scale=3, a_shift=-2, b_shift=-4)
MOD4 = DilationRule("mod4", scale=4, a_shift=1, b_shift=-2)

DILATIONS: dict[str, DilationRule] = {rule.name: rule for rule in (MOD3, MOD4)}


def dilate(s: TruncatedSeries, rule: DilationRule | Callable[[int, int, int, int], int]) -> TruncatedSeries:
    """Remap every monomial's q-exponent by ``rule``.

    With a ``DilationRule`` the result is truncated at the rule's completeness
    horizon. A bare callable ``(n, i, j, k) -> n'`` keeps the input q-bound.
    """
    if s.z_window is not None:
        raise SeriesError("dilation of Laurent series is not supported")
    if isinstance(rule, DilationRule):
        image = lambda m: rule.exponent(m.q, m.a, m.b)  # noqa: E731
        q_bound = rule.horizon(s.q_bound)
    else:
        image = lambda m: rule(m.q, m.a, m.b, m.d)  # noqa: E731
        q_bound = s.q_bound

    mapped: list[tuple[Monomial, int]] = []
    for mono, coeff in s.sorted_terms():
        n = image(mono)
        if n < 0:
            raise DilationError(mono, n)
        mapped.append((mono._replace(q=n), coeff))
    logger.debug("dilated %d terms, horizon q^%d", len(mapped), q_bound)
    return TruncatedSeries(mapped, Bounds(q=q_bound, d=s.d_bound))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def to_json(s: TruncatedSeries) -> dict:
    data: dict = {"q_bound": s.q_bound, "d_bound": s.d_bound}
    if s.z_window is not None:
        data["z_window"] = list(s.z_window)
        data["z_prune"] = s.bounds.z_prune
    data["terms"] = [
        {"q": m.q, "a": m.a, "b": m.b, "d": m.d, "z": m.z, "c": str(c)}
        for m, c in s.sorted_terms()
    ]
    return data


def from_json(data: Mapping) -> TruncatedSeries:
    window = data.get("z_window")
    bounds = Bounds(
        q=int(data["q_bound"]),
        d=None if data.get("d_bound") is None else int(data["d_bound"]),
        z=None if window is None else (int(window[0]), int(window[1])),
        z_prune=bool(data.get("z_prune", True)),
    )
    terms = (
        (Monomial(t["q"], t["a"], t["b"], t["d"], t.get("z", 0)), int(t["c"]))
        for t in data["terms"]
    )
    return TruncatedSeries(terms, bounds)
