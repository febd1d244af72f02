"""Exact interval-union arithmetic on the real line.

Everything here works on :class:`fractions.Fraction` values. Endpoint openness
is tracked explicitly: measures ignore it, set operations respect it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

Rational = Fraction


class DomainError(ValueError):
    """Raised when an operation's set-theoretic precondition fails."""


class EmptyIntervalError(ValueError):
    pass


def as_rational(value) -> Fraction:
    """Coerce ``value`` to an exact rational.

    Accepts ints, Fractions and ``"num/den"`` strings. Floats are refused:
    silently converting them would defeat the point of exact arithmetic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError(f"refusing inexact float {value!r}; pass a Fraction or 'num/den'")
    try:
        # gmpy2.mpq, numbers.Rational implementations
        return Fraction(value.numerator, value.denominator)
    except AttributeError:
        raise TypeError(f"cannot interpret {value!r} as a rational") from None


def format_rational(value) -> str:
    q = as_rational(value)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text) -> Fraction:
    return as_rational(text)


def ceil_div(a: Fraction, b: Fraction) -> int:
    return math.ceil(a / b)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo, hi = as_rational(self.lo), as_rational(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if lo > hi:
            raise EmptyIntervalError(f"lo {lo} > hi {hi}")
        if lo == hi and not (self.lo_closed and self.hi_closed):
            raise EmptyIntervalError(f"degenerate interval at {lo} must be closed")

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo, hi) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x, True, True)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        x = as_rational(x)
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def contains_interval(self, other: "Interval") -> bool:
        if other.lo < self.lo or (other.lo == self.lo and other.lo_closed and not self.lo_closed):
            return False
        if other.hi > self.hi or (other.hi == self.hi and other.hi_closed and not self.hi_closed):
            return False
        return True

    def closure(self) -> "Interval":
        return Interval(self.lo, self.hi, True, True)

    def interior(self) -> Optional["Interval"]:
        return make_interval(self.lo, self.hi, False, False)

    def translate(self, t) -> "Interval":
        t = as_rational(t)
        return Interval(self.lo + t, self.hi + t, self.lo_closed, self.hi_closed)

    def scale(self, lam) -> "Interval":
        lam = as_rational(lam)
        if lam > 0:
            return Interval(self.lo * lam, self.hi * lam, self.lo_closed, self.hi_closed)
        if lam < 0:
            return Interval(self.hi * lam, self.lo * lam, self.hi_closed, self.lo_closed)
        return Interval.point(0)

    def negate(self) -> "Interval":
        return self.scale(-1)

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        if (self.lo, not self.lo_closed) >= (other.lo, not other.lo_closed):
            lo, lc = self.lo, self.lo_closed
        else:
            lo, lc = other.lo, other.lo_closed
        if (self.hi, self.hi_closed) <= (other.hi, other.hi_closed):
            hi, hc = self.hi, self.hi_closed
        else:
            hi, hc = other.hi, other.hi_closed
        return make_interval(lo, hi, lc, hc)

    def minus(self, other: "Interval") -> "Interval":
        """Minkowski difference ``self - other`` of two intervals."""
        return Interval(
            self.lo - other.hi,
            self.hi - other.lo,
            self.lo_closed and other.hi_closed,
            self.hi_closed and other.lo_closed,
        )

    def to_json(self) -> list:
        return [format_rational(self.lo), format_rational(self.hi), self.lo_closed, self.hi_closed]

    @classmethod
    def from_json(cls, row: Sequence) -> "Interval":
        if len(row) == 2:
            return cls(as_rational(row[0]), as_rational(row[1]))
        lo, hi, lc, hc = row
        return cls(as_rational(lo), as_rational(hi), bool(lc), bool(hc))

    def __repr__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


def make_interval(lo, hi, lo_closed=True, hi_closed=True) -> Optional[Interval]:
    """Build an interval, returning ``None`` when the data describes the empty set."""
    if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
        return None
    return Interval(lo, hi, lo_closed, hi_closed)


def _left_key(iv: Interval):
    return (iv.lo, not iv.lo_closed)


def _right_key(iv: Interval):
    return (iv.hi, iv.hi_closed)


def _touches(left: Interval, right: Interval) -> bool:
    # ``right`` starts at or after ``left`` starts; do they overlap or abut
    # with the shared point included on at least one side?
    if right.lo < left.hi:
        return True
    if right.lo == left.hi:
        return right.lo_closed or left.hi_closed
    return False


def _normalize_parts(parts: Iterable[Interval]) -> tuple:
    ordered = sorted(parts, key=_left_key)
    if not ordered:
        return ()
    merged = []
    cur = ordered[0]
    for iv in ordered[1:]:
        if _touches(cur, iv):
            if _right_key(iv) > _right_key(cur):
                cur = Interval(cur.lo, iv.hi, cur.lo_closed, iv.hi_closed)
        else:
            merged.append(cur)
            cur = iv
    merged.append(cur)
    return tuple(merged)


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of pairwise disjoint, non-touching intervals, sorted by ``lo``.

    Build instances through :func:`normalize` (or ``IntervalUnion.of``); the
    raw constructor trusts its input.
    """

    parts: tuple = ()

    @classmethod
    def of(cls, parts: Iterable[Interval] = ()) -> "IntervalUnion":
        return cls(_normalize_parts(parts))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __bool__(self) -> bool:
        return bool(self.parts)

    @property
    def measure(self) -> Fraction:
        return sum((p.length for p in self.parts), Fraction(0))

    def hull(self) -> Optional[Interval]:
        if not self.parts:
            return None
        a, b = self.parts[0], self.parts[-1]
        return Interval(a.lo, b.hi, a.lo_closed, b.hi_closed)

    @property
    def diameter(self) -> Fraction:
        h = self.hull()
        return h.length if h is not None else Fraction(0)

    def contains(self, x) -> bool:
        x = as_rational(x)
        # binary search would do; unions here are small enough when called pointwise
        lo, hi = 0, len(self.parts)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.parts[mid].hi < x:
                lo = mid + 1
            else:
                hi = mid
        for iv in self.parts[lo:lo + 2]:
            if iv.contains(x):
                return True
        return False

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.of(self.parts + other.parts)

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        i = j = 0
        a, b = self.parts, other.parts
        while i < len(a) and j < len(b):
            piece = a[i].intersect(b[j])
            if piece is not None:
                out.append(piece)
            if _right_key(a[i]) <= _right_key(b[j]):
                i += 1
            else:
                j += 1
        return IntervalUnion(tuple(out))

    def difference(self, other: "IntervalUnion") -> "IntervalUnion":
        hull = self.hull()
        if hull is None:
            return self
        return self.intersection(complement_in(hull, other.intersection(IntervalUnion((hull,)))))

    def issubset(self, other: "IntervalUnion") -> bool:
        j = 0
        for iv in self.parts:
            while j < len(other.parts) and _right_key(other.parts[j]) < _right_key(iv) and not other.parts[j].contains_interval(iv):
                j += 1
            if j == len(other.parts) or not other.parts[j].contains_interval(iv):
                return False
        return True

    def translate(self, t) -> "IntervalUnion":
        t = as_rational(t)
        return IntervalUnion(tuple(p.translate(t) for p in self.parts))

    def scale(self, lam) -> "IntervalUnion":
        lam = as_rational(lam)
        if lam == 0:
            return IntervalUnion((Interval.point(0),)) if self.parts else self
        return IntervalUnion.of(p.scale(lam) for p in self.parts)

    def negate(self) -> "IntervalUnion":
        return self.scale(-1)

    def to_json(self) -> list:
        return [p.to_json() for p in self.parts]

    @classmethod
    def from_json(cls, rows) -> "IntervalUnion":
        return cls.of(Interval.from_json(r) for r in rows)

    def __repr__(self):
        inner = " ∪ ".join(repr(p) for p in self.parts) or "∅"
        return f"IntervalUnion({inner})"


def normalize(parts: Iterable[Interval]) -> IntervalUnion:
    """Sort, merge overlapping or touching parts; the measure is preserved."""
    if isinstance(parts, IntervalUnion):
        parts = parts.parts
    return IntervalUnion.of(parts)


def measure(u) -> Fraction:
    if not isinstance(u, IntervalUnion):
        u = normalize(u)
    return u.measure


def complement_in(ambient: Interval, u: IntervalUnion) -> IntervalUnion:
    """``ambient \\ u``; every part of ``u`` must lie inside ``ambient``."""
    if not isinstance(u, IntervalUnion):
        u = normalize(u)
    for p in u.parts:
        if not ambient.contains_interval(p):
            raise DomainError(f"{p!r} is not contained in ambient {ambient!r}")
    out = []
    lo, lc = ambient.lo, ambient.lo_closed
    for p in u.parts:
        piece = make_interval(lo, p.lo, lc, not p.lo_closed)
        if piece is not None:
            out.append(piece)
        lo, lc = p.hi, not p.hi_closed
    piece = make_interval(lo, ambient.hi, lc, ambient.hi_closed)
    if piece is not None:
        out.append(piece)
    return IntervalUnion(tuple(out))


def minkowski_diff(u, v) -> IntervalUnion:
    """Exact ``u - v = {x - y : x in u, y in v}`` for finite unions."""
    us = u.parts if isinstance(u, IntervalUnion) else tuple(u)
    vs = v.parts if isinstance(v, IntervalUnion) else tuple(v)
    return IntervalUnion.of(a.minus(b) for a in us for b in vs)


def minkowski_sum(u, v) -> IntervalUnion:
    vs = v.parts if isinstance(v, IntervalUnion) else tuple(v)
    return minkowski_diff(u, [b.negate() for b in vs])


def min_cover_count(u: IntervalUnion, eps) -> int:
    """Fewest closed intervals of length ``eps`` covering ``u``.

    Leftmost-point greedy sweep, which is optimal on the line.
    """
    eps = as_rational(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not isinstance(u, IntervalUnion):
        u = normalize(u)
    count = 0
    reach = None  # right end of the last placed interval
    for p in u.parts:
        if reach is not None and (p.lo < reach or (p.lo == reach and p.lo_closed)):
            if p.hi <= reach:
                continue
            k = math.ceil((p.hi - reach) / eps)
            count += k
            reach += k * eps
        else:
            k = max(1, math.ceil(p.length / eps))
            count += k
            reach = p.lo + k * eps
    return count
