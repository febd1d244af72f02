"""Representations of the two Cantor-set roles.

* :class:`GapCantor` -- a compact set given as an ambient interval minus an
  enumerable sequence of open gaps, produced level by level.
* :class:`DigitCantorSpec` -- a self-similar digit set
  ``{sum d_i b^-i : d_i in J}`` under an affine map, with exact outer covers,
  dimension enclosures and box fuzzy measure certificates.
* :class:`FiniteK` -- a finite interval union playing the role of ``K``; used
  where the nesting computation must be exact.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Iterator, List, Optional, Sequence, Tuple

from .intervals import (
    DomainError,
    Interval,
    IntervalUnion,
    as_rational,
    min_cover_count,
    normalize,
)
from .rounding import DEFAULT_PRECISION, Enclosure, log_ratio_enclosure, pow_enclosure

DEFAULT_PART_BUDGET = 1 << 21


class BudgetExceeded(RuntimeError):
    pass


class UncertifiableError(ValueError):
    """Raised instead of emitting a bound that could not be certified."""


# --------------------------------------------------------------------- gap sets


@dataclass(frozen=True)
class Budget:
    """Truncation policy for a gap enumeration; ``None`` fields do not constrain."""

    level: Optional[int] = None
    min_length: Optional[Fraction] = None
    count: Optional[int] = None

    def __post_init__(self):
        if self.min_length is not None:
            object.__setattr__(self, "min_length", as_rational(self.min_length))

    @classmethod
    def all(cls) -> "Budget":
        return cls()


@dataclass(frozen=True)
class GapTail:
    """Certified description of every gap beyond the enumerated levels.

    ``power_sum(p, precision)`` is an upper bound on the sum of ``l**p`` over the
    tail gaps; ``max_length`` bounds each tail gap's length.
    """

    after_level: int
    max_length: Fraction
    power_sum: Callable[[Fraction, int], Fraction]
    exact_length_sum: Optional[Fraction] = None


@dataclass(frozen=True, eq=False)
class GapCantor:
    ambient: Interval
    level_source: Callable[[], Iterator[Sequence[Interval]]]
    meta: dict = field(default_factory=dict)
    tail: Optional[GapTail] = None
    histogram_source: Optional[Callable[[], Counter]] = None

    @classmethod
    def from_levels(cls, ambient: Interval, levels: Sequence[Sequence[Interval]], meta=None, tail=None) -> "GapCantor":
        frozen = tuple(tuple(sorted(level, key=lambda g: (g.lo, g.hi))) for level in levels)
        return cls(ambient, lambda: iter(frozen), dict(meta or {}), tail)

    @classmethod
    def from_gaps(cls, ambient: Interval, gaps: Iterable[Interval], meta=None) -> "GapCantor":
        gaps = tuple(gaps)
        return cls.from_levels(ambient, [gaps] if gaps else [], meta)

    @property
    def diameter(self) -> Fraction:
        return self.ambient.length

    def levels(self) -> Iterator[Sequence[Interval]]:
        return self.level_source()

    def length_histogram(self, budget: Budget = Budget()) -> Counter:
        """Multiset of gap lengths within ``budget``."""
        if self.histogram_source is not None and budget == Budget():
            return self.histogram_source()
        return Counter(g.length for g in gaps_up_to(self, budget))

    def complement(self, budget: Budget = Budget()):
        from .intervals import complement_in

        return complement_in(self.ambient, normalize(gaps_up_to(self, budget)))


def take_gaps(gc: GapCantor, budget: Budget = Budget()) -> Tuple[List[Tuple[int, Interval]], bool]:
    """Gaps in enumeration order as ``(level, gap)`` plus a flag saying nothing was cut."""
    out: List[Tuple[int, Interval]] = []
    complete = True
    for level_no, level in enumerate(gc.levels(), start=1):
        if budget.level is not None and level_no > budget.level:
            complete = False
            break
        stop = False
        for g in level:
            if budget.min_length is not None and g.length < budget.min_length:
                complete = False
                continue
            if budget.count is not None and len(out) >= budget.count:
                complete = False
                stop = True
                break
            out.append((level_no, g))
        if stop:
            break
    return out, complete


def gaps_up_to(gc: GapCantor, budget: Budget = Budget()) -> List[Interval]:
    """Deterministic finite prefix of the gap sequence (level-major, left to right)."""
    if budget.count is not None and budget.count <= 0:
        return []
    return [g for _, g in take_gaps(gc, budget)[0]]


def scale_gapset(gc: GapCantor, lam) -> GapCantor:
    lam = as_rational(lam)
    if lam <= 0:
        raise DomainError("scale factor must be positive")
    source = gc.level_source
    tail = None
    if gc.tail is not None:
        old = gc.tail

        def power_sum(p, precision=DEFAULT_PRECISION, _old=old):
            return _old.power_sum(p, precision) * pow_enclosure(lam, p, precision)[1]

        tail = GapTail(
            old.after_level,
            old.max_length * lam,
            power_sum,
            None if old.exact_length_sum is None else old.exact_length_sum * lam,
        )
    hist = None
    if gc.histogram_source is not None:
        base_hist = gc.histogram_source
        hist = lambda: Counter({k * lam: v for k, v in base_hist().items()})  # noqa: E731
    meta = dict(gc.meta)
    meta["scaled_by"] = str(lam * as_rational(meta.get("scaled_by", 1)))
    return GapCantor(
        gc.ambient.scale(lam),
        lambda: ([g.scale(lam) for g in level] for level in source()),
        meta,
        tail,
        hist,
    )


# --------------------------------------------------------------- K-side sets


@dataclass(frozen=True)
class CoverApprox:
    depth: int
    cover: IntervalUnion
    part_count: int
    part_length: Fraction

    @property
    def measure(self) -> Fraction:
        return self.cover.measure


@dataclass(frozen=True)
class DigitCantorSpec:
    """``translate + scale * {sum_{i>=1} d_i b^-i : d_i in digits}``."""

    base: int
    digits: Tuple[int, ...]
    translate: Fraction = Fraction(0)
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        digits = tuple(sorted(set(int(d) for d in self.digits)))
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "translate", as_rational(self.translate))
        object.__setattr__(self, "scale", as_rational(self.scale))
        if self.base < 2:
            raise ValueError("base must be at least 2")
        if not digits:
            raise ValueError("digit set must be nonempty")
        if digits[0] < 0 or digits[-1] >= self.base:
            raise ValueError(f"digits must lie in 0..{self.base - 1}")
        if len(digits) == self.base:
            raise ValueError("full digit set gives an interval, not a Cantor set")
        if self.scale <= 0:
            raise ValueError("scale must be positive")

    @property
    def card(self) -> int:
        return len(self.digits)

    @property
    def unit_hull(self) -> Tuple[Fraction, Fraction]:
        b1 = self.base - 1
        return Fraction(self.digits[0], b1), Fraction(self.digits[-1], b1)

    @property
    def hull(self) -> Interval:
        lo, hi = self.unit_hull
        return Interval.closed(self.translate + self.scale * lo, self.translate + self.scale * hi)

    @property
    def diameter(self) -> Fraction:
        return self.hull.length

    def _lefts(self, depth: int, part_budget: int) -> List[int]:
        count = self.card ** depth
        if count > part_budget:
            raise BudgetExceeded(f"{count} parts at depth {depth} exceeds budget {part_budget}")
        lefts = [0]
        for _ in range(depth):
            lefts = [l * self.base + d for l in lefts for d in self.digits]
        return lefts

    def cover(self, depth: int, part_budget: int = DEFAULT_PART_BUDGET) -> CoverApprox:
        return cover_at_depth(self, depth, part_budget)

    def points(self, depth: int, part_budget: int = DEFAULT_PART_BUDGET) -> List[Fraction]:
        """Points known to lie in the set: endpoints of the depth-``depth`` cylinder hulls."""
        return list(cover_at_depth(self, depth, part_budget).endpoints)

    def inner(self, depth: int, part_budget: int = DEFAULT_PART_BUDGET) -> IntervalUnion:
        return IntervalUnion(tuple(Interval.point(x) for x in self.points(depth, part_budget)))

    def to_json(self) -> dict:
        from .intervals import format_rational

        return {
            "kind": "digit",
            "base": self.base,
            "digits": list(self.digits),
            "translate": format_rational(self.translate),
            "scale": format_rational(self.scale),
            "ambient": self.hull.to_json(),
        }


@dataclass(frozen=True)
class _DigitCover(CoverApprox):
    endpoints: Tuple[Fraction, ...] = ()


def cover_at_depth(spec: DigitCantorSpec, n: int, part_budget: int = DEFAULT_PART_BUDGET) -> CoverApprox:
    """Exact outer cover by the convex hulls of the ``|J|**n`` depth-``n`` cylinders.

    Each hull has both endpoints in the set and length ``diameter * b**-n``.
    """
    if n < 0:
        raise ValueError("depth must be non-negative")
    lefts = spec._lefts(n, part_budget)
    bn = spec.base ** n
    b1 = spec.base - 1
    # cylinder hull in unit coordinates: [L/b^n + minJ/((b-1) b^n), L/b^n + maxJ/((b-1) b^n)]
    den = bn * b1
    dmin, dmax = spec.digits[0], spec.digits[-1]
    t, s = spec.translate, spec.scale
    parts = []
    ends = []
    for left in lefts:
        lo = t + s * Fraction(left * b1 + dmin, den)
        hi = t + s * Fraction(left * b1 + dmax, den)
        parts.append(Interval.closed(lo, hi))
        ends.append(lo)
        ends.append(hi)
    part_length = spec.diameter / bn
    return _DigitCover(n, normalize(parts), len(lefts), part_length, tuple(sorted(set(ends))))


@dataclass(frozen=True)
class FiniteK:
    """A finite interval union used as the ``K`` side; its cover is itself at every depth."""

    union: IntervalUnion

    @property
    def hull(self) -> Interval:
        h = self.union.hull()
        if h is None:
            raise DomainError("empty K")
        return h.closure()

    @property
    def diameter(self) -> Fraction:
        return self.union.diameter

    def cover(self, depth: int = 0, part_budget: int = DEFAULT_PART_BUDGET) -> CoverApprox:
        return CoverApprox(depth, self.union, len(self.union), max((p.length for p in self.union), default=Fraction(0)))

    def inner(self, depth: int = 0, part_budget: int = DEFAULT_PART_BUDGET) -> IntervalUnion:
        return self.union

    def scaled(self, lam) -> "FiniteK":
        return FiniteK(self.union.scale(lam))


# ------------------------------------------------------------------ dimension


@dataclass(frozen=True)
class Dimension:
    card: int
    base: int
    enclosure: Enclosure
    exact: Optional[Fraction]
    degenerate: bool = False

    @property
    def lo(self) -> Fraction:
        return self.enclosure[0]

    @property
    def hi(self) -> Fraction:
        return self.enclosure[1]

    def as_exponent(self):
        """Exact Fraction if known, else the enclosure pair (accepted by ``pow_enclosure``)."""
        return self.exact if self.exact is not None else self.enclosure


def dimension(spec: DigitCantorSpec, precision: int = DEFAULT_PRECISION) -> Dimension:
    """``log|J| / log b``, exactly when rational, otherwise as a dyadic enclosure."""
    if spec.card == 1:
        return Dimension(1, spec.base, (Fraction(0), Fraction(0)), Fraction(0), degenerate=True)
    enc = log_ratio_enclosure(spec.card, spec.base, precision)
    exact = enc[0] if enc[0] == enc[1] else None
    return Dimension(spec.card, spec.base, enc, exact)


# --------------------------------------------------------- box fuzzy measure


@dataclass(frozen=True)
class FuzzyMeasureCert:
    d_lo: Fraction
    d_hi: Fraction
    ck_lower: Fraction
    ck_upper: Fraction
    scales_examined: Tuple[Fraction, ...] = ()
    samples: Tuple[Tuple[Fraction, int, Fraction, Fraction], ...] = ()  # (eps, N_lower, lower value, upper value)

    @property
    def d(self):
        return self.d_lo if self.d_lo == self.d_hi else (self.d_lo, self.d_hi)

    def scaled(self, lam, precision: int = DEFAULT_PRECISION) -> "FuzzyMeasureCert":
        """Certificate for ``lam * K``: both bounds pick up a factor ``lam**d``."""
        lam = as_rational(lam)
        if lam <= 0:
            raise DomainError("scale factor must be positive")
        lo, hi = pow_enclosure(lam, self.d, precision)
        return replace(
            self,
            ck_lower=self.ck_lower * lo,
            ck_upper=self.ck_upper * hi,
            scales_examined=tuple(e * lam for e in self.scales_examined),
            samples=(),
        )


def _default_ck_depth(spec: DigitCantorSpec, subdivisions: int, part_budget: int) -> int:
    need = 1 + math.ceil(math.log(subdivisions, spec.base)) + 2
    depth = need
    while depth > 0 and spec.card ** depth > part_budget:
        depth -= 1
    return depth


def ck_upper_bound(
    spec,
    subdivisions: int = 64,
    depth: Optional[int] = None,
    lower_levels: int = 8,
    precision: int = DEFAULT_PRECISION,
    part_budget: int = 1 << 16,
) -> FuzzyMeasureCert:
    """Certified bracket ``[ck_lower, ck_upper]`` of the box fuzzy measure.

    Upper side: for a self-similar set with ``|J| = b**d`` the count satisfies
    ``N(eps/b) <= |J| N(eps)``, so ``N(eps) eps**d`` on ``(diam/b, diam]``
    dominates every smaller scale. That period is cut into ``subdivisions``
    cells; on a cell ``(e0, e1]`` an open cover of diameter ``eps`` is at most
    ``N_cover(e0)`` intervals, where ``N_cover`` counts closed ``e0``-intervals
    covering an outer cover of the set. Lower side: greedy counts of points known
    to lie in the set, at the construction scales ``diam * b**-k``.
    """
    if isinstance(spec, GapCantor) or isinstance(spec, FiniteK):
        raise UncertifiableError("box fuzzy measure is only certified for self-similar digit sets")
    if not isinstance(spec, DigitCantorSpec):
        raise TypeError(f"unsupported set {type(spec).__name__}")
    dim = dimension(spec, precision)
    d = dim.as_exponent()
    diam = spec.diameter
    if dim.degenerate:
        one = Fraction(1)
        return FuzzyMeasureCert(Fraction(0), Fraction(0), one, one, (diam,))
    b = spec.base
    if depth is None:
        depth = _default_ck_depth(spec, subdivisions, part_budget)
    cov = cover_at_depth(spec, depth, part_budget).cover
    start = diam / b
    step = (diam - start) / subdivisions
    upper = Fraction(0)
    grid = [start + i * step for i in range(subdivisions + 1)]
    for e0, e1 in zip(grid, grid[1:]):
        n = min_cover_count(cov, e0)
        val = n * pow_enclosure(e1, d, precision)[1]
        upper = max(upper, val)

    pts_depth = min(depth, lower_levels + 1)
    pts = cover_at_depth(spec, pts_depth, part_budget).endpoints
    pts_union = IntervalUnion(tuple(Interval.point(x) for x in pts))
    lower = Fraction(0)
    scales = []
    samples = []
    for k in range(0, min(lower_levels, pts_depth) + 1):
        eps = diam / b ** k
        n_low = min_cover_count(pts_union, eps)
        enc = pow_enclosure(eps, d, precision)
        lo_val = n_low * enc[0]
        hi_val = min_cover_count(cov, eps) * enc[1]
        lower = max(lower, lo_val)
        scales.append(eps)
        samples.append((eps, n_low, lo_val, hi_val))
    # the construction-scale values are part of the sweep above, but the cover
    # count at an exact scale can exceed the cell bound only through rounding
    upper = max(upper, max(s[3] for s in samples))
    return FuzzyMeasureCert(dim.lo, dim.hi, lower, upper, tuple(scales), tuple(samples))


# ------------------------------------------------------------------- scaling


def scale_set(obj, lam):
    """``lam * obj`` for digit specs, gap sets, finite K and fuzzy-measure certificates."""
    lam = as_rational(lam)
    if lam <= 0:
        raise DomainError("scale factor must be positive")
    if isinstance(obj, DigitCantorSpec):
        return replace(obj, translate=obj.translate * lam, scale=obj.scale * lam)
    if isinstance(obj, GapCantor):
        return scale_gapset(obj, lam)
    if isinstance(obj, FiniteK):
        return obj.scaled(lam)
    if isinstance(obj, FuzzyMeasureCert):
        return obj.scaled(lam)
    raise TypeError(f"cannot scale {type(obj).__name__}")


def translate_set(obj, t):
    t = as_rational(t)
    if isinstance(obj, DigitCantorSpec):
        return replace(obj, translate=obj.translate + t)
    if isinstance(obj, FiniteK):
        return FiniteK(obj.union.translate(t))
    raise TypeError(f"cannot translate {type(obj).__name__}")


def digit_cantor(base: int, digits: Iterable[int], translate=0, scale=1) -> DigitCantorSpec:
    return DigitCantorSpec(base, tuple(digits), as_rational(translate), as_rational(scale))


def normalized_to_unit_diameter(spec: DigitCantorSpec) -> DigitCantorSpec:
    """Affine copy with hull ``[0, 1]``."""
    hull = spec.hull
    lam = 1 / hull.length
    return replace(spec, translate=(spec.translate - hull.lo) * lam, scale=spec.scale * lam)
