"""Translation nesting: gap-exponent analysis, the dimension/gap lower bound on
the admissible translation set, and the exact inner/outer oracle for that set.

For ``K`` with hull ``[k0, k0 + diam K]`` and a gap set with ambient
``[a, a + D]``, the admissible translations ``X = {t : t + K in K~}`` live in
``base = [a - k0, a + D - k0 - diam K]`` and

    base \\ X = union over gaps g of (g - K) intersected with base.

Replacing ``K`` by an outer cover gives a subset of ``X`` (``x_inner``);
replacing it by finitely many points of ``K`` gives a superset (``x_outer``).
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .intervals import (
    Interval,
    IntervalUnion,
    as_rational,
    complement_in,
    format_rational,
    make_interval,
    minkowski_diff,
    normalize,
)
from .model import (
    Budget,
    DigitCantorSpec,
    FiniteK,
    FuzzyMeasureCert,
    GapCantor,
    UncertifiableError,
    ck_upper_bound,
    normalized_to_unit_diameter,
    scale_set,
    take_gaps,
)
from .rounding import DEFAULT_PRECISION, pow_enclosure, snap_outward

SCHEMA = "cantor-nest/1"

CONVERGING = "converging-evidence"
DIVERGING = "diverging-evidence"
INCONCLUSIVE = "inconclusive"

CERTIFIED_POSITIVE = "certified-positive"
INDETERMINATE = "indeterminate"
CERTIFIED_VIOLATION = "certified-violation"


# ----------------------------------------------------------------- (C_p) sums


@dataclass(frozen=True)
class CpReport:
    p: Fraction
    partial_sums: Tuple[Tuple[int, Fraction], ...]
    verdict: str
    complete: bool = True
    tail_sum_upper: Optional[Fraction] = None

    @property
    def total(self) -> Fraction:
        return self.partial_sums[-1][1] if self.partial_sums else Fraction(0)

    @property
    def total_with_tail(self) -> Optional[Fraction]:
        if self.tail_sum_upper is None:
            return None
        return self.total + self.tail_sum_upper

    def to_json(self) -> dict:
        return {
            "p": format_rational(self.p),
            "partial_sums": [[lvl, format_rational(s)] for lvl, s in self.partial_sums],
            "total": format_rational(self.total),
            "total_with_tail": None if self.total_with_tail is None else format_rational(self.total_with_tail),
            "verdict": self.verdict,
            "complete": self.complete,
        }


def _power_sum_upper(lengths: Counter, p, precision: int) -> Fraction:
    total = Fraction(0)
    for length, count in lengths.items():
        total += count * pow_enclosure(length, p, precision)[1]
    return total


def _power_sum_lower(lengths: Counter, p, precision: int) -> Fraction:
    total = Fraction(0)
    for length, count in lengths.items():
        total += count * pow_enclosure(length, p, precision)[0]
    return total


def _tail_ratio_verdict(increments: Sequence[Fraction]) -> str:
    # advisory only: look at the last three level-to-level ratios
    nonzero = [x for x in increments if x > 0]
    if len(nonzero) < 4:
        return INCONCLUSIVE
    last = nonzero[-4:]
    ratios = [float(b / a) for a, b in zip(last, last[1:])]
    if all(r < 0.95 for r in ratios):
        return CONVERGING
    if all(r >= 1.0 for r in ratios):
        return DIVERGING
    return INCONCLUSIVE


def cp_partial_sum(gc: GapCantor, p, budget: Budget = Budget(), precision: int = DEFAULT_PRECISION) -> CpReport:
    """Upper-rounded partial sums of ``sum l_n**p`` level by level."""
    p = as_rational(p)
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    taken, complete = take_gaps(gc, budget)
    per_level: dict = {}
    for level, g in taken:
        per_level.setdefault(level, Counter())[g.length] += 1
    sums = []
    increments = []
    running = Fraction(0)
    for level in sorted(per_level):
        inc = _power_sum_upper(per_level[level], p, precision)
        running += inc
        increments.append(inc)
        sums.append((level, running))
    tail = None
    verdict = _tail_ratio_verdict(increments)
    if complete and gc.tail is not None:
        if p == 1 and gc.tail.exact_length_sum is not None:
            tail = gc.tail.exact_length_sum
        else:
            try:
                tail = gc.tail.power_sum(p, precision)
            except ValueError:
                # the closed-form tail series itself diverges at this p
                verdict = DIVERGING
    return CpReport(p, tuple(sums), verdict, complete, tail)


# ------------------------------------------------------------- P estimation


@dataclass(frozen=True)
class PEstimate:
    lo: Fraction
    hi: Fraction
    method: str
    sample_size: int
    inconclusive: bool = False

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x) -> bool:
        x = as_rational(x)
        return self.lo <= x <= self.hi

    def to_json(self) -> dict:
        return {
            "p_hat": [format_rational(self.lo), format_rational(self.hi)],
            "p_hat_float": [float(self.lo), float(self.hi)],
            "method": self.method,
            "sample_size": self.sample_size,
            "inconclusive": self.inconclusive,
        }


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


MIN_GAPS_FOR_P = 32


SORTED_GAP = "sorted-gap"
CLASS_RATIO = "class-ratio"


def _complete_histogram(gc: GapCantor, budget: Budget) -> Tuple[Counter, Optional[Fraction]]:
    """Histogram restricted to lengths known to be fully enumerated."""
    hist = gc.length_histogram(budget)
    cut = gc.meta.get("complete_above")
    if cut is None:
        return hist, None
    cut = as_rational(cut)
    return Counter({l: c for l, c in hist.items() if l > cut}), cut


def estimate_P(gc: GapCantor, budget: Budget = Budget(), precision: int = 32, method: str = SORTED_GAP) -> PEstimate:
    """Exponent of convergence of the gap lengths.

    ``sorted-gap`` (default): with lengths sorted decreasingly the statistic is
    ``log n / -log l_(n)``, evaluated for every rank ``n`` in the top quarter of
    the log-rank range (``n_max**(3/4) <= n <= n_max``); the enclosure is its
    min/max there, clipped to ``[0, 1]``. Ties are handled group-wise since the
    extremes of each equal-length block sit at its end ranks.

    ``class-ratio``: for consecutive length classes ``l_k > l_{k+1}`` with
    multiplicities ``c_k``, the exponent at which the two classes contribute
    equally to ``sum l**p``, i.e. ``log(c_{k+1}/c_k) / log(l_k/l_{k+1})``, taken
    over the same tail. It is insensitive to a constant factor in the rank
    count but noisy when class sizes are irregular.

    When the gap set declares ``complete_above`` in its metadata, shorter
    classes (possibly missing gaps from unexpanded cylinders) are ignored.
    """
    if method not in (SORTED_GAP, CLASS_RATIO):
        raise ValueError(f"unknown method {method!r}")
    hist, cut = _complete_histogram(gc, budget)
    total = sum(hist.values())
    label = "sorted-gap exponent of convergence" if method == SORTED_GAP else "length-class ratio test"
    if cut is not None:
        label += f" (classes longer than {format_rational(cut)})"
    if total < MIN_GAPS_FOR_P:
        return PEstimate(Fraction(0), Fraction(0), label, total, inconclusive=True)
    groups = sorted(hist.items(), key=lambda kv: kv[0], reverse=True)
    n_lo = max(2, math.ceil(total ** 0.75))
    values: List[float] = []
    start = 1
    prev = None
    for length, count in groups:
        end = start + count - 1
        if end >= n_lo and length < 1:
            if method == SORTED_GAP:
                denom = -_log(length)
                values.extend(math.log(n) / denom for n in (max(start, n_lo), end))
            elif prev is not None:
                values.append(math.log(count / prev[1]) / (_log(prev[0]) - _log(length)))
        prev = (length, count)
        start = end + 1
    if not values:
        return PEstimate(Fraction(0), Fraction(0), label, total, inconclusive=True)
    slack = 1e-9
    lo_q, hi_q = snap_outward((Fraction(min(values) - slack), Fraction(max(values) + slack)), precision)
    lo_q = min(max(lo_q, Fraction(0)), Fraction(1))
    hi_q = min(max(hi_q, Fraction(0)), Fraction(1))
    return PEstimate(lo_q, hi_q, label, total)


# -------------------------------------------------------------- main bound


@dataclass
class NestingReport:
    diam_K: Fraction
    diam_Ktilde: Fraction
    big_gap_sum: Optional[Fraction] = None
    small_gap_sum_upper: Optional[Fraction] = None
    small_gap_sum_lower: Optional[Fraction] = None
    theo1_bound: Optional[Fraction] = None
    theo1_bound_upper: Optional[Fraction] = None
    base: Optional[Interval] = None
    x_inner: Optional[IntervalUnion] = None
    x_outer: Optional[IntervalUnion] = None
    depth_used: Optional[int] = None
    gaps_used: int = 0
    gaps_complete: bool = True
    tail_status: str = "complete"
    ck_upper: Optional[Fraction] = None
    ck_lower: Optional[Fraction] = None
    d_enclosure: Optional[Tuple[Fraction, Fraction]] = None
    notes: List[str] = field(default_factory=list)

    @property
    def measure_inner(self) -> Optional[Fraction]:
        return None if self.x_inner is None else self.x_inner.measure

    @property
    def measure_outer(self) -> Optional[Fraction]:
        return None if self.x_outer is None else self.x_outer.measure

    @property
    def certified_set(self) -> bool:
        """True when the gap list used is the whole gap set (no truncated tail)."""
        return self.gaps_complete and self.tail_status == "complete"

    @property
    def verdict(self) -> str:
        if self.theo1_bound is not None and self.theo1_bound > 0 and self.tail_status in ("complete", "tail-included"):
            return CERTIFIED_POSITIVE
        if self.certified_set and self.measure_inner is not None and self.measure_inner > 0:
            return CERTIFIED_POSITIVE
        if self.theo1_bound_upper is not None and self.theo1_bound_upper <= 0:
            return CERTIFIED_VIOLATION
        return INDETERMINATE

    def to_json(self) -> dict:
        def q(x):
            return None if x is None else format_rational(x)

        def fl(x):
            return None if x is None else float(x)

        return {
            "schema": SCHEMA,
            "diam_K": q(self.diam_K),
            "diam_Ktilde": q(self.diam_Ktilde),
            "big_gap_sum": q(self.big_gap_sum),
            "small_gap_sum_upper": q(self.small_gap_sum_upper),
            "small_gap_sum_lower": q(self.small_gap_sum_lower),
            "theo1_bound": q(self.theo1_bound),
            "theo1_bound_float": fl(self.theo1_bound),
            "theo1_bound_upper": q(self.theo1_bound_upper),
            "ck_lower": q(self.ck_lower),
            "ck_upper": q(self.ck_upper),
            "d_enclosure": None if self.d_enclosure is None else [q(self.d_enclosure[0]), q(self.d_enclosure[1])],
            "base": None if self.base is None else self.base.to_json(),
            "x_inner": None if self.x_inner is None else self.x_inner.to_json(),
            "x_outer": None if self.x_outer is None else self.x_outer.to_json(),
            "measure_inner": q(self.measure_inner),
            "measure_outer": q(self.measure_outer),
            "measure_inner_float": fl(self.measure_inner),
            "measure_outer_float": fl(self.measure_outer),
            "depth_used": self.depth_used,
            "gaps_used": self.gaps_used,
            "gaps_complete": self.gaps_complete,
            "tail_status": self.tail_status,
            "verdict": self.verdict,
            "notes": list(self.notes),
        }


def _one_minus(d_lo: Fraction, d_hi: Fraction):
    if d_lo == d_hi:
        return 1 - d_lo
    return (1 - d_hi, 1 - d_lo)


def _certificate_for(K, cert: Optional[FuzzyMeasureCert], precision: int) -> FuzzyMeasureCert:
    if cert is not None:
        return cert
    if isinstance(K, DigitCantorSpec):
        return ck_upper_bound(K, precision=precision)
    raise UncertifiableError("no certified box fuzzy measure available for this K")


def theo1_lower_bound(
    K,
    gc: GapCantor,
    budget: Budget = Budget(),
    cert: Optional[FuzzyMeasureCert] = None,
    include_tail: bool = True,
    precision: int = DEFAULT_PRECISION,
) -> NestingReport:
    """Signed lower bound ``diam K~ - diam K - big-gap sum - small-gap sum`` on Leb(X).

    Big gaps (longer than ``diam K``) contribute ``diam K + l``; small gaps
    contribute ``2 C_K l**(1-d)`` with ``C_K`` and the power rounded up. A
    second, upper-rounded evaluation (``theo1_bound_upper``) uses the lower
    certificate so that a non-positive value certifies that the inequality
    fails. Negative values are reported as is.
    """
    cert = _certificate_for(K, cert, precision)
    diam_k = K.diameter
    diam_kt = gc.diameter
    taken, complete = take_gaps(gc, budget)
    big = Fraction(0)
    small = Counter()
    for _, g in taken:
        if g.length > diam_k:
            big += diam_k + g.length
        else:
            small[g.length] += 1
    expo = _one_minus(cert.d_lo, cert.d_hi)
    small_up = _power_sum_upper(small, expo, precision)
    small_low = _power_sum_lower(small, expo, precision)

    tail_status = "complete"
    notes = []
    if gc.tail is not None:
        usable = include_tail and complete and gc.tail.max_length <= diam_k
        if usable:
            p_for_upper = expo[0] if isinstance(expo, tuple) else expo
            small_up += gc.tail.power_sum(p_for_upper, precision)
            tail_status = "tail-included"
            notes.append(f"infinite tail after level {gc.tail.after_level} bounded in closed form")
        else:
            tail_status = "truncated"
            notes.append("gap tail not included: bound covers the enumerated gaps only")
    elif not complete:
        tail_status = "truncated"
        notes.append("gap budget cut the enumeration: bound covers the enumerated gaps only")

    small_sum_upper = 2 * cert.ck_upper * small_up
    small_sum_lower = 2 * cert.ck_lower * small_low
    bound = diam_kt - diam_k - big - small_sum_upper
    bound_upper = diam_kt - diam_k - big - small_sum_lower
    return NestingReport(
        diam_K=diam_k,
        diam_Ktilde=diam_kt,
        big_gap_sum=big,
        small_gap_sum_upper=small_sum_upper,
        small_gap_sum_lower=small_sum_lower,
        theo1_bound=bound,
        theo1_bound_upper=bound_upper,
        gaps_used=len(taken),
        gaps_complete=complete,
        tail_status=tail_status,
        ck_upper=cert.ck_upper,
        ck_lower=cert.ck_lower,
        d_enclosure=(cert.d_lo, cert.d_hi),
        notes=notes,
    )


# ---------------------------------------------------------------- the oracle


def translation_base(K, gc: GapCantor) -> Optional[Interval]:
    """``[a - k0, a + D - k0 - diam K]``; ``None`` when ``K`` is wider than the ambient."""
    hull = K.hull
    return make_interval(gc.ambient.lo - hull.lo, gc.ambient.hi - hull.hi, True, True)


def admissible_complement(gaps: Sequence[Interval], cover, base: Interval) -> IntervalUnion:
    """``(union of g - cover over gaps) intersected with base``.

    With ``cover`` containing ``K`` this contains ``base \\ X``.
    """
    parts = cover.parts if isinstance(cover, IntervalUnion) else getattr(cover, "cover", cover)
    if not isinstance(parts, tuple):
        parts = tuple(parts.parts) if isinstance(parts, IntervalUnion) else tuple(parts)
    if not gaps or not parts:
        return IntervalUnion.empty()
    merged = _integer_minkowski_union(gaps, parts, base)
    if merged is None:
        lo, hi = base.lo, base.hi
        pieces = []
        for g in gaps:
            for c in parts:
                piece = g.minus(c)
                if piece.hi < lo or piece.lo > hi:
                    continue
                pieces.append(piece)
        merged = normalize(pieces)
    return merged.intersection(IntervalUnion((base,)))


_MAX_COMMON_DENOMINATOR = 1 << 512


def _integer_minkowski_union(gaps, parts, base: Interval) -> Optional[IntervalUnion]:
    """Same union as the pairwise loop, computed on a common integer grid.

    Returns ``None`` when the common denominator is too large to be worth it.
    """
    den = base.lo.denominator * base.hi.denominator // math.gcd(base.lo.denominator, base.hi.denominator)
    for iv in itertools.chain(gaps, parts):
        for x in (iv.lo, iv.hi):
            den = den * x.denominator // math.gcd(den, x.denominator)
        if den > _MAX_COMMON_DENOMINATOR:
            return None
    lo, hi = base.lo * den, base.hi * den
    cs = [(int(c.lo * den), int(c.hi * den), c.lo_closed, c.hi_closed) for c in parts]
    pieces = []
    for g in gaps:
        glo, ghi = int(g.lo * den), int(g.hi * den)
        for clo, chi, clc, chc in cs:
            a, b = glo - chi, ghi - clo
            if b < lo or a > hi:
                continue
            # left end closed iff both g.lo and c.hi are; sort key puts closed first
            pieces.append((a, not (g.lo_closed and chc), b, g.hi_closed and clc))
    if not pieces:
        return IntervalUnion.empty()
    pieces.sort()
    merged = []
    a, a_open, b, b_closed = pieces[0]
    for na, na_open, nb, nb_closed in pieces[1:]:
        if na < b or (na == b and (b_closed or not na_open)):
            if (nb, nb_closed) > (b, b_closed):
                b, b_closed = nb, nb_closed
        else:
            merged.append((a, a_open, b, b_closed))
            a, a_open, b, b_closed = na, na_open, nb, nb_closed
    merged.append((a, a_open, b, b_closed))
    return IntervalUnion(tuple(
        Interval(Fraction(x, den), Fraction(y, den), not xo, yc) for x, xo, y, yc in merged
    ))


def x_inner_outer(K, gc: GapCantor, depth: int, gap_budget: Budget = Budget()) -> NestingReport:
    """Certified subset and superset of the admissible translation set."""
    base = translation_base(K, gc)
    taken, complete = take_gaps(gc, gap_budget)
    gaps = [g for _, g in taken]
    report = NestingReport(diam_K=K.diameter, diam_Ktilde=gc.diameter, base=base, depth_used=depth,
                           gaps_used=len(gaps), gaps_complete=complete)
    if gc.tail is not None or not complete:
        report.tail_status = "truncated"
    if base is None:
        report.x_inner = IntervalUnion.empty()
        report.x_outer = IntervalUnion.empty()
        report.notes.append("diam K exceeds diam K~: no admissible translation")
        return report
    base_u = IntervalUnion((base,))
    cover = K.cover(depth).cover
    inner_points = K.inner(depth)
    report.x_inner = complement_in(base, admissible_complement(gaps, cover, base)).intersection(base_u)
    report.x_outer = complement_in(base, admissible_complement(gaps, inner_points, base)).intersection(base_u)
    return report


def nesting_report(
    K,
    gc: GapCantor,
    depth: int,
    gap_budget: Budget = Budget(),
    cert: Optional[FuzzyMeasureCert] = None,
    precision: int = DEFAULT_PRECISION,
    include_tail: bool = True,
) -> NestingReport:
    """Bound fields and oracle fields in a single report."""
    oracle = x_inner_outer(K, gc, depth, gap_budget)
    try:
        bound = theo1_lower_bound(K, gc, gap_budget, cert, include_tail, precision)
    except UncertifiableError as exc:
        oracle.notes.append(f"bound unavailable: {exc}")
        return oracle
    bound.base = oracle.base
    bound.x_inner = oracle.x_inner
    bound.x_outer = oracle.x_outer
    bound.depth_used = depth
    bound.notes.extend(oracle.notes)
    return bound


# ----------------------------------------------------------------- λ scans


@dataclass(frozen=True)
class ScanRow:
    lam: Fraction
    theo1_bound: Fraction
    theo1_bound_upper: Fraction
    measure_inner: Optional[Fraction]
    measure_outer: Optional[Fraction]

    def to_json(self) -> dict:
        def q(x):
            return None if x is None else format_rational(x)

        return {
            "lambda": q(self.lam),
            "theo1_bound": q(self.theo1_bound),
            "theo1_bound_float": float(self.theo1_bound),
            "theo1_bound_upper": q(self.theo1_bound_upper),
            "measure_inner": q(self.measure_inner),
            "measure_outer": q(self.measure_outer),
        }


@dataclass(frozen=True)
class ScanResult:
    rows: Tuple[ScanRow, ...]

    @property
    def largest_positive(self) -> Optional[Fraction]:
        positive = [r.lam for r in self.rows if r.theo1_bound > 0]
        return max(positive) if positive else None


def geometric_grid(first, ratio, count: int) -> List[Fraction]:
    first, ratio = as_rational(first), as_rational(ratio)
    return [first * ratio ** i for i in range(count)]


def lambda_scan(
    spec: DigitCantorSpec,
    gc: GapCantor,
    grid: Sequence,
    budget: Budget = Budget(),
    depth: Optional[int] = None,
    precision: int = DEFAULT_PRECISION,
    cert: Optional[FuzzyMeasureCert] = None,
) -> ScanResult:
    """Evaluate the bound for ``lam * K`` (``K`` rescaled to diameter 1) over ``grid``.

    The certificate is computed once for the unit-diameter set and rescaled by
    ``lam**d``. With ``depth`` given, each row also carries the oracle measures.
    """
    if not grid:
        raise ValueError("empty lambda grid")
    unit = normalized_to_unit_diameter(spec)
    unit_cert = cert if cert is not None else ck_upper_bound(unit, precision=precision)
    rows = []
    for lam in grid:
        lam = as_rational(lam)
        k_lam = scale_set(unit, lam)
        c_lam = unit_cert.scaled(lam, precision)
        b = theo1_lower_bound(k_lam, gc, budget, c_lam, precision=precision)
        m_in = m_out = None
        if depth is not None:
            o = x_inner_outer(k_lam, gc, depth, budget)
            m_in, m_out = o.measure_inner, o.measure_outer
        rows.append(ScanRow(lam, b.theo1_bound, b.theo1_bound_upper, m_in, m_out))
    return ScanResult(tuple(rows))


# --------------------------------------------- interval minus Cantor set


@dataclass(frozen=True)
class IntervalCheck:
    measured: Fraction
    bound: Fraction
    case: str

    @property
    def holds(self) -> bool:
        return self.measured <= self.bound


def interval_minus_cantor_bound_check(
    I: Interval,
    K,
    depth: int,
    cert: Optional[FuzzyMeasureCert] = None,
    precision: int = DEFAULT_PRECISION,
) -> IntervalCheck:
    """Measure of ``I - cover(depth)`` against the two-case bound on ``Leb(I - K)``.

    Small case (``|I| <= diam K``): ``2 C_K |I|**(1-d)`` rounded up. Large case:
    ``|I| + diam K``, exact. The measured value overestimates ``Leb(I - K)``
    because the cover contains ``K``.
    """
    cover = K.cover(depth).cover
    measured = minkowski_diff(IntervalUnion((I,)), cover).measure
    length = I.length
    if length <= K.diameter:
        cert = _certificate_for(K, cert, precision)
        if length == 0:
            return IntervalCheck(measured, Fraction(0), "small")
        expo = _one_minus(cert.d_lo, cert.d_hi)
        bound = 2 * cert.ck_upper * pow_enclosure(length, expo, precision)[1]
        return IntervalCheck(measured, bound, "small")
    return IntervalCheck(measured, length + K.diameter, "large")
