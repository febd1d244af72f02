"""Decimal-grid gap sets: the deterministic grid counterexample and its
randomised counterpart, plus the periodic complement estimate for digit sets."""
from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from ..intervals import Interval, as_rational
from ..model import DigitCantorSpec, GapCantor, GapTail, dimension
from ..rounding import DEFAULT_PRECISION, eval_enclosure
from .gallery import ConstructionError

DEFAULT_GAP_BUDGET = 2_000_000


def grid_exponent(i: int, p: Fraction) -> int:
    """``j = floor(i / p)``: gaps at grid level ``i`` have length ``10**-j``."""
    return math.floor(Fraction(i) / as_rational(p))


def _check_p(p) -> Fraction:
    p = as_rational(p)
    if not 0 < p < 1:
        raise ConstructionError("p must lie in (0, 1)")
    return p


def _grid_tail(p: Fraction, after: int) -> GapTail:
    # sum_{i>after} 10^i 10^(-floor(i/p) q) <= 10^q sum_{i>after} 10^(i (1 - q/p))
    def power_sum(q, precision: int = DEFAULT_PRECISION) -> Fraction:
        q_lo = q[0] if isinstance(q, tuple) else as_rational(q)
        if q_lo <= p:
            raise ValueError("tail series diverges for exponents <= p")

        def f(iv, qq):
            r = iv.mpf(10) ** (1 - qq / (iv.mpf(p.numerator) / p.denominator))
            return iv.mpf(10) ** qq * r ** (after + 1) / (1 - r)

        return eval_enclosure(f, q, precision=precision)[1]

    return GapTail(after, Fraction(1, 10 ** grid_exponent(after + 1, p)), power_sum)


def counterexample_kp(p, n_start: int, i_max: int, gap_budget: int = DEFAULT_GAP_BUDGET) -> GapCantor:
    """``[0, 1]`` minus ``U_iq = q/10**i + (0, 10**-floor(i/p))``, ``n_start <= i <= i_max``.

    The raw gap list keeps nested and overlapping intervals; level
    ``i - n_start + 1`` holds grid level ``i``.
    """
    p = _check_p(p)
    if n_start < 1:
        raise ConstructionError("n_start must be at least 1")
    total = sum(10 ** i for i in range(n_start, i_max + 1))
    if total > gap_budget:
        raise ConstructionError(f"{total} gaps exceed the gap budget {gap_budget}")

    def source():
        for i in range(n_start, i_max + 1):
            w = Fraction(1, 10 ** grid_exponent(i, p))
            den = 10 ** i
            yield [Interval.open(Fraction(q, den), Fraction(q, den) + w) for q in range(den)]

    meta = {"construction": "counterexample_kp", "p": str(p), "n_start": n_start, "i_max": i_max}
    tail = _grid_tail(p, max(i_max, n_start - 1))
    return GapCantor(Interval.closed(0, 1), source, meta, tail)


def removed_measure_union_bound(p, n_start: int, i_max: Optional[int] = None, precision: int = DEFAULT_PRECISION) -> Fraction:
    """Upper bound ``sum_i 10**i 10**-floor(i/p)`` on the removed length (exact when finite)."""
    p = _check_p(p)
    if i_max is not None:
        return sum((Fraction(10 ** i, 10 ** grid_exponent(i, p)) for i in range(n_start, i_max + 1)), Fraction(0))
    return _grid_tail(p, n_start - 1).power_sum(Fraction(1), precision)


def complement_series_bound(p, d, n_start: int, i_max: Optional[int] = None, precision: int = DEFAULT_PRECISION):
    """Enclosure of ``4 sum_{i=n_start}^{i_max} 10**((d - 1)(floor(i/p) - i))``.

    With ``i_max=None`` the infinite series is bounded: terms up to
    ``n_start + 400`` are summed and the rest is dominated by a geometric tail
    using ``floor(i/p) - i >= i (1/p - 1) - 1``.
    """
    p = _check_p(p)
    finite = i_max is not None
    last = i_max if finite else n_start + 400
    exps = [grid_exponent(i, p) - i for i in range(n_start, last + 1)]

    def f(iv, dd):
        total = iv.mpf(0)
        for e in exps:
            total += iv.mpf(10) ** ((dd - 1) * e)
        if not finite:
            pp = iv.mpf(p.numerator) / p.denominator
            r = iv.mpf(10) ** ((dd - 1) * (1 / pp - 1))
            total += iv.mpf(10) ** (1 - dd) * r ** (last + 1) / (1 - r)
        return 4 * total

    return eval_enclosure(f, d, precision=precision)


def counterexample_n_start(p, d_up, target=Fraction(1, 10), precision: int = DEFAULT_PRECISION) -> int:
    """Smallest ``n_start`` whose infinite complement series bound is below ``target``."""
    target = as_rational(target)
    n = 1
    while complement_series_bound(p, d_up, n, None, precision)[1] >= target:
        n += 1
        if n > 10_000:
            raise ConstructionError("no n_start found below 10000")
    return n


# -------------------------------------------- periodic complement estimate


@dataclass(frozen=True)
class LevelMeasure:
    i: int
    j: int
    cover_depth: int
    measure: Fraction  # measure of the level-i removed translations inside [0, 1)


def _circle_union_measure(starts: np.ndarray, length: int, period: int) -> int:
    """Measure of the union of ``[s, s + length)`` taken mod ``period`` (integers)."""
    if length >= period:
        return period
    s = np.mod(starts, period)
    ends = s + length
    wrap = ends > period
    lo = np.concatenate([s, np.zeros(int(wrap.sum()), dtype=np.int64)])
    hi = np.concatenate([np.minimum(ends, period), ends[wrap] - period])
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    run_hi = np.maximum.accumulate(hi)
    prev = np.concatenate([[np.int64(-1)], run_hi[:-1]])
    # contribution of each interval beyond everything to its left
    contrib = np.where(hi > prev, hi - np.maximum(lo, prev), 0)
    return int(contrib.sum())


def periodic_level_measure(K_unit: DigitCantorSpec, i: int, j: int, cover_depth: Optional[int] = None,
                           max_parts: int = 1 << 22) -> LevelMeasure:
    """Measure in ``[0, 1)`` of ``union_q (q/10**i - K) + (0, 10**-j)`` with ``K`` replaced by a cover.

    ``K = K_unit / 10`` where ``K_unit`` is a base-10 digit set with no affine
    map, so every ``k`` in ``K`` satisfies ``k mod 10**-i = 10**-i * k'`` with
    ``k'`` in ``K_unit``. The level-``i`` set is therefore contained in a
    ``10**-i``-periodic pattern whose period is a scaled copy of
    ``(-K_unit + (0, 10**(i-j))) mod 1``; the returned value is the measure of
    that pattern on ``[0, 1)`` with ``K_unit`` replaced by its depth-``c``
    cover, ``c = j - i`` unless capped by ``cover_depth``. All arithmetic is
    on integers after scaling by ``9 * 10**c``.
    """
    if K_unit.base != 10 or K_unit.translate != 0 or K_unit.scale != 1:
        raise ConstructionError("periodic estimate needs a plain base-10 digit set")
    c = j - i if cover_depth is None else min(cover_depth, j - i)
    c = max(c, 0)
    while c > 0 and K_unit.card ** c > max_parts:
        c -= 1
    # cover part (scaled by 9*10^c): [9L + dmin, 9L + dmax]; gap width 9*10^(c - (j - i))
    lefts = np.zeros(1, dtype=np.int64)
    digits = np.array(K_unit.digits, dtype=np.int64)
    for _ in range(c):
        lefts = (lefts[:, None] * 10 + digits[None, :]).ravel()
    dmin, dmax = K_unit.digits[0], K_unit.digits[-1]
    period = 9 * 10 ** c
    gap_scaled = Fraction(9 * 10 ** c, 10 ** (j - i))
    # -part + (0, w) = (-9L - dmax, -9L - dmin + w); w may be fractional only when c < j - i
    if gap_scaled.denominator != 1 and period * gap_scaled.denominator < 1 << 60:
        # refine the grid so every endpoint stays an integer
        refine = gap_scaled.denominator
        period *= refine
        starts = (-9 * lefts - dmax) * refine
        length = (dmax - dmin) * refine + gap_scaled.numerator
    else:
        starts = -9 * lefts - dmax
        # rounding the gap width up only enlarges the pattern
        length = (dmax - dmin) + math.ceil(gap_scaled)
    covered = _circle_union_measure(starts, int(length), int(period))
    return LevelMeasure(i, j, c, Fraction(covered, period))


@dataclass(frozen=True)
class CounterexampleEstimate:
    p: Fraction
    n_start: int
    i_max: int
    levels: Tuple[LevelMeasure, ...]
    complement_upper: Fraction  # union bound over levels
    series_bound: Tuple[Fraction, Fraction]  # enclosure of 4 sum 10^((d_up - 1)(floor(i/p) - i))
    base_measure: Fraction
    x_inner_lower: Fraction  # measure(base) - complement_upper


def counterexample_estimate(p, n_start: int, i_max: int, K_unit: Optional[DigitCantorSpec] = None,
                            cover_depth: Optional[int] = None, precision: int = DEFAULT_PRECISION) -> CounterexampleEstimate:
    """Certified bounds on the removed translations for ``K = K_unit / 10`` inside the grid counterexample.

    ``complement_upper`` bounds the measure of ``base \\ X`` for the finite
    construction ``n_start <= i <= i_max`` (it is a union bound of exact
    per-level measures), so ``x_inner_lower`` bounds both the inner and outer
    approximations of ``X`` from below.
    """
    p = _check_p(p)
    if K_unit is None:
        K_unit = DigitCantorSpec(10, (0, 2, 4, 6, 8))
    d_up = dimension(K_unit, precision).hi
    levels = []
    for i in range(n_start, i_max + 1):
        levels.append(periodic_level_measure(K_unit, i, grid_exponent(i, p), cover_depth))
    total = sum((lv.measure for lv in levels), Fraction(0))
    # K = K_unit / 10 sits in [k0, k0 + diam]; base = [-k0, 1 - k0 - diam]
    lo_u, hi_u = K_unit.unit_hull
    diam_K = (hi_u - lo_u) / 10
    base_measure = 1 - diam_K
    series = complement_series_bound(p, d_up, n_start, i_max, precision) if i_max >= n_start else (Fraction(0), Fraction(0))
    return CounterexampleEstimate(p, n_start, i_max, tuple(levels), total, series, base_measure, base_measure - total)


# ------------------------------------------------------------- random sets


@dataclass(frozen=True)
class RandomSeed:
    """64-bit seed plus a hierarchical stream path; draws are platform independent."""

    seed: int
    stream: Tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "stream", tuple(int(s) for s in self.stream))

    def child(self, *path: int) -> "RandomSeed":
        return RandomSeed(self.seed, self.stream + tuple(path))

    def draw_bits(self, index: Sequence[int], bits: int) -> int:
        """``bits`` uniform bits for the draw at ``stream + index`` (blake2b counter mode)."""
        path = self.stream + tuple(index)
        msg = struct.pack(f"<Q{len(path)}q", self.seed, *path)
        out = b""
        counter = 0
        while len(out) * 8 < bits:
            out += hashlib.blake2b(msg + struct.pack("<I", counter), digest_size=64).digest()
            counter += 1
        return int.from_bytes(out, "little") >> (len(out) * 8 - bits)

    def dyadic(self, index: Sequence[int], resolution: int) -> Fraction:
        return Fraction(self.draw_bits(index, resolution), 1 << resolution)


def random_kp(p, i_range: Tuple[int, int], seed: RandomSeed, resolution: int = 53,
              gap_budget: int = DEFAULT_GAP_BUDGET) -> GapCantor:
    """``[0, 1]`` minus ``u_ik + (0, 10**-floor(i/p))`` with dyadic ``u_ik`` drawn from ``seed``.

    Gaps are open and clipped to ``[0, 1]``; level ``i - i0 + 1`` holds grid
    level ``i``. An empty range (``i1 < i0``) leaves ``[0, 1]`` intact.
    """
    p = as_rational(p)
    if p <= 0:
        raise ConstructionError("p must be positive")
    if resolution < 1:
        raise ConstructionError("resolution must be positive")
    i0, i1 = i_range
    total = sum(10 ** i for i in range(i0, i1 + 1))
    if total > gap_budget:
        raise ConstructionError(f"{total} gaps exceed the gap budget {gap_budget}")

    def source():
        for i in range(i0, i1 + 1):
            w = Fraction(1, 10 ** grid_exponent(i, p))
            gaps = []
            for k in range(10 ** i):
                u = seed.dyadic((i, k), resolution)
                hi = min(u + w, Fraction(1))
                if hi > u:
                    gaps.append(Interval.open(u, hi))
            yield gaps

    meta = {"construction": "random_kp", "p": str(p), "i_range": [i0, i1],
            "seed": seed.seed, "stream": list(seed.stream), "resolution": resolution}
    return GapCantor(Interval.closed(0, 1), source, meta)


def random_kp_removed_bound(p, i_range: Tuple[int, int]) -> Fraction:
    """Union bound ``sum_i 10**i 10**-floor(i/p)`` on the removed length."""
    p = as_rational(p)
    i0, i1 = i_range
    return sum((Fraction(10 ** i, 10 ** grid_exponent(i, p)) for i in range(i0, i1 + 1)), Fraction(0))
