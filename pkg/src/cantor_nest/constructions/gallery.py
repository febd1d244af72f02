"""Deterministic gap sets and covers: centred middle gaps, Diophantine gap sets,
continued-fraction Cantor sets with bounded partial quotients."""
from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import List, Optional, Tuple

from ..intervals import DomainError, Interval, IntervalUnion, as_rational, make_interval, normalize
from ..model import CoverApprox, GapCantor, GapTail, digit_cantor, scale_set
from ..rounding import DEFAULT_PRECISION, eval_enclosure, pow_enclosure


class ConstructionError(ValueError):
    pass


# ------------------------------------------------------------- middle gaps


def _middle_gap_params(s) -> Tuple[int, Fraction]:
    s = as_rational(s)
    if s <= 0 or s.numerator != 1 or s.denominator < 2:
        raise ConstructionError("middle_gap needs s = 1/m with integer m >= 2")
    m = s.denominator
    return m, 1 / (1 - Fraction(2) ** (1 - m))


def middle_gap_length(s, n: int) -> Fraction:
    """Length of each level-``n`` gap: ``2**(-n/s) / (1 - 2**(1 - 1/s))``."""
    m, amp = _middle_gap_params(s)
    return amp * Fraction(1, 2 ** (n * m))


def middle_gap(s, levels: int) -> GapCantor:
    """Levels ``1..levels`` of the centred-gap construction on ``[-1, 1]``.

    Level ``n`` removes an open interval of length
    ``2**(-n/s) / (1 - 2**(1-1/s))`` from the middle of each of the ``2**(n-1)``
    components left by level ``n - 1``. The set carries a closed-form tail
    describing all levels beyond ``levels``.
    """
    m, amp = _middle_gap_params(s)
    if levels < 0:
        raise ConstructionError("levels must be non-negative")
    ambient = Interval.closed(-1, 1)

    # validate once: every gap must be shorter than its parent component
    comp = Fraction(2)
    for n in range(1, levels + 1):
        g = middle_gap_length(s, n)
        if g >= comp:
            raise ConstructionError(f"level {n} gap {g} does not fit in component {comp}")
        comp = (comp - g) / 2

    def source():
        lefts = [Fraction(-1)]
        comp_len = Fraction(2)
        for n in range(1, levels + 1):
            g = middle_gap_length(s, n)
            child = (comp_len - g) / 2
            gaps = []
            new_lefts = []
            for lo in lefts:
                gaps.append(Interval.open(lo + child, lo + child + g))
                new_lefts.append(lo)
                new_lefts.append(lo + child + g)
            yield gaps
            lefts = new_lefts
            comp_len = child

    def histogram():
        return Counter({middle_gap_length(s, n): 2 ** (n - 1) for n in range(1, levels + 1)})

    tail = _middle_gap_tail(s, m, amp, levels)
    meta = {"construction": "middle_gap", "s": f"1/{m}", "levels": levels}
    return GapCantor(ambient, source, meta, tail, histogram)


def _middle_gap_tail(s, m: int, amp: Fraction, levels: int) -> GapTail:
    # sum_{n>L} 2^(n-1) (amp 2^(-nm))^p = amp^p / 2 * r^(L+1) / (1 - r),  r = 2^(1 - m p)
    def power_sum(p, precision: int = DEFAULT_PRECISION) -> Fraction:
        p_lo = p[0] if isinstance(p, tuple) else as_rational(p)
        if p_lo * m <= 1:
            raise ValueError(f"tail series diverges for p <= {Fraction(1, m)}")

        def f(iv, a, pp):
            r = iv.mpf(2) ** (1 - m * pp)
            return a ** pp / 2 * r ** (levels + 1) / (1 - r)

        return eval_enclosure(f, amp, p, precision=precision)[1]

    r = Fraction(2) ** (1 - m)
    exact_len = amp / 2 * r ** (levels + 1) / (1 - r)
    return GapTail(levels, middle_gap_length(s, levels + 1), power_sum, exact_len)


def middle_gap_removed_measure(s, levels: int) -> Fraction:
    """Closed-form total length removed through ``levels``."""
    return sum((count * length for length, count in middle_gap(s, levels).length_histogram().items()), Fraction(0))


# ---------------------------------------------------------- Diophantine sets


def dio_gapset(d: int, q0: int, q_max: int, range_: Interval) -> GapCantor:
    """Gaps ``(p/q - q**-d, p/q + q**-d)`` for ``q0 <= q <= q_max`` and ``p/q`` in ``range_``.

    Gaps are clipped to the interior of ``range_``, which is the ambient. Level
    ``q - q0 + 1`` holds the gaps of denominator ``q`` (reducible ``p/q`` kept).
    """
    if d < 2:
        raise ConstructionError("d must be an integer >= 2")
    if q0 < 2:
        raise ConstructionError("q0 must be at least 2")
    ambient = range_.closure()
    lo, hi = ambient.lo, ambient.hi
    interior = Interval.open(lo, hi) if lo < hi else None

    def source():
        for q in range(q0, q_max + 1):
            r = Fraction(1, q ** d)
            gaps = []
            for p in range(math.ceil(lo * q), math.floor(hi * q) + 1):
                c = Fraction(p, q)
                g = Interval.open(c - r, c + r).intersect(interior) if interior else None
                if g is not None and not g.is_point:
                    gaps.append(g)
            yield gaps

    meta = {"construction": "dio_gapset", "d": d, "q0": q0, "q_max": q_max}
    return GapCantor(ambient, source, meta)


def dio_gap_measure_bound(d: int, q0: int, q_max: int, range_: Interval) -> Fraction:
    """``sum_q (q |range| + 1) * 2 q**-d``: each denominator contributes at most that many gaps."""
    width = range_.length
    return sum(((q * width + 1) * Fraction(2, q ** d) for q in range(q0, q_max + 1)), Fraction(0))


def _s_upper(s) -> Fraction:
    return as_rational(s[1]) if isinstance(s, tuple) else as_rational(s)


def dio_lower_bound(M, ck_upper, s, d: int, q0: int, precision: int = DEFAULT_PRECISION) -> Fraction:
    """Lower-rounded ``2M - 16 M C_K / (((1-s)d - 2) q0**((1-s)d - 2))``.

    ``s`` may be an enclosure; its upper end is used since the subtracted term
    grows with ``s``.
    """
    M, ck = as_rational(M), as_rational(ck_upper)
    s_hi = _s_upper(s)
    e = (1 - s_hi) * d - 2
    if e <= 0:
        raise DomainError("need s < 1 - 2/d for the bound to be meaningful")
    if ck == 0:
        return 2 * M
    q_pow_low = pow_enclosure(Fraction(q0), e, precision)[0]
    term_up = 16 * M * ck / (e * q_pow_low)
    # term_up is rational; keep results on the dyadic grid for readability
    scale = 1 << precision
    term_up = Fraction(math.ceil(term_up * scale), scale)
    return 2 * M - term_up


def dio_q0_for_margin(M, ck_upper, s, d: int, margin, precision: int = DEFAULT_PRECISION) -> int:
    """Smallest ``q0 >= 2`` whose certified bound exceeds ``2M - margin``."""
    M, margin = as_rational(M), as_rational(margin)
    e = (1 - _s_upper(s)) * d - 2
    if e <= 0:
        raise DomainError("need s < 1 - 2/d")
    ck = as_rational(ck_upper)
    if ck == 0:
        return 2
    guess = max(2, int((float(16 * M * ck) / (float(e) * float(margin))) ** (1 / float(e))) - 2)
    q0 = guess
    while q0 > 2 and dio_lower_bound(M, ck, s, d, q0 - 1, precision) > 2 * M - margin:
        q0 -= 1
    while dio_lower_bound(M, ck, s, d, q0, precision) <= 2 * M - margin:
        q0 += 1
    return q0


# ------------------------------------------------ continued-fraction Cantor


def _convergents(digits) -> Tuple[int, int, int, int]:
    p_prev, p = 1, 0
    q_prev, q = 0, 1
    for a in digits:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q, p_prev, q_prev


def cf_cylinder(digits, k: int) -> Interval:
    """Closed hull of ``{[0; a_1..a_n, y] : y in F_k tails}`` using the tail range ``[1/(k+1), 1]``.

    ``[0; a_1, ..., a_n + y]`` equals ``(p_n + y p_{n-1}) / (q_n + y q_{n-1})``,
    monotone in ``y``.
    """
    p, q, pp, qp = _convergents(digits)
    y0, y1 = Fraction(1, k + 1), Fraction(1)
    # tail value t in [1/(k+1), 1] enters as [0; a_1, ..., a_n, 1/t] -> (p + t pp) / (q + t qp)
    a = Fraction(p) + y0 * pp
    a /= Fraction(q) + y0 * qp
    b = Fraction(p) + y1 * pp
    b /= Fraction(q) + y1 * qp
    return Interval.closed(min(a, b), max(a, b))


def cf_cantor(k: int, depth: int, part_budget: int = 1 << 20) -> CoverApprox:
    """Outer cover of ``F_k = {[0; a_1, a_2, ...] : 1 <= a_j <= k}`` by depth-``depth`` cylinders.

    Every point of ``F_k`` has tail ``[0; a_{n+1}, ...]`` in ``[1/(k+1), 1]``;
    the cylinder for a prefix is the image of that tail range, so covers are
    nested in depth.
    """
    if k < 1:
        raise ConstructionError("k must be at least 1")
    if depth < 0:
        raise ConstructionError("depth must be non-negative")
    if k ** depth > part_budget:
        raise ConstructionError(f"{k ** depth} cylinders exceed the part budget")
    parts = []
    prefixes = [()]
    for _ in range(depth):
        prefixes = [w + (a,) for w in prefixes for a in range(1, k + 1)]
    for w in prefixes:
        parts.append(cf_cylinder(w, k))
    longest = max(p.length for p in parts)
    return CoverApprox(depth, normalize(parts), len(parts), longest)


# --------------------------------------------------------- named K sets


def even_digit_K():
    """Decimal digits all even, with a leading zero digit: diameter ``4/45 < 1/10``."""
    return scale_set(digit_cantor(10, (0, 2, 4, 6, 8)), Fraction(1, 10))


def flagship_K(m: int = 6):
    """Base-16 digits ``{0, 8}`` (dimension exactly 1/4) scaled by ``2**-m``."""
    return scale_set(digit_cantor(16, (0, 8)), Fraction(1, 2 ** m))
