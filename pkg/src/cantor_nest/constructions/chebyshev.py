"""Symbolic coding of the map ``f(x) = 2**(m+2) (x - 2**-(m+1)) - 1`` on
``I_m = (2**-(m-1), 2**-(m-2)]`` (mirrored for negative codes) and the two
Pesin-type gap sets built from admissible digit sequences."""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterator, List, Tuple

from ..intervals import Interval, as_rational
from ..model import BudgetExceeded, GapCantor
from .gallery import ConstructionError

DEFAULT_GAP_BUDGET = 1 << 20


@dataclass(frozen=True)
class SymbolicWord:
    digits: Tuple[int, ...]
    abs_sum: int = field(init=False)

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        for d in digits:
            if abs(d) < 2:
                raise ConstructionError(f"invalid digit {d}: codes satisfy |m| >= 2")
        object.__setattr__(self, "digits", digits)
        object.__setattr__(self, "abs_sum", sum(abs(d) for d in digits))

    @property
    def cylinder_length(self) -> Fraction:
        return Fraction(2) ** (1 - self.abs_sum)


def branch_interval(m: int) -> Interval:
    """Domain ``I_m`` of the branch with code ``m``."""
    if abs(m) < 2:
        raise ConstructionError(f"invalid digit {m}")
    k = abs(m)
    lo, hi = Fraction(2) ** (1 - k), Fraction(2) ** (2 - k)
    if m > 0:
        return Interval(lo, hi, False, True)
    return Interval(-hi, -lo, True, False)


def _branch_affine(m: int) -> Tuple[Fraction, Fraction]:
    # inverse branch y -> sign (2^(1-|m|) + (y + 1) 2^-|m|) = a + b y
    k = abs(m)
    sign = 1 if m > 0 else -1
    return sign * 3 * Fraction(1, 2 ** k), sign * Fraction(1, 2 ** k)


def chebyshev_cylinder(word) -> Interval:
    """Set of ``x`` in ``[-1, 1]`` whose coding begins with ``word``; length ``2**(1 - abs_sum)``."""
    if not isinstance(word, SymbolicWord):
        word = SymbolicWord(tuple(word))
    cyl = Interval.closed(-1, 1)
    for m in reversed(word.digits):
        a, b = _branch_affine(m)
        cyl = cyl.scale(b).translate(a).intersect(branch_interval(m))
    return cyl


# ----------------------------------------------------------------- engine


@dataclass(frozen=True)
class _Rule:
    """Admissibility rule: ``state -> largest allowed |digit|`` and the state update."""

    name: str
    initial: Tuple[int, ...]
    max_digit: Callable[[Tuple[int, ...]], int]
    advance: Callable[[Tuple[int, ...], int], Tuple[int, ...]]
    # lower bound on max_digit for every state reachable at abs-sum >= S
    cap_floor: Callable[[int], int]


def _central_gap_length(S: int, U: int) -> Fraction:
    # image of (-2^(1-U), 2^(1-U)) under a map of slope 2^-S
    return Fraction(2) ** (2 - U - S)


def _histogram(rule: _Rule, sum_budget: int) -> Tuple[Counter, Fraction, Dict[int, int], Fraction]:
    """Gap-length histogram, unresolved mass, admissible-word counts per abs-sum, and the
    length above which the histogram is complete, by DP."""
    states: Dict[Tuple[int, ...], int] = {rule.initial: 1}
    by_sum: Dict[int, Dict[Tuple[int, ...], int]] = defaultdict(dict)
    by_sum[0] = states
    hist: Counter = Counter()
    unresolved = Fraction(0)
    complete_above = Fraction(0)
    words_per_sum: Dict[int, int] = {}
    for S in range(sum_budget + 1):
        layer = by_sum.pop(S, {})
        words_per_sum[S] = sum(layer.values())
        for state, count in layer.items():
            U = rule.max_digit(state)
            hist[_central_gap_length(S, U)] += count
            for a in range(2, U + 1):
                child = rule.advance(state, a)
                t = S + a
                if t > sum_budget:
                    unresolved += 2 * count * Fraction(2) ** (1 - t)
                    # every gap inside this cylinder sits at abs-sum >= t
                    complete_above = max(complete_above, _central_gap_length(t, rule.cap_floor(t)))
                else:
                    bucket = by_sum[t]
                    bucket[child] = bucket.get(child, 0) + 2 * count
    return hist, unresolved, words_per_sum, complete_above


def _levels(rule: _Rule, sum_budget: int, gap_budget: int) -> Iterator[List[Interval]]:
    """Explicit gaps, one level per abs-sum ``S = 0..sum_budget`` (level ``S + 1``)."""
    # each live cylinder: affine chart x = a + b y on [-1, 1] and its rule state
    pending: Dict[int, List[Tuple[Fraction, Fraction, Tuple[int, ...]]]] = defaultdict(list)
    pending[0].append((Fraction(0), Fraction(1), rule.initial))
    emitted = 0
    for S in range(sum_budget + 1):
        gaps = []
        for a0, b0, state in pending.pop(S, []):
            U = rule.max_digit(state)
            r = abs(b0) * Fraction(2) ** (1 - U)
            gaps.append(Interval.open(a0 - r, a0 + r))
            for d in range(2, U + 1):
                if S + d > sum_budget:
                    break
                child_state = rule.advance(state, d)
                for m in (d, -d):
                    a, b = _branch_affine(m)
                    pending[S + d].append((a0 + b0 * a, b0 * b, child_state))
        emitted += len(gaps)
        if emitted > gap_budget:
            raise BudgetExceeded(f"more than {gap_budget} explicit gaps; use the length histogram instead")
        gaps.sort(key=lambda g: g.lo)
        yield gaps


def _build(rule: _Rule, sum_budget: int, meta: dict, gap_budget: int) -> GapCantor:
    if sum_budget < 0:
        raise ConstructionError("sum_budget must be non-negative")
    hist, unresolved, words, complete_above = _histogram(rule, sum_budget)
    meta = dict(meta)
    meta.update(
        sum_budget=sum_budget,
        gap_count=sum(hist.values()),
        unresolved_mass=str(unresolved),
        complete_above=str(complete_above),
        words_per_sum={str(k): v for k, v in words.items()},
    )
    if not hist:
        meta["empty"] = True
    return GapCantor(
        Interval.closed(-1, 1),
        lambda: _levels(rule, sum_budget, gap_budget),
        meta,
        None,
        lambda: Counter(hist),
    )


def _k2_rule(s: Fraction, N: int) -> _Rule:
    # state: (S,)
    return _Rule(
        "k2",
        (0,),
        lambda st: math.floor(max(Fraction(N), s * st[0])),
        lambda st, a: (st[0] + a,),
        lambda S: math.floor(max(Fraction(N), s * S)),
    )


def _k3_rule(M: int, delta: Fraction) -> _Rule:
    # state: (S, R) with R the weight of digits above M; a digit a > M is allowed iff R + a <= delta (S + a)
    def max_digit(st):
        S, R = st
        return max(M, math.floor((delta * S - R) / (1 - delta)))

    def advance(st, a):
        S, R = st
        return (S + a, R + a if a > M else R)

    return _Rule("k3", (0, 0), max_digit, advance, lambda S: M)


def pesin_k2(s, N: int, sum_budget: int, gap_budget: int = DEFAULT_GAP_BUDGET) -> GapCantor:
    """Closure of codings with ``|x_i| <= max(N, s * sum_{j<i} |x_j|)``.

    Every admissible word of abs-sum ``S <= sum_budget`` contributes the central
    gap of its cylinder (all next digits above the cap are forbidden). Words
    that would exceed the budget are not expanded; their total cylinder length
    is ``meta['unresolved_mass']``.
    """
    s = as_rational(s)
    if s <= 0:
        raise ConstructionError("s must be positive")
    if N < 2:
        raise ConstructionError("N must be at least 2")
    meta = {"construction": "pesin_k2", "s": str(s), "N": N}
    return _build(_k2_rule(s, N), sum_budget, meta, gap_budget)


def pesin_k3(M: int, delta, sum_budget: int, gap_budget: int = DEFAULT_GAP_BUDGET) -> GapCantor:
    """Closure of codings whose digits above ``M`` carry at most a ``delta`` share of every prefix's abs-sum."""
    delta = as_rational(delta)
    if M < 3:
        raise ConstructionError("M must be at least 3")
    if not 0 < delta < Fraction(1, 2):
        raise ConstructionError("delta must lie in (0, 1/2)")
    meta = {"construction": "pesin_k3", "M": M, "delta": str(delta)}
    return _build(_k3_rule(M, delta), sum_budget, meta, gap_budget)


def admissible_k2(word, s, N: int) -> bool:
    s = as_rational(s)
    S = 0
    for x in SymbolicWord(tuple(word)).digits:
        if abs(x) > max(N, s * S):
            return False
        S += abs(x)
    return True


def admissible_k3(word, M: int, delta) -> bool:
    delta = as_rational(delta)
    S = R = 0
    for x in SymbolicWord(tuple(word)).digits:
        S += abs(x)
        if abs(x) > M:
            R += abs(x)
        if R > delta * S:
            return False
    return True
