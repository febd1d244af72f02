"""Counting signed digit sequences with entries in ``Z minus {-1, 0, 1}``.

Exact counts come from dynamic programming and are cross-checked against
brute-force enumeration. Inequalities whose right side involves ``e`` compare
the exact left side against the *lower* end of a certified enclosure of the
right side, so a reported pass is a proof for that instance.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple

from .intervals import as_rational
from .rounding import DEFAULT_PRECISION, Enclosure, eval_enclosure

CARD_E_CAP = 20


class CapExceeded(ValueError):
    pass


# -------------------------------------------------------------------- C_k


@dataclass(frozen=True)
class SeqCountTable:
    max_k: int
    counts: Tuple[int, ...]  # C_2 .. C_max_k

    def __getitem__(self, k: int) -> int:
        if k < 2 or k > self.max_k:
            raise KeyError(k)
        return self.counts[k - 2]

    @property
    def below_power_of_two(self) -> bool:
        return all(c <= 2 ** k for k, c in enumerate(self.counts, start=2))

    def rows(self) -> List[Tuple[int, int]]:
        return [(k, c) for k, c in enumerate(self.counts, start=2)]


def _ck_all(max_k: int) -> List[int]:
    # C[0] = 1 counts the empty sequence; C[m] = sum_{i=2}^{m} 2 C[m - i] by first digit
    c = [1] + [0] * max_k
    for m in range(2, max_k + 1):
        c[m] = sum(2 * c[m - i] for i in range(2, m + 1))
    return c


def count_ck(max_k: int) -> SeqCountTable:
    """``C_k`` for ``2 <= k <= max_k``: sequences with entries ``|a| >= 2`` and ``sum |a_j| = k``."""
    if max_k < 2:
        raise ValueError("max_k must be at least 2")
    c = _ck_all(max_k)
    return SeqCountTable(max_k, tuple(c[2:]))


def signed_sequences(k: int) -> Iterator[Tuple[int, ...]]:
    """Every sequence over ``Z minus {-1, 0, 1}`` with absolute sum ``k``."""
    if k == 0:
        yield ()
        return
    for v in range(2, k + 1):
        for rest in signed_sequences(k - v):
            yield (v,) + rest
            yield (-v,) + rest


def count_ck_bruteforce(k: int) -> int:
    return sum(1 for _ in signed_sequences(k))


# ------------------------------------------------------------------- E(N)


@dataclass(frozen=True)
class EnsembleCard:
    N: int
    M: int
    delta: Fraction
    card: int
    by_R_n_t: Dict[Tuple[int, int, int], int] = field(hash=False)
    bound: Enclosure = (Fraction(0), Fraction(0))

    @property
    def holds(self) -> bool:
        return self.card <= self.bound[0]


def _seq_stats(seq, M: int) -> Tuple[int, int, int]:
    big = [abs(a) for a in seq if abs(a) > M]
    return sum(big), len(seq), len(big)


def e_threshold(N: int, delta: Fraction) -> int:
    """Smallest ``R`` in ``E(N)``: ``floor(delta N) + 1``."""
    return math.floor(delta * N) + 1


def card_E_table(N: int, M: int) -> Dict[Tuple[int, int, int], int]:
    """Number of sequences with absolute sum ``N`` for every ``(R, n, t)``, by DP."""
    if N > CARD_E_CAP:
        raise CapExceeded(f"N = {N} exceeds the enumeration cap {CARD_E_CAP}")
    # layer[s][(R, n, t)] = count
    layers: List[Dict[Tuple[int, int, int], int]] = [defaultdict(int) for _ in range(N + 1)]
    layers[0][(0, 0, 0)] = 1
    for s in range(N + 1):
        for (R, n, t), cnt in list(layers[s].items()):
            for v in range(2, N - s + 1):
                key = (R + v, n + 1, t + 1) if v > M else (R, n + 1, t)
                layers[s + v][key] += 2 * cnt
    return dict(layers[N])


def card_E_bruteforce(N: int, M: int) -> Dict[Tuple[int, int, int], int]:
    out: Dict[Tuple[int, int, int], int] = defaultdict(int)
    for seq in signed_sequences(N):
        out[_seq_stats(seq, M)] += 1
    return dict(out)


def card_E_bound(N: int, M: int, delta, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``N**3 2**(N(1 - delta)) (e**2 M**2 / delta)**((delta N + 1) / M)``."""
    delta = as_rational(delta)

    def f(iv, dd):
        n = iv.mpf(N)
        return n ** 3 * iv.mpf(2) ** (n * (1 - dd)) * (iv.e ** 2 * M * M / dd) ** ((dd * n + 1) / M)

    return eval_enclosure(f, delta, precision=precision)


def card_E(N: int, M: int, delta, precision: int = DEFAULT_PRECISION) -> EnsembleCard:
    """Exact ``card E(N)`` (sequences with ``R >= floor(delta N) + 1``) and its closed-form upper bound."""
    delta = as_rational(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    r_min = e_threshold(N, delta)
    table = {k: v for k, v in card_E_table(N, M).items() if k[0] >= r_min}
    return EnsembleCard(N, M, delta, sum(table.values()), table, card_E_bound(N, M, delta, precision))


# --------------------------------------------------- counting inequalities


@dataclass(frozen=True)
class InequalityCheck:
    lhs: int
    rhs: Enclosure
    case: str

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs[0]


def _e_power(base_factor: Fraction, expo: Fraction, precision: int) -> Enclosure:
    # (e * base_factor) ** expo
    return eval_enclosure(lambda iv, b, x: (iv.e * b) ** x, base_factor, expo, precision=precision)


def binom_bound(n: int, t: int, N: int, R: int, M: int, precision: int = DEFAULT_PRECISION) -> InequalityCheck:
    """``C(n, t)`` against ``(e N M / 2R)**(R/M)``, tagged with the case split at ``R/M`` vs ``n/2``."""
    if M < 3:
        raise ValueError("the bound needs M >= 3")
    if not (0 <= t and M * t <= R <= N and 2 * n <= N and t <= n):
        raise ValueError("need t <= R/M, R <= N, n <= N/2 and t <= n")
    lhs = math.comb(n, t)
    if R == 0:
        return InequalityCheck(lhs, (Fraction(1), Fraction(1)), "R = 0")
    case = "R/M < n/2" if 2 * R < M * n else "R/M >= n/2"
    rhs = _e_power(Fraction(N * M, 2 * R), Fraction(R, M), precision)
    return InequalityCheck(lhs, rhs, case)


def binom_bound_check(n: int, t: int, N: int, R: int, M: int, precision: int = DEFAULT_PRECISION) -> bool:
    return binom_bound(n, t, N, R, M, precision).holds


def composition_count(R: int, t: int, M: int, precision: int = DEFAULT_PRECISION) -> Tuple[InequalityCheck, InequalityCheck]:
    """The two links ``2**t C(R, t) <= 2**t C(R, floor(R/M))`` and ``... <= (2eM)**(R/M)``."""
    if M < 2:
        raise ValueError("M must be at least 2")
    if not (0 <= t and M * t <= R):
        raise ValueError("need 0 <= t <= R/M")
    k = R // M
    first = 2 ** t * math.comb(R, t)
    middle = 2 ** t * math.comb(R, k)
    link1 = InequalityCheck(first, (Fraction(middle), Fraction(middle)), "monotone binomial")
    link2 = InequalityCheck(middle, _e_power(Fraction(2 * M), Fraction(R, M), precision), "entropy bound")
    return link1, link2


def composition_count_check(R: int, t: int, M: int, precision: int = DEFAULT_PRECISION) -> bool:
    a, b = composition_count(R, t, M, precision)
    return a.holds and b.holds


# ------------------------------------------------------------------ sweeps


def binom_sweep(N_max: int, M_values=(3, 4, 5), precision: int = DEFAULT_PRECISION) -> List[Tuple[tuple, InequalityCheck]]:
    out = []
    for M in M_values:
        for N in range(1, N_max + 1):
            for R in range(0, N + 1):
                for n in range(0, N // 2 + 1):
                    for t in range(0, min(n, R // M) + 1):
                        out.append(((n, t, N, R, M), binom_bound(n, t, N, R, M, precision)))
    return out


def composition_sweep(R_max: int = 30, M_values=(2, 3, 4, 5), precision: int = DEFAULT_PRECISION):
    out = []
    for M in M_values:
        for R in range(0, R_max + 1):
            for t in range(0, R // M + 1):
                out.append(((R, t, M), composition_count(R, t, M, precision)))
    return out
