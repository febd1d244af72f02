"""Certified enclosures of irrational quantities as dyadic rationals.

Transcendental evaluations go through :mod:`mpmath`'s interval context and are
then snapped outward onto the grid ``2**-precision``. The result is a pair of
Fractions guaranteed to bracket the true value.
"""
from __future__ import annotations

import math
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from mpmath import iv

from .intervals import as_rational

DEFAULT_PRECISION = 64
GUARD_BITS = 24
_IV_LOCK = threading.RLock()

Enclosure = Tuple[Fraction, Fraction]


@contextmanager
def _workprec(bits: int):
    # mpmath's iv context keeps precision as global state
    with _IV_LOCK:
        saved = iv.prec
        iv.prec = bits
        try:
            yield
        finally:
            iv.prec = saved


def _mpf_to_fraction(raw) -> Fraction:
    sign, man, exp, _bc = raw
    if not man:
        if exp:  # mpmath encodes inf/nan with a zero mantissa and a nonzero exponent
            raise OverflowError("non-finite value in enclosure")
        return Fraction(0)
    value = Fraction(int(man)) * (Fraction(2) ** exp)
    return -value if sign else value


def _iv_to_enclosure(x) -> Enclosure:
    lo, hi = x._mpi_
    return _mpf_to_fraction(lo), _mpf_to_fraction(hi)


def _snap_down(x: Fraction, precision: int) -> Fraction:
    scale = 1 << precision
    return Fraction(math.floor(x * scale), scale)


def _snap_up(x: Fraction, precision: int) -> Fraction:
    scale = 1 << precision
    return Fraction(math.ceil(x * scale), scale)


def snap_outward(enc: Enclosure, precision: int = DEFAULT_PRECISION) -> Enclosure:
    return _snap_down(enc[0], precision), _snap_up(enc[1], precision)


def _ivq(q: Fraction):
    """Interval containing the rational ``q`` exactly (endpoints rounded outward)."""
    return iv.mpf(q.numerator) / iv.mpf(q.denominator)


def _ivx(x):
    """Interval for either a rational or an enclosure pair."""
    if isinstance(x, tuple):
        lo, hi = x
        a, b = _ivq(as_rational(lo)), _ivq(as_rational(hi))
        return iv.mpf([a.a, b.b])
    return _ivq(as_rational(x))


def _exact_rational_power(x: Fraction, p: Fraction):
    """``x**p`` when it is rational, else ``None``."""
    if p.denominator == 1:
        return x ** p.numerator
    if x <= 0:
        return None
    root = p.denominator
    num = _int_root(x.numerator, root)
    den = _int_root(x.denominator, root)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** p.numerator


def _int_root(n: int, k: int):
    if n < 0:
        return None
    r = round(n ** (1.0 / k)) if n < 2 ** 1000 else _int_root_newton(n, k)
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** k == n:
            return cand
    return None


def _int_root_newton(n: int, k: int) -> int:
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def pow_enclosure(x, p, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``x**p`` for ``x > 0``; ``x`` and ``p`` may be rationals or enclosures.

    Returns a degenerate pair when both are rational and the power is rational.
    """
    if not isinstance(x, tuple) and not isinstance(p, tuple):
        xq, pq = as_rational(x), as_rational(p)
        exact = _exact_rational_power(xq, pq)
        if exact is not None:
            return exact, exact
    lo_x = x[0] if isinstance(x, tuple) else x
    if as_rational(lo_x) <= 0:
        if as_rational(lo_x) == 0 and not isinstance(x, tuple) and not isinstance(p, tuple):
            return Fraction(0), Fraction(0)
        raise ValueError("pow_enclosure needs a positive base")
    with _workprec(precision + GUARD_BITS):
        val = iv.exp(_ivx(p) * iv.log(_ivx(x)))
        return snap_outward(_iv_to_enclosure(val), precision)


def log_ratio_enclosure(a: int, b: int, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Enclosure of ``log(a) / log(b)`` for integers ``a >= 1``, ``b >= 2``."""
    exact = exact_log_ratio(a, b)
    if exact is not None:
        return exact, exact
    with _workprec(precision + GUARD_BITS):
        val = iv.log(iv.mpf(a)) / iv.log(iv.mpf(b))
        return snap_outward(_iv_to_enclosure(val), precision)


def exact_log_ratio(a: int, b: int):
    """``log a / log b`` as a Fraction when it is rational (``a = c**u, b = c**v``)."""
    if a == 1:
        return Fraction(0)
    ga, ea = _perfect_power(a)
    gb, eb = _perfect_power(b)
    if ga == gb:
        return Fraction(ea, eb)
    return None


def _perfect_power(n: int):
    """Write ``n = g**e`` with ``g`` not a perfect power."""
    best = (n, 1)
    for e in range(2, n.bit_length() + 1):
        r = _int_root(n, e)
        if r is not None and r > 1:
            best = (r, e)
    g, e = best
    if e > 1:
        g2, e2 = _perfect_power(g)
        return g2, e * e2
    return best


def e_enclosure(precision: int = DEFAULT_PRECISION) -> Enclosure:
    with _workprec(precision + GUARD_BITS):
        return snap_outward(_iv_to_enclosure(iv.e), precision)


def log2_enclosure(x, precision: int = DEFAULT_PRECISION) -> Enclosure:
    with _workprec(precision + GUARD_BITS):
        val = iv.log(_ivx(x)) / iv.log(iv.mpf(2))
        return snap_outward(_iv_to_enclosure(val), precision)


def eval_enclosure(fn, *args, precision: int = DEFAULT_PRECISION) -> Enclosure:
    """Evaluate ``fn`` on interval versions of ``args`` under mpmath's ``iv`` context.

    ``fn`` receives ``(iv, *interval_args)`` and must use only operations that
    ``iv`` rounds outward.
    """
    with _workprec(precision + GUARD_BITS):
        val = fn(iv, *(_ivx(a) for a in args))
        return snap_outward(_iv_to_enclosure(val), precision)


@dataclass(frozen=True)
class DirectedRounding:
    """Certification policy for a quantity that may be irrational.

    ``outward`` returns enclosures, ``upper``/``lower`` pick the side that keeps
    a published bound valid, ``exact`` refuses anything that is not rational.
    """

    mode: str = "outward"
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.mode not in ("exact", "outward", "inward"):
            raise ValueError(f"unknown rounding mode {self.mode!r}")
        if self.precision <= 0:
            raise ValueError("precision must be positive")

    def power(self, x, p) -> Enclosure:
        lo, hi = pow_enclosure(x, p, self.precision)
        if self.mode == "exact" and lo != hi:
            raise ValueError(f"{x}**{p} is irrational; exact mode forbids it")
        return lo, hi

    def upper(self, enc: Enclosure) -> Fraction:
        return enc[1]

    def lower(self, enc: Enclosure) -> Fraction:
        return enc[0]

    def power_upper(self, x, p) -> Fraction:
        return self.power(x, p)[1]

    def power_lower(self, x, p) -> Fraction:
        return self.power(x, p)[0]

    def round_set_bound(self, enc: Enclosure) -> Fraction:
        """Single value for a set-size bound: outward grows it, inward shrinks it."""
        if self.mode == "inward":
            return enc[0]
        if self.mode == "exact" and enc[0] != enc[1]:
            raise ValueError("exact mode cannot round an irrational quantity")
        return enc[1]
