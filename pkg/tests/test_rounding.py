from fractions import Fraction

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_nest.rounding import (
    DirectedRounding,
    e_enclosure,
    eval_enclosure,
    exact_log_ratio,
    log_ratio_enclosure,
    pow_enclosure,
    snap_outward,
)


def test_rational_powers_are_exact():
    assert pow_enclosure(Fraction(1, 16), Fraction(1, 4)) == (Fraction(1, 2), Fraction(1, 2))
    assert pow_enclosure(Fraction(9, 4), Fraction(3, 2)) == (Fraction(27, 8),) * 2


@given(st.integers(2, 1000), st.integers(1, 50), st.integers(1, 9), st.integers(1, 9))
def test_power_enclosure_brackets_float(n, d, a, b):
    x = Fraction(n, d)
    p = Fraction(min(a, b), max(a, b) + 1)
    lo, hi = pow_enclosure(x, p, 53)
    assert lo <= hi
    ref = float(x) ** float(p)
    assert float(lo) <= ref * (1 + 1e-12) and float(hi) >= ref * (1 - 1e-12)
    assert hi - lo <= Fraction(1, 2 ** 40) * max(1, hi)


@given(st.integers(1, 64))
def test_outward_snap_lands_on_grid(precision):
    lo, hi = snap_outward((Fraction(1, 3), Fraction(2, 3)), precision)
    assert lo <= Fraction(1, 3) and hi >= Fraction(2, 3)
    assert (lo * 2 ** precision).denominator == 1 and (hi * 2 ** precision).denominator == 1


def test_log_ratio_exact_cases():
    assert exact_log_ratio(2, 16) == Fraction(1, 4)
    assert exact_log_ratio(8, 4) == Fraction(3, 2)
    assert exact_log_ratio(2, 3) is None
    lo, hi = log_ratio_enclosure(2, 3)
    with mpmath.workdps(60):
        ref = mpmath.log(2) / mpmath.log(3)
        assert mpmath.mpf(lo.numerator) / lo.denominator < ref < mpmath.mpf(hi.numerator) / hi.denominator


def test_e_enclosure_and_eval():
    lo, hi = e_enclosure(80)
    # e lies in [2.718281828459045235, 2.718281828459045236]
    assert lo < Fraction(2718281828459045236, 10 ** 18) and hi > Fraction(2718281828459045235, 10 ** 18)
    assert hi - lo <= Fraction(1, 2 ** 78)
    lo, hi = eval_enclosure(lambda iv, x: iv.e * x, Fraction(2))
    assert lo < Fraction(2 * 2718281828459045236, 10 ** 18) and hi > Fraction(2 * 2718281828459045235, 10 ** 18)


def test_exact_policy_refuses_irrational():
    pol = DirectedRounding("exact")
    assert pol.power(Fraction(4), Fraction(1, 2)) == (2, 2)
    with pytest.raises(ValueError):
        pol.power(Fraction(2), Fraction(1, 2))
    with pytest.raises(ValueError):
        DirectedRounding("sideways")
