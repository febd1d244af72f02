from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_nest.intervals import Interval, IntervalUnion, normalize
from cantor_nest.model import (
    Budget,
    BudgetExceeded,
    DigitCantorSpec,
    FiniteK,
    GapCantor,
    UncertifiableError,
    ck_upper_bound,
    digit_cantor,
    dimension,
    gaps_up_to,
    normalized_to_unit_diameter,
    scale_set,
    take_gaps,
)

@st.composite
def digit_specs(draw):
    base = draw(st.integers(3, 7))
    digits = draw(st.sets(st.integers(0, base - 1), min_size=2, max_size=base - 1))
    return digit_cantor(base, sorted(digits))


def test_middle_thirds_basics():
    k = digit_cantor(3, (0, 2))
    assert k.hull == Interval.closed(0, 1)
    c = k.cover(2)
    assert c.part_count == 4 and c.part_length == Fraction(1, 9)
    assert c.measure == Fraction(4, 9)
    lo, hi = dimension(k).enclosure
    assert Fraction(6309, 10000) < lo < hi < Fraction(6310, 10000)


def test_flagship_dimension_is_exact():
    d = dimension(digit_cantor(16, (0, 8)))
    assert d.exact == Fraction(1, 4)


@given(digit_specs(), st.integers(0, 3))
def test_covers_are_nested(spec, n):
    outer, inner = spec.cover(n).cover, spec.cover(n + 1).cover
    assert inner.issubset(outer)
    assert spec.cover(n).part_count == spec.card ** n


@given(digit_specs(), st.integers(0, 3))
def test_known_points_lie_in_every_cover(spec, n):
    pts = spec.points(n)
    deeper = spec.cover(n + 2).cover
    assert all(deeper.contains(x) for x in pts)


def test_part_budget_enforced():
    with pytest.raises(BudgetExceeded):
        digit_cantor(10, range(0, 10, 2)).cover(12, part_budget=1000)


def test_scaling_rescales_hull_and_certificate():
    k = digit_cantor(16, (0, 8))
    small = scale_set(k, Fraction(1, 64))
    assert small.diameter == k.diameter / 64
    c = ck_upper_bound(k)
    cs = c.scaled(Fraction(1, 64))
    # d = 1/4 exactly, so the factor is 64**-1/4 rounded outward
    assert cs.ck_upper >= c.ck_upper / Fraction(64) ** 0 / 3 and cs.ck_upper <= c.ck_upper
    assert normalized_to_unit_diameter(small).hull == Interval.closed(0, 1)


@given(digit_specs())
def test_ck_bracket_is_ordered(spec):
    c = ck_upper_bound(spec, subdivisions=16)
    assert 0 < c.ck_lower <= c.ck_upper


def test_ck_needs_a_self_similar_set():
    with pytest.raises(UncertifiableError):
        ck_upper_bound(FiniteK(normalize([Interval.closed(0, 1)])))


def test_take_gaps_budgets():
    levels = [[Interval.open(1, 2)], [Interval.open(Fraction(1, 4), Fraction(1, 2)), Interval.open(3, 4)]]
    gc = GapCantor.from_levels(Interval.closed(0, 5), levels)
    assert len(gaps_up_to(gc)) == 3
    taken, complete = take_gaps(gc, Budget(level=1))
    assert [g for _, g in taken] == [Interval.open(1, 2)] and not complete
    assert len(gaps_up_to(gc, Budget(count=2))) == 2
    assert gaps_up_to(gc, Budget(min_length=Fraction(1, 2))) == [Interval.open(1, 2), Interval.open(3, 4)]
    assert gc.complement().measure == 5 - 1 - Fraction(1, 4) - 1


def test_digit_spec_validation():
    with pytest.raises(ValueError):
        DigitCantorSpec(3, (0, 1, 2))
    with pytest.raises(ValueError):
        DigitCantorSpec(3, (0, 3))
