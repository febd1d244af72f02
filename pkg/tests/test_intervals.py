from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_nest.intervals import (
    DomainError,
    Interval,
    IntervalUnion,
    complement_in,
    format_rational,
    min_cover_count,
    minkowski_diff,
    normalize,
    parse_rational,
)

from conftest import interval_lists, intervals, rationals


def _grid_points(parts, den=64):
    # every point at which membership could change, plus midpoints
    ends = sorted({p.lo for p in parts} | {p.hi for p in parts})
    pts = set(ends)
    for a, b in zip(ends, ends[1:]):
        pts.add((a + b) / 2)
    if ends:
        pts.add(ends[0] - 1)
        pts.add(ends[-1] + 1)
    return pts


def test_open_closed_tags():
    iv = Interval.open(0, 1)
    assert not iv.contains(0) and not iv.contains(1) and iv.contains(Fraction(1, 2))
    assert Interval.closed(0, 1).contains(1)


def test_empty_open_interval_rejected():
    with pytest.raises(ValueError):
        Interval(Fraction(1), Fraction(1), False, True)


def test_touching_parts_merge_only_when_the_point_is_covered():
    u = normalize([Interval(0, 1, True, False), Interval(1, 2, True, True)])
    assert len(u) == 1
    v = normalize([Interval(0, 1, True, False), Interval(1, 2, False, True)])
    assert len(v) == 2 and not v.contains(1)


@given(interval_lists())
def test_normalize_idempotent(parts):
    u = normalize(parts)
    assert normalize(u) == u
    assert normalize(list(u)) == u


@given(interval_lists(max_size=6))
def test_normalize_preserves_membership(parts):
    u = normalize(parts)
    for x in _grid_points(parts):
        assert u.contains(x) == any(p.contains(x) for p in parts)


@given(interval_lists(max_size=6))
def test_normalized_parts_disjoint_and_sorted(parts):
    u = normalize(parts).parts
    for a, b in zip(u, u[1:]):
        assert a.hi < b.lo or (a.hi == b.lo and not a.hi_closed and not b.lo_closed)


@given(interval_lists(max_size=5), interval_lists(max_size=5))
def test_minkowski_diff_pointwise(us, vs):
    d = minkowski_diff(us, vs)
    # endpoints of u - v are differences of endpoints; check membership at midpoints of candidates
    for a in us:
        for b in vs:
            for x in (a.lo, a.hi, (a.lo + a.hi) / 2):
                for y in (b.lo, b.hi, (b.lo + b.hi) / 2):
                    if a.contains(x) and b.contains(y):
                        assert d.contains(x - y)


@given(interval_lists(max_size=5))
def test_complement_partitions_ambient(parts):
    amb = Interval.closed(-9, 9)
    u = normalize(parts)
    c = complement_in(amb, u)
    assert c.measure + u.measure == amb.length
    for x in _grid_points(parts):
        if amb.contains(x):
            assert c.contains(x) != u.contains(x)


def test_complement_requires_containment():
    with pytest.raises(DomainError):
        complement_in(Interval.closed(0, 1), normalize([Interval.closed(0, 2)]))


@given(interval_lists(min_size=1, max_size=5, allow_points=False), rationals(1, 4, 4))
def test_min_cover_count_against_greedy_bound(parts, eps):
    u = normalize(parts)
    n = min_cover_count(u, eps)
    assert n * eps >= u.measure
    # one eps-interval per part plus the length it has to absorb
    assert n <= sum(1 + p.length // eps for p in u)


@given(rationals())
def test_rational_text_roundtrip(q):
    assert parse_rational(format_rational(q)) == q


@given(intervals(), rationals(-3, 3), rationals(1, 3))
def test_affine_maps_scale_length(iv, t, lam):
    assert iv.translate(t).length == iv.length
    assert iv.scale(lam).length == lam * iv.length


def test_union_json_roundtrip():
    u = normalize([Interval.open(0, 1), Interval.closed(2, 3)])
    assert IntervalUnion.from_json(u.to_json()) == u
