from collections import Counter
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_nest.constructions import (
    ConstructionError,
    RandomSeed,
    SymbolicWord,
    admissible_k2,
    admissible_k3,
    cf_cantor,
    cf_cylinder,
    chebyshev_cylinder,
    complement_series_bound,
    counterexample_estimate,
    counterexample_kp,
    counterexample_n_start,
    dio_gap_measure_bound,
    dio_gapset,
    dio_lower_bound,
    dio_q0_for_margin,
    even_digit_K,
    grid_exponent,
    middle_gap,
    middle_gap_length,
    middle_gap_removed_measure,
    periodic_level_measure,
    pesin_k2,
    pesin_k3,
    random_kp,
    random_kp_removed_bound,
    removed_measure_union_bound,
)
from cantor_nest.intervals import Interval, IntervalUnion, normalize
from cantor_nest.model import Budget, digit_cantor, gaps_up_to

# ------------------------------------------------------------- middle gap


@pytest.mark.parametrize("levels", [0, 1, 5, 10])
def test_middle_gap_counts_and_measure(levels):
    gc = middle_gap(Fraction(1, 2), levels)
    gaps = gaps_up_to(gc)
    assert len(gaps) == 2 ** levels - 1
    assert normalize(gaps).measure == middle_gap_removed_measure(Fraction(1, 2), levels) == 1 - Fraction(1, 2 ** levels)


def test_middle_gap_lengths_and_rejects_bad_s():
    assert middle_gap_length(Fraction(1, 2), 1) == Fraction(1, 2)
    assert middle_gap_length(Fraction(1, 3), 2) == Fraction(4, 3) / 64
    with pytest.raises(ConstructionError):
        middle_gap(Fraction(2, 3), 3)


def test_middle_gap_gaps_are_disjoint_and_inside():
    gaps = gaps_up_to(middle_gap(Fraction(1, 3), 6))
    assert len(normalize(gaps)) == len(gaps)
    assert all(Interval.closed(-1, 1).contains_interval(g) for g in gaps)


# ------------------------------------------------------------ diophantine


def test_dio_small_enumeration():
    gaps = gaps_up_to(dio_gapset(3, 2, 2, Interval.closed(0, 1)))
    assert gaps == [Interval.open(0, Fraction(1, 8)), Interval.open(Fraction(3, 8), Fraction(5, 8)),
                    Interval.open(Fraction(7, 8), 1)]
    assert gaps_up_to(dio_gapset(3, 5, 4, Interval.closed(0, 1))) == []


@given(st.integers(3, 6), st.integers(2, 6), st.integers(0, 6))
def test_dio_measure_bound(d, q0, extra):
    rng = Interval.closed(-1, 1)
    gc = dio_gapset(d, q0, q0 + extra, rng)
    assert normalize(gaps_up_to(gc)).measure <= dio_gap_measure_bound(d, q0, q0 + extra, rng)


def test_dio_lower_bound_monotone_and_margin():
    ck = Fraction(6, 10)
    vals = [dio_lower_bound(1, ck, Fraction(1, 5), 8, q) for q in range(2, 12)]
    assert all(a < b < 2 for a, b in zip(vals, vals[1:]))
    q0 = dio_q0_for_margin(1, ck, Fraction(1, 5), 8, Fraction(1, 1000))
    assert dio_lower_bound(1, ck, Fraction(1, 5), 8, q0) > 2 - Fraction(1, 1000)
    assert q0 == 2 or dio_lower_bound(1, ck, Fraction(1, 5), 8, q0 - 1) <= 2 - Fraction(1, 1000)
    assert dio_lower_bound(1, 0, Fraction(1, 5), 8, 3) == 2


# ---------------------------------------------------------- continued fractions


def _cf_value(digits, tail):
    x = tail
    for a in reversed(digits):
        x = 1 / (a + x)
    return x


@given(st.lists(st.integers(1, 3), min_size=1, max_size=5), st.lists(st.integers(1, 3), min_size=1, max_size=6))
def test_cf_points_in_their_cylinders(prefix, tail_digits):
    x = _cf_value(prefix + tail_digits, Fraction(0))
    assert cf_cylinder(tuple(prefix), 3).contains(x)


def test_cf_covers_nested():
    for depth in range(3):
        assert cf_cantor(2, depth + 1).cover.issubset(cf_cantor(2, depth).cover)


# ---------------------------------------------------------------- Chebyshev


def _words(max_sum, max_abs=None):
    """All words with |digits| >= 2 and abs-sum <= max_sum."""
    out = [()]
    frontier = [()]
    while frontier:
        nxt = []
        for w in frontier:
            s = sum(abs(x) for x in w)
            for a in range(2, max_sum - s + 1):
                for m in (a, -a):
                    nxt.append(w + (m,))
        out += nxt
        frontier = nxt
    return out


def test_cylinder_examples():
    assert chebyshev_cylinder(()) == Interval.closed(-1, 1)
    assert chebyshev_cylinder((2,)) == Interval(Fraction(1, 2), Fraction(1), False, True)
    assert chebyshev_cylinder((2, 2)) == Interval(Fraction(7, 8), Fraction(1), False, True)


@pytest.mark.parametrize("word", [w for w in _words(7) if w])
def test_cylinder_length(word):
    assert chebyshev_cylinder(word).length == SymbolicWord(word).cylinder_length


def test_cylinders_partition_by_level():
    # cylinders of words with the same first k digits' structure are disjoint
    ws = [w for w in _words(6) if len(w) == 2]
    cyl = [chebyshev_cylinder(w) for w in ws]
    assert normalize(cyl).measure == sum(c.length for c in cyl)


def _brute_counts(admissible, max_sum):
    c = Counter()
    for w in _words(max_sum):
        if admissible(w):
            c[sum(abs(x) for x in w)] += 1
    return c


@pytest.mark.parametrize("s,N", [(Fraction(1), 3), (Fraction(1, 2), 2), (Fraction(2), 2)])
def test_k2_dp_counts_match_enumeration(s, N):
    gc = pesin_k2(s, N, 12)
    brute = _brute_counts(lambda w: admissible_k2(w, s, N), 12)
    dp = {int(k): v for k, v in gc.meta["words_per_sum"].items() if v}
    assert dp == dict(brute)


def test_k3_dp_counts_match_enumeration():
    gc = pesin_k3(3, Fraction(1, 3), 13)
    brute = _brute_counts(lambda w: admissible_k3(w, 3, Fraction(1, 3)), 13)
    assert {int(k): v for k, v in gc.meta["words_per_sum"].items() if v} == dict(brute)


def test_k3_needs_sum_12_before_a_digit_4():
    # the abs-sum of the prefix, the 4 included, must reach 12
    assert not admissible_k3((2, 2, 2, 4), 3, Fraction(1, 3))
    assert not admissible_k3((-3, 2, 2, 4), 3, Fraction(1, 3))
    assert admissible_k3((2, 2, 2, 2, 4), 3, Fraction(1, 3))
    assert admissible_k3((2,) * 10, 3, Fraction(1, 3))


@pytest.mark.parametrize("builder", [lambda b: pesin_k2(1, 3, b), lambda b: pesin_k3(3, Fraction(1, 3), b)])
def test_explicit_gaps_match_histogram(builder):
    gc = builder(10)
    gaps = gaps_up_to(gc)
    assert Counter(g.length for g in gaps) == gc.length_histogram()
    assert len(normalize(gaps)) == len(gaps)
    # removed plus unresolved mass cannot exceed the ambient
    assert normalize(gaps).measure + Fraction(gc.meta["unresolved_mass"]) <= 2


def test_gap_levels_bounded_by_cylinders():
    gc = pesin_k2(1, 3, 12)
    for S, level in enumerate(gc.levels()):
        assert len(level) <= 2 ** (S + 1)


# ---------------------------------------------------------------- decimal


def test_grid_exponent():
    assert grid_exponent(7, Fraction(7, 10)) == 10
    assert grid_exponent(3, Fraction(1, 2)) == 6


def test_counterexample_union_bound():
    gc = counterexample_kp(Fraction(1, 2), 1, 2)
    gaps = gaps_up_to(gc)
    assert normalize(gaps).measure <= removed_measure_union_bound(Fraction(1, 2), 1, 2)


def _explicit_level_measure(i, j, depth):
    K = even_digit_K()
    w = Fraction(1, 10 ** j)
    cov = K.cover(depth + i - 1).cover
    pieces = [Interval.open(Fraction(q, 10 ** i), Fraction(q, 10 ** i) + w).minus(part)
              for q in range(-10 ** i, 2 * 10 ** i) for part in cov]
    unit = IntervalUnion((Interval(Fraction(0), Fraction(1), True, False),))
    return normalize(pieces).intersection(unit).measure


@pytest.mark.parametrize("p,i,c", [(Fraction(1, 3), 1, 2), (Fraction(1, 3), 2, 2), (Fraction(1, 2), 2, 2),
                                   (Fraction(7, 10), 3, 1)])
def test_periodic_level_matches_explicit(p, i, c):
    j = grid_exponent(i, p)
    lm = periodic_level_measure(digit_cantor(10, (0, 2, 4, 6, 8)), i, j, cover_depth=c)
    assert lm.measure == _explicit_level_measure(i, j, lm.cover_depth)


def test_counterexample_estimate_small():
    est = counterexample_estimate(Fraction(7, 10), 19, 22)
    assert est.complement_upper <= est.series_bound[1]
    assert est.base_measure == 1 - Fraction(4, 45)
    n0 = counterexample_n_start(Fraction(7, 10), Fraction(7, 10))
    lo, hi = complement_series_bound(Fraction(7, 10), Fraction(7, 10), n0)
    assert hi <= Fraction(1, 10)


@given(st.integers(0, 2 ** 64 - 1))
def test_random_kp_reproducible(seed):
    a = gaps_up_to(random_kp(Fraction(4, 5), (1, 2), RandomSeed(seed)))
    b = gaps_up_to(random_kp(Fraction(4, 5), (1, 2), RandomSeed(seed)))
    assert a == b and len(a) <= 110
    assert normalize(a).measure <= random_kp_removed_bound(Fraction(4, 5), (1, 2))


def test_random_streams_are_distinct():
    s = RandomSeed(7)
    assert s.child(1).dyadic((0,), 53) != s.child(2).dyadic((0,), 53)
    assert RandomSeed(7, (1,)).dyadic((0,), 53) == s.child(1).dyadic((0,), 53)
    with pytest.raises(ValueError):
        RandomSeed(-1)
