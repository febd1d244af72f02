from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cantor_nest.combinatorics import (
    CapExceeded,
    binom_bound,
    card_E,
    card_E_bruteforce,
    card_E_table,
    composition_count,
    composition_sweep,
    count_ck,
    count_ck_bruteforce,
    e_threshold,
    signed_sequences,
)


def test_small_counts():
    t = count_ck(6)
    assert (t[2], t[3], t[4]) == (2, 2, 6)
    with pytest.raises(KeyError):
        t[1]


@pytest.mark.parametrize("k", range(2, 13))
def test_dp_matches_enumeration(k):
    assert count_ck(k)[k] == count_ck_bruteforce(k)


def test_ck_below_power_of_two():
    assert count_ck(64).below_power_of_two


def test_sequences_avoid_small_digits():
    assert all(all(abs(a) >= 2 for a in s) and sum(map(abs, s)) == 9 for s in signed_sequences(9))


@pytest.mark.parametrize("N", range(1, 11))
def test_card_E_table_matches_bruteforce(N):
    assert card_E_table(N, 3) == card_E_bruteforce(N, 3)


@pytest.mark.parametrize("N", range(1, 13))
def test_card_E_within_bound(N):
    e = card_E(N, 3, Fraction(1, 3))
    assert e.card == sum(e.by_R_n_t.values())
    assert all(R >= e_threshold(N, Fraction(1, 3)) for R, _, _ in e.by_R_n_t)
    assert e.holds


def test_card_E_empty_and_cap():
    # delta N + 1 > N: nothing qualifies
    assert card_E(1, 3, Fraction(1, 2)).card == 0
    with pytest.raises(CapExceeded):
        card_E_table(21, 3)


@given(st.integers(1, 24), st.integers(3, 5), st.data())
def test_binomial_bound(N, M, data):
    R = data.draw(st.integers(0, N))
    n = data.draw(st.integers(0, N // 2))
    t = data.draw(st.integers(0, min(n, R // M)))
    chk = binom_bound(n, t, N, R, M)
    assert chk.lhs == comb(n, t)
    assert chk.holds


def test_binomial_bound_preconditions():
    with pytest.raises(ValueError):
        binom_bound(3, 1, 6, 3, 2)
    with pytest.raises(ValueError):
        binom_bound(4, 2, 6, 3, 3)


def test_composition_links():
    a, b = composition_count(20, 3, 4)
    assert a.lhs == 8 * comb(20, 3) and a.holds and b.holds
    assert all(x.holds and y.holds for _, (x, y) in composition_sweep(16))
