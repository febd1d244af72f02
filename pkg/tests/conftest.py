from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cantor_nest.intervals import Interval

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rationals(lo=-8, hi=8, max_den=16):
    return st.builds(
        lambda n, d: Fraction(n, d),
        st.integers(lo * max_den, hi * max_den),
        st.integers(1, max_den),
    ).filter(lambda q: lo <= q <= hi)


@st.composite
def intervals(draw, lo=-8, hi=8, max_den=16, allow_points=True):
    a = draw(rationals(lo, hi, max_den))
    b = draw(rationals(lo, hi, max_den))
    a, b = min(a, b), max(a, b)
    if a == b:
        if not allow_points:
            b = a + Fraction(1, max_den)
        else:
            return Interval.closed(a, a)
    return Interval(a, b, draw(st.booleans()), draw(st.booleans()))


def interval_lists(min_size=0, max_size=8, **kw):
    return st.lists(intervals(**kw), min_size=min_size, max_size=max_size)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
