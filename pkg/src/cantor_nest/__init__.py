"""Exact tools for deciding when a translate of one Cantor set fits inside another."""
from .intervals import Interval, IntervalUnion, complement_in, minkowski_diff, normalize
from .model import (
    Budget,
    DigitCantorSpec,
    FiniteK,
    GapCantor,
    ck_upper_bound,
    digit_cantor,
    dimension,
    scale_set,
)
from .nesting import (
    cp_partial_sum,
    estimate_P,
    lambda_scan,
    nesting_report,
    theo1_lower_bound,
    x_inner_outer,
)

__version__ = "0.1.0"
