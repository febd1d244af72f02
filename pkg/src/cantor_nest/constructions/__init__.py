"""Gap sets and K sets used as worked examples and counterexamples."""
from .chebyshev import (
    SymbolicWord,
    admissible_k2,
    admissible_k3,
    branch_interval,
    chebyshev_cylinder,
    pesin_k2,
    pesin_k3,
)
from .decimal import (
    CounterexampleEstimate,
    RandomSeed,
    complement_series_bound,
    counterexample_estimate,
    counterexample_kp,
    counterexample_n_start,
    grid_exponent,
    periodic_level_measure,
    random_kp,
    random_kp_removed_bound,
    removed_measure_union_bound,
)
from .gallery import (
    ConstructionError,
    cf_cantor,
    cf_cylinder,
    dio_gap_measure_bound,
    dio_gapset,
    dio_lower_bound,
    dio_q0_for_margin,
    even_digit_K,
    flagship_K,
    middle_gap,
    middle_gap_length,
    middle_gap_removed_measure,
)
from .registry import REGISTRY, Construction, build, get

__all__ = [name for name in dir() if not name.startswith("_")]
