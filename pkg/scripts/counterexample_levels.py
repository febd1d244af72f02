"""Per-level removed measure in the decimal grid counterexample, against the series bound."""
import argparse
from fractions import Fraction

from cantor_nest import io
from cantor_nest.constructions import counterexample_estimate, counterexample_n_start
from cantor_nest.model import DigitCantorSpec, dimension


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", default="7/10")
    ap.add_argument("--extra-levels", type=int, default=12)
    ap.add_argument("--csv", default="counterexample_levels.csv")
    args = ap.parse_args()
    p = Fraction(args.p)
    K_unit = DigitCantorSpec(10, (0, 2, 4, 6, 8))
    n0 = counterexample_n_start(p, dimension(K_unit).hi)
    est = counterexample_estimate(p, n0, n0 + args.extra_levels, K_unit)
    for lv in est.levels:
        print(f"i {lv.i:3d}  j {lv.j:3d}  cover depth {lv.cover_depth:2d}  measure {float(lv.measure):.3e}")
    print(f"total {float(est.complement_upper):.5f}  series [{float(est.series_bound[0]):.5f}, "
          f"{float(est.series_bound[1]):.5f}]  x >= {float(est.x_inner_lower):.4f}")
    io.write_csv(args.csv, ["i", "j", "cover_depth", "measure"], [(lv.i, lv.j, lv.cover_depth, lv.measure) for lv in est.levels])


if __name__ == "__main__":
    main()
