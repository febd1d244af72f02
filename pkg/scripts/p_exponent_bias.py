"""Gap-exponent estimates for the Chebyshev gap sets as the symbolic budget grows.

Prints, for each budget, the sorted-gap and class-ratio enclosures. The
sorted-gap statistic approaches its limit from one side at rate about 1/budget,
which this table makes visible.
"""
import argparse
from fractions import Fraction

from cantor_nest import io
from cantor_nest.constructions import pesin_k2, pesin_k3
from cantor_nest.nesting import CLASS_RATIO, SORTED_GAP, estimate_P


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--budgets", type=int, nargs="+", default=[12, 16, 20, 24, 28, 32])
    ap.add_argument("--csv", default="p_exponent_bias.csv")
    args = ap.parse_args()
    rows = []
    sets = {
        "pesin_k2(1,3)": lambda b: pesin_k2(1, 3, b),
        "pesin_k3(3,1/3)": lambda b: pesin_k3(3, Fraction(1, 3), b),
    }
    for label, make in sets.items():
        for b in args.budgets:
            gc = make(b)
            for method in (SORTED_GAP, CLASS_RATIO):
                est = estimate_P(gc, method=method)
                rows.append((label, b, method, est.lo, est.hi))
                print(f"{label:16s} budget {b:3d} {method:11s} [{float(est.lo):.4f}, {float(est.hi):.4f}]")
    io.write_csv(args.csv, ["set", "sum_budget", "method", "lo", "hi"], rows)


if __name__ == "__main__":
    main()
