"""Bound versus exact inner/outer measures for scaled copies of the base-16 {0, 8} set.

K~ is the middle-gap set with s = 1/2; the scale runs over 2^-1 .. 2^-count.
"""
import argparse
from fractions import Fraction

from cantor_nest import io
from cantor_nest.constructions import middle_gap
from cantor_nest.model import digit_cantor
from cantor_nest.nesting import geometric_grid, lambda_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, default=10)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--depth", type=int, default=5)
    ap.add_argument("--csv", default="flagship_scan.csv")
    args = ap.parse_args()
    res = lambda_scan(digit_cantor(16, (0, 8)), middle_gap(Fraction(1, 2), args.levels),
                      geometric_grid(Fraction(1, 2), Fraction(1, 2), args.count), depth=args.depth)
    for r in res.rows:
        print(f"lambda {str(r.lam):>6s}  bound {float(r.theo1_bound):+.4f}  "
              f"inner {float(r.measure_inner):.4f}  outer {float(r.measure_outer):.4f}")
    io.write_csv(args.csv, ["lambda", "theo1_bound", "measure_inner", "measure_outer"],
                 [(r.lam, r.theo1_bound, r.measure_inner, r.measure_outer) for r in res.rows])


if __name__ == "__main__":
    main()
