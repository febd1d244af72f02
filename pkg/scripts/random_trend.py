"""Mean outer measure of the admissible set for seeded random decimal gap sets."""
import argparse
from fractions import Fraction

from cantor_nest import io
from cantor_nest.constructions import RandomSeed, flagship_K, random_kp
from cantor_nest.nesting import x_inner_outer


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", default="4/5")
    ap.add_argument("--i-max", type=int, nargs="+", default=[2, 3, 4])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--depth", type=int, default=3)
    ap.add_argument("--csv", default="random_trend.csv")
    args = ap.parse_args()
    K, p = flagship_K(6), Fraction(args.p)
    rows = []
    for i1 in args.i_max:
        ms = [x_inner_outer(K, random_kp(p, (2, i1), RandomSeed(s)), args.depth).measure_outer for s in range(args.seeds)]
        rows += [(i1, s, m) for s, m in enumerate(ms)]
        print(f"levels 2..{i1}: mean outer measure {float(sum(ms) / len(ms)):.5f}")
    io.write_csv(args.csv, ["i_max", "seed", "measure_outer"], rows)


if __name__ == "__main__":
    main()
